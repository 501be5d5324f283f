#pragma once

#include <utility>
#include <vector>

#include "rfedit/fields.hpp"

namespace rfedit {

/// Reference trajectory plus drift strength for the auxiliary-conditioning hook.
struct AuxHook {
    std::vector<std::pair<double, Latent>> anchors;  // sorted by t
    double scale = 0.0;

    /// Piecewise-linear interpolation of the anchors, clamped at both ends.
    /// Returns the stored anchor exactly when t is an anchor time.
    Latent reference(double t) const;
    void validate(std::size_t dim) const;
};

/// v(z, t, c) + scale * (reference(t) - z). A zero scale returns the base velocity untouched.
///
/// Non-owning: the base field must outlive the hooked field.
class AuxHookField final : public VelocityField {
public:
    AuxHookField(const VelocityField& base, AuxHook hook);

    std::size_t dim() const override { return m_base->dim(); }
    Vector velocity(const Latent& z, double t, const Condition& c) const override;

    const AuxHook& hook() const noexcept { return m_hook; }

private:
    const VelocityField* m_base;
    AuxHook m_hook;
};

AuxHookField with_aux_hook(const VelocityField& base, AuxHook hook);

}  // namespace rfedit
