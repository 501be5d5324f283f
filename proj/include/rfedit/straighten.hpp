#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rfedit/fields.hpp"
#include "rfedit/time_grid.hpp"

namespace rfedit {

/// Flow map z(t_lo) = gain * z(t_hi) + shift of an affine field, integrated in the
/// denoising direction across one window.
struct AffineFlowMap {
    double gain = 1.0;
    Vector shift;

    Vector apply(const Vector& z) const { return gain * z + shift; }
};

/// Integrates the affine coefficient ODEs of `field` from t_hi down to t_lo with classic
/// fourth-order Runge-Kutta on `substeps` sub-steps: equal ones, or clustered toward t = 0
/// when t_lo = 0.
AffineFlowMap integrate_flow_map(const AffineField& field, const Condition& c, double t_hi, double t_lo,
                                 std::size_t substeps);

/// Piecewise-straight field built from an affine field, one straight segment per window.
///
/// Inside window (t_a, t_b] every trajectory is the straight line from its window-entry state
/// X at t_b to the base flow map image phi(X) at t_a, traversed at constant speed. Windows are
/// closed at the top and open at the bottom (the first window also holds t_a = 0), so a
/// denoising step that ends on a window bound uses that window's velocity, and the field is
/// single-valued. Flow maps are computed eagerly for every (window, condition) pair; the
/// base field is not retained.
class StraightenedField final : public AffineField {
public:
    static constexpr std::size_t default_substeps = 256;

    StraightenedField(const AffineField& base, const TimeGrid& windows, const std::vector<Condition>& conditions,
                      std::size_t substeps = default_substeps);

    std::size_t dim() const override { return m_dim; }
    AffineCoefficients coefficients(double t, const Condition& c) const override;

    const TimeGrid& windows() const noexcept { return m_windows; }
    const AffineFlowMap& flow_map(std::size_t window, const Condition& c) const;

private:
    TimeGrid m_windows;
    std::size_t m_dim;
    std::vector<std::map<std::string, AffineFlowMap>> m_maps;
};

/// Straightens `base` over the windows of `windows`, for the given conditions.
StraightenedField straighten(const AffineField& base, const TimeGrid& windows, const std::vector<Condition>& conditions);

}  // namespace rfedit
