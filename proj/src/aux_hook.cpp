#include "rfedit/aux_hook.hpp"

#include <algorithm>
#include <cmath>

#include "rfedit/errors.hpp"

namespace rfedit {

void AuxHook::validate(std::size_t dim) const {
    if (!(scale >= 0.0) || !std::isfinite(scale))
        throw ConfigError("aux hook scale must be finite and >= 0");
    if (anchors.empty())
        throw ConfigError("aux hook needs at least one anchor");
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (static_cast<std::size_t>(anchors[i].second.size()) != dim)
            throw ConfigError("aux hook anchor has the wrong dimension");
        if (i > 0 && !(anchors[i].first > anchors[i - 1].first))
            throw ConfigError("aux hook anchors must be sorted by time");
    }
}

Latent AuxHook::reference(double t) const {
    if (t <= anchors.front().first)
        return anchors.front().second;
    if (t >= anchors.back().first)
        return anchors.back().second;
    auto hi = std::lower_bound(anchors.begin(), anchors.end(), t,
                               [](const auto& a, double value) { return a.first < value; });
    if (hi->first == t)
        return hi->second;
    auto lo = hi - 1;
    const double u = (t - lo->first) / (hi->first - lo->first);
    return (1.0 - u) * lo->second + u * hi->second;
}

AuxHookField::AuxHookField(const VelocityField& base, AuxHook hook) : m_base(&base), m_hook(std::move(hook)) {
    m_hook.validate(base.dim());
}

Vector AuxHookField::velocity(const Latent& z, double t, const Condition& c) const {
    Vector v = m_base->velocity(z, t, c);
    if (m_hook.scale == 0.0)
        return v;
    v += m_hook.scale * (m_hook.reference(t) - z);
    return v;
}

AuxHookField with_aux_hook(const VelocityField& base, AuxHook hook) {
    return AuxHookField(base, std::move(hook));
}

}  // namespace rfedit
