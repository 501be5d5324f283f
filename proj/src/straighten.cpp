#include "rfedit/straighten.hpp"

#include <cmath>

#include "rfedit/errors.hpp"

namespace rfedit {

namespace {

struct MapState {
    double gain;
    Vector shift;
};

// d/dtau [gain, shift] with tau = t_hi - t, i.e. z' = scale z + offset in the denoising direction.
MapState derivative(const AffineField& field, const Condition& c, double t, const MapState& s) {
    AffineCoefficients co = field.coefficients(t, c);
    return MapState{co.scale * s.gain, co.scale * s.shift + co.offset};
}

}  // namespace

AffineFlowMap integrate_flow_map(const AffineField& field, const Condition& c, double t_hi, double t_lo,
                                 std::size_t substeps) {
    if (substeps == 0)
        throw ConfigError("flow map integration needs at least one sub-step");
    const double span = t_hi - t_lo;
    const double n = static_cast<double>(substeps);
    // At the data end the noise coefficient vanishes and, for small sigma, the gain spikes
    // on a time scale of order sigma. Nodes t_lo + span (1 - i/n)^4 resolve that spike.
    const bool graded = t_lo == 0.0;
    auto node = [&](std::size_t i) {
        if (i == substeps)
            return t_lo;
        const double u = static_cast<double>(i) / n;
        return graded ? t_lo + span * std::pow(1.0 - u, 4) : t_hi - span * u;
    };
    MapState s{1.0, Vector::Zero(static_cast<Eigen::Index>(field.dim()))};

    for (std::size_t i = 0; i < substeps; ++i) {
        const double t = node(i);
        const double h = t - node(i + 1);
        MapState k1 = derivative(field, c, t, s);
        MapState k2 = derivative(field, c, t - 0.5 * h, {s.gain + 0.5 * h * k1.gain, s.shift + 0.5 * h * k1.shift});
        MapState k3 = derivative(field, c, t - 0.5 * h, {s.gain + 0.5 * h * k2.gain, s.shift + 0.5 * h * k2.shift});
        MapState k4 = derivative(field, c, t - h, {s.gain + h * k3.gain, s.shift + h * k3.shift});
        s.gain += h / 6.0 * (k1.gain + 2.0 * k2.gain + 2.0 * k3.gain + k4.gain);
        s.shift += h / 6.0 * (k1.shift + 2.0 * k2.shift + 2.0 * k3.shift + k4.shift);
    }
    return AffineFlowMap{s.gain, std::move(s.shift)};
}

StraightenedField::StraightenedField(const AffineField& base, const TimeGrid& windows,
                                     const std::vector<Condition>& conditions, std::size_t substeps)
    : m_windows(windows), m_dim(base.dim()), m_maps(windows.windows()) {
    const auto& bounds = m_windows.window_bounds();
    for (std::size_t w = 0; w < m_windows.windows(); ++w) {
        for (const Condition& c : conditions) {
            AffineFlowMap map = integrate_flow_map(base, c, bounds[w + 1], bounds[w], substeps);
            if (!(map.gain > 0.0) || !all_finite(map.shift))
                throw NumericalError(w, bounds[w + 1], "degenerate flow map while straightening");
            m_maps[w].emplace(c.id, std::move(map));
        }
    }
}

const AffineFlowMap& StraightenedField::flow_map(std::size_t window, const Condition& c) const {
    if (window >= m_maps.size())
        throw IndexError("window index out of range");
    auto it = m_maps[window].find(c.id);
    if (it == m_maps[window].end())
        throw DomainError("condition '" + c.id + "' was not straightened");
    return it->second;
}

AffineCoefficients StraightenedField::coefficients(double t, const Condition& c) const {
    const std::size_t w = m_windows.window_index(t);
    const double t_lo = m_windows.window_bounds()[w];
    const double t_hi = m_windows.window_bounds()[w + 1];
    const AffineFlowMap& map = flow_map(w, c);

    // z = X + lambda (phi(X) - X) with lambda = (t_hi - t) / h; the velocity (phi(X) - X) / h
    // rewritten in terms of z.
    const double h = t_hi - t_lo;
    const double lambda = (t_hi - t) / h;
    const double denom = h * (1.0 + lambda * (map.gain - 1.0));

    AffineCoefficients co;
    co.scale = (map.gain - 1.0) / denom;
    co.offset = map.shift / denom;
    return co;
}

StraightenedField straighten(const AffineField& base, const TimeGrid& windows, const std::vector<Condition>& conditions) {
    return StraightenedField(base, windows, conditions);
}

}  // namespace rfedit
