#include "rfedit/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfedit/errors.hpp"
#include "rfedit/types.hpp"

namespace rfedit {

NumericalError::NumericalError(std::size_t step, double time, const std::string& what)
    : std::runtime_error(what + " (step " + std::to_string(step) + ", t=" + std::to_string(time) + ")"),
      m_step(step),
      m_time(time) {}

Condition make_condition(std::string id, Vector embedding) {
    if (!all_finite(embedding))
        throw DomainError("condition '" + id + "' has a non-finite embedding");
    return Condition{std::move(id), std::move(embedding)};
}

TimeGrid::TimeGrid(std::vector<double> times, std::vector<double> window_bounds)
    : m_times(std::move(times)), m_bounds(std::move(window_bounds)) {
    if (m_times.size() < 2)
        throw ConfigError("time grid needs at least two nodes");
    if (m_times.front() < 0.0 || m_times.back() > 1.0)
        throw DomainError("time grid must lie inside [0, 1]");
    for (std::size_t k = 0; k + 1 < m_times.size(); ++k) {
        if (!(m_times[k + 1] > m_times[k]))
            throw ConfigError("time grid must be strictly increasing");
    }
    if (m_bounds.empty())
        m_bounds = {m_times.front(), m_times.back()};
    if (m_bounds.size() < 2)
        throw ConfigError("window bounds need at least two entries");
    for (std::size_t w = 0; w + 1 < m_bounds.size(); ++w) {
        if (!(m_bounds[w + 1] > m_bounds[w]))
            throw ConfigError("window bounds must be strictly increasing");
    }
    for (double b : m_bounds) {
        if (!has_node(b))
            throw ConfigError("window bound " + std::to_string(b) + " is not a grid node");
    }
}

double TimeGrid::t(std::size_t k) const {
    if (k >= m_times.size())
        throw IndexError("time index " + std::to_string(k) + " out of range");
    return m_times[k];
}

double TimeGrid::dt(std::size_t k) const {
    if (k >= steps())
        throw IndexError("step index " + std::to_string(k) + " out of range");
    return m_times[k + 1] - m_times[k];
}

std::size_t TimeGrid::window_index(double t) const {
    auto it = std::lower_bound(m_bounds.begin(), m_bounds.end(), t);
    auto idx = static_cast<std::size_t>(it - m_bounds.begin());
    std::size_t w = idx == 0 ? 0 : idx - 1;
    return std::min(w, windows() - 1);
}

bool TimeGrid::has_node(double t) const {
    return std::binary_search(m_times.begin(), m_times.end(), t);
}

TimeGrid make_uniform_grid(std::size_t n_steps, double t_lo, double t_hi, std::size_t n_windows) {
    if (!(t_lo < t_hi))
        throw DomainError("uniform grid needs t_lo < t_hi");
    if (t_lo < 0.0 || t_hi > 1.0)
        throw DomainError("uniform grid must lie inside [0, 1]");
    if (n_steps == 0 || n_windows == 0)
        throw ConfigError("uniform grid needs positive step and window counts");
    if (n_steps % n_windows != 0)
        throw ConfigError("n_steps (" + std::to_string(n_steps) + ") is not divisible by n_windows (" +
                          std::to_string(n_windows) + ")");

    const double span = t_hi - t_lo;
    std::vector<double> times(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k)
        times[k] = t_lo + span * (static_cast<double>(k) / static_cast<double>(n_steps));
    times.back() = t_hi;

    const std::size_t stride = n_steps / n_windows;
    std::vector<double> bounds;
    bounds.reserve(n_windows + 1);
    for (std::size_t k = 0; k <= n_steps; k += stride)
        bounds.push_back(times[k]);
    return TimeGrid(std::move(times), std::move(bounds));
}

bool aligned_with(const TimeGrid& grid, const TimeGrid& windows) {
    const double lo = grid.times().front();
    const double hi = grid.times().back();
    for (double b : windows.window_bounds()) {
        if (b < lo || b > hi)
            continue;
        if (!grid.has_node(b))
            return false;
    }
    return true;
}

}  // namespace rfedit
