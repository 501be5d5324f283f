#pragma once

#include <cstddef>
#include <vector>

namespace rfedit {

/// Discretization t_0 < t_1 < ... < t_N of [0, 1], with optional window bounds.
///
/// t = 0 is the data end, t = 1 the noise end. Window bounds always coincide with grid
/// nodes, so an Euler step never straddles a window. When no bounds are given the whole
/// grid forms a single window.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times, std::vector<double> window_bounds = {});

    std::size_t steps() const noexcept { return m_times.size() - 1; }
    std::size_t windows() const noexcept { return m_bounds.size() - 1; }

    double t(std::size_t k) const;
    /// t_{k+1} - t_k.
    double dt(std::size_t k) const;

    const std::vector<double>& times() const noexcept { return m_times; }
    const std::vector<double>& window_bounds() const noexcept { return m_bounds; }

    /// Index of the window (b_w, b_{w+1}] holding t. The first window is closed at b_0;
    /// times outside the grid clamp to the first or last window.
    std::size_t window_index(double t) const;

    bool has_node(double t) const;

private:
    std::vector<double> m_times;
    std::vector<double> m_bounds;
};

/// n_steps + 1 equispaced nodes over [t_lo, t_hi], window bounds at every
/// (n_steps / n_windows)-th node.
TimeGrid make_uniform_grid(std::size_t n_steps, double t_lo, double t_hi, std::size_t n_windows);

/// True when every window bound of `windows` is a node of `grid` (inside grid's span).
bool aligned_with(const TimeGrid& grid, const TimeGrid& windows);

}  // namespace rfedit
