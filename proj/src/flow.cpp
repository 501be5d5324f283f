#include "rfedit/flow.hpp"

#include <cmath>
#include <string>

#include "rfedit/errors.hpp"

namespace rfedit {

namespace {

void require_latent(const Latent& z, std::size_t dim, const char* what) {
    if (static_cast<std::size_t>(z.size()) != dim)
        throw DomainError(std::string(what) + " has dimension " + std::to_string(z.size()) + ", field expects " +
                          std::to_string(dim));
    if (!all_finite(z))
        throw DomainError(std::string(what) + " is not finite");
}

void require_depth(std::size_t depth, const TimeGrid& grid, const char* what) {
    if (depth > grid.steps())
        throw IndexError(std::string(what) + " " + std::to_string(depth) + " exceeds grid steps " +
                         std::to_string(grid.steps()));
}

void require_schedule(const EpsilonField& field, const TimeGrid& grid, std::size_t depth) {
    for (std::size_t k = 0; k <= depth; ++k) {
        const double abar = field.alpha_bar(grid.t(k));
        if (!(abar > 0.0 && abar <= 1.0))
            throw ConfigError("alpha_bar(" + std::to_string(grid.t(k)) + ") = " + std::to_string(abar) +
                              " is outside (0, 1]");
    }
}

}  // namespace

Vector evaluate_velocity(const VelocityField& field, const Latent& z, double t, const Condition& c, std::size_t step,
                         NfeCounter& nfe) {
    nfe.add();
    Vector v = field.velocity(z, t, c);
    if (!all_finite(v))
        throw NumericalError(step, t, "non-finite velocity");
    return v;
}

Vector evaluate_epsilon(const EpsilonField& field, const Latent& z, double t, const Condition& c, std::size_t step,
                        NfeCounter& nfe) {
    nfe.add();
    Vector e = field.epsilon(z, t, c);
    if (!all_finite(e))
        throw NumericalError(step, t, "non-finite noise prediction");
    return e;
}

TrajectoryRecord::TrajectoryRecord(TimeGrid grid, Condition condition, std::vector<Latent> latents,
                                   std::vector<Vector> velocities, std::uint64_t nfe)
    : m_grid(std::move(grid)),
      m_condition(std::move(condition)),
      m_latents(std::move(latents)),
      m_velocities(std::move(velocities)),
      m_nfe(nfe) {
    if (m_latents.size() != m_velocities.size() + 1)
        throw ConfigError("trajectory record needs exactly one more latent than velocities");
    if (m_velocities.size() > m_grid.steps())
        throw IndexError("trajectory record deeper than its grid");
}

Latent denoise_step(const VelocityField& field, const TimeGrid& grid, const Latent& z, std::size_t k,
                    const Condition& c, NfeCounter& nfe) {
    if (k >= grid.steps())
        throw IndexError("denoise step index " + std::to_string(k) + " out of range");
    require_latent(z, field.dim(), "latent");
    const Vector v = evaluate_velocity(field, z, grid.t(k + 1), c, k, nfe);
    return z + v * grid.dt(k);
}

Latent invert_step(const VelocityField& field, const TimeGrid& grid, const Latent& z, std::size_t k,
                   const Condition& c, NfeCounter& nfe) {
    if (k >= grid.steps())
        throw IndexError("inversion step index " + std::to_string(k) + " out of range");
    require_latent(z, field.dim(), "latent");
    const Vector v = evaluate_velocity(field, z, grid.t(k), c, k, nfe);
    return z - v * grid.dt(k);
}

TrajectoryRecord invert(const VelocityField& field, const Latent& z0, const Condition& c, const TimeGrid& grid,
                        std::size_t k_max, NfeCounter& nfe) {
    require_depth(k_max, grid, "inversion depth");
    require_latent(z0, field.dim(), "z0");

    std::vector<Latent> latents;
    std::vector<Vector> velocities;
    latents.reserve(k_max + 1);
    velocities.reserve(k_max);
    latents.push_back(z0);

    NfeCounter local;
    for (std::size_t k = 0; k < k_max; ++k) {
        Vector v = evaluate_velocity(field, latents.back(), grid.t(k), c, k, local);
        latents.push_back(latents.back() - v * grid.dt(k));
        velocities.push_back(std::move(v));
    }
    nfe.add(local.count());
    return TrajectoryRecord(grid, c, std::move(latents), std::move(velocities), local.count());
}

std::vector<Latent> sample(const VelocityField& field, const Latent& z_init, const Condition& c, const TimeGrid& grid,
                           std::size_t k_start, NfeCounter& nfe) {
    require_depth(k_start, grid, "sampling start");
    require_latent(z_init, field.dim(), "initial latent");

    std::vector<Latent> trajectory;
    trajectory.reserve(k_start + 1);
    trajectory.push_back(z_init);
    for (std::size_t k = k_start; k-- > 0;) {
        const Vector v = evaluate_velocity(field, trajectory.back(), grid.t(k + 1), c, k, nfe);
        trajectory.push_back(trajectory.back() + v * grid.dt(k));
    }
    return trajectory;
}

TrajectoryRecord ddim_invert(const EpsilonField& eps_field, const Latent& z0, const Condition& c, const TimeGrid& grid,
                             std::size_t k_max, NfeCounter& nfe) {
    require_depth(k_max, grid, "inversion depth");
    require_latent(z0, eps_field.dim(), "z0");
    require_schedule(eps_field, grid, k_max);
    const NoiseSchedule& schedule = eps_field.schedule();

    std::vector<Latent> latents;
    std::vector<Vector> velocities;
    latents.reserve(k_max + 1);
    velocities.reserve(k_max);
    latents.push_back(z0);

    NfeCounter local;
    for (std::size_t k = 0; k < k_max; ++k) {
        const double t_next = grid.t(k + 1);
        const Vector eps = evaluate_epsilon(eps_field, latents.back(), t_next, c, k, local);
        Latent next = schedule.signal(t_next) * z0 + schedule.noise(t_next) * eps;
        const double dt = grid.dt(k);
        Vector v = (latents.back() - next) / dt;
        // Keep the record identity latents[k+1] == latents[k] - v dt bit-exact.
        next = latents.back() - v * dt;
        velocities.push_back(std::move(v));
        latents.push_back(std::move(next));
    }
    nfe.add(local.count());
    return TrajectoryRecord(grid, c, std::move(latents), std::move(velocities), local.count());
}

std::vector<Latent> ddim_sample(const EpsilonField& eps_field, const Latent& z_init, const Condition& c,
                                const TimeGrid& grid, std::size_t k_start, NfeCounter& nfe) {
    require_depth(k_start, grid, "sampling start");
    require_latent(z_init, eps_field.dim(), "initial latent");
    require_schedule(eps_field, grid, k_start);
    const NoiseSchedule& schedule = eps_field.schedule();

    std::vector<Latent> trajectory;
    trajectory.reserve(k_start + 1);
    trajectory.push_back(z_init);
    for (std::size_t k = k_start; k-- > 0;) {
        const double t_hi = grid.t(k + 1);
        const double t_lo = grid.t(k);
        const Latent& z = trajectory.back();
        const Vector eps = evaluate_epsilon(eps_field, z, t_hi, c, k, nfe);
        const Vector x0 = (z - schedule.noise(t_hi) * eps) / schedule.signal(t_hi);
        trajectory.push_back(schedule.signal(t_lo) * x0 + schedule.noise(t_lo) * eps);
    }
    return trajectory;
}

}  // namespace rfedit
