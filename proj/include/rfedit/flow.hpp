#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rfedit/fields.hpp"
#include "rfedit/time_grid.hpp"

namespace rfedit {

/// Field evaluations spent within one run. Not shared across runs.
class NfeCounter {
public:
    void add(std::uint64_t n = 1) noexcept { m_count += n; }
    std::uint64_t count() const noexcept { return m_count; }

private:
    std::uint64_t m_count = 0;
};

/// Evaluates the field once, counts it and rejects non-finite output.
Vector evaluate_velocity(const VelocityField& field, const Latent& z, double t, const Condition& c, std::size_t step,
                         NfeCounter& nfe);

/// Inverted latents z^i_{t_k} for k = 0..depth and the velocities that produced them.
///
/// velocities[k] is the evaluation at (latents[k], t_k) under `condition`, and
/// latents[k+1] == latents[k] - velocities[k] * dt_k holds exactly. For DDIM records the
/// stored velocity is the effective one, (latents[k] - latents[k+1]) / dt_k.
class TrajectoryRecord {
public:
    TrajectoryRecord(TimeGrid grid, Condition condition, std::vector<Latent> latents, std::vector<Vector> velocities,
                     std::uint64_t nfe);

    const TimeGrid& grid() const noexcept { return m_grid; }
    const Condition& condition() const noexcept { return m_condition; }
    const std::vector<Latent>& latents() const noexcept { return m_latents; }
    const std::vector<Vector>& velocities() const noexcept { return m_velocities; }
    std::uint64_t nfe() const noexcept { return m_nfe; }

    /// k_max: number of inversion steps stored.
    std::size_t depth() const noexcept { return m_velocities.size(); }

private:
    TimeGrid m_grid;
    Condition m_condition;
    std::vector<Latent> m_latents;
    std::vector<Vector> m_velocities;
    std::uint64_t m_nfe;
};

/// z + v(z, t_{k+1}, c) * dt_k : one denoising step from t_{k+1} to t_k.
Latent denoise_step(const VelocityField& field, const TimeGrid& grid, const Latent& z, std::size_t k,
                    const Condition& c, NfeCounter& nfe);

/// z - v(z, t_k, c) * dt_k : one inversion step from t_k to t_{k+1}.
Latent invert_step(const VelocityField& field, const TimeGrid& grid, const Latent& z, std::size_t k,
                   const Condition& c, NfeCounter& nfe);

/// k_max inversion steps from z0 = z_{t_0}, caching every latent and velocity.
TrajectoryRecord invert(const VelocityField& field, const Latent& z0, const Condition& c, const TimeGrid& grid,
                        std::size_t k_max, NfeCounter& nfe);

/// k_start denoising steps from z_init = z_{t_{k_start}} down to t_0. Returns the k_start + 1
/// visited latents, first z_init, last the t_0 state.
std::vector<Latent> sample(const VelocityField& field, const Latent& z_init, const Condition& c, const TimeGrid& grid,
                           std::size_t k_start, NfeCounter& nfe);

/// Evaluates the noise field once, counts it and rejects non-finite output.
Vector evaluate_epsilon(const EpsilonField& field, const Latent& z, double t, const Condition& c, std::size_t step,
                        NfeCounter& nfe);

/// DDIM inversion with the one-shot approximation eps(z_{t_{k+1}}) ~ eps(z_{t_k}):
///   z_{k+1} = sqrt(abar_{k+1}) z0 + sqrt(1 - abar_{k+1}) eps(z_k, t_{k+1}, c).
/// One noise evaluation per step.
TrajectoryRecord ddim_invert(const EpsilonField& eps_field, const Latent& z0, const Condition& c, const TimeGrid& grid,
                             std::size_t k_max, NfeCounter& nfe);

/// Deterministic DDIM denoising from z_{t_{k_start}} down to t_0, one noise evaluation per step.
std::vector<Latent> ddim_sample(const EpsilonField& eps_field, const Latent& z_init, const Condition& c,
                                const TimeGrid& grid, std::size_t k_start, NfeCounter& nfe);

}  // namespace rfedit
