#pragma once

#include "rfedit/fields.hpp"

namespace rfedit {

// Conversions between velocity and noise prediction under z_t = signal x0_hat + noise eps_hat
// and v = -(signal' x0_hat + noise' eps_hat).

/// Noise prediction implied by velocity v at (z, t). Throws DomainError where the schedule
/// carries no noise (alpha_bar = 1), since eps_hat does not enter the latent there.
Vector eps_from_velocity(const NoiseSchedule& schedule, const Latent& z, const Vector& v, double t);

/// Velocity implied by noise prediction eps at (z, t). Requires signal(t) > 0.
Vector velocity_from_eps(const NoiseSchedule& schedule, const Latent& z, const Vector& eps, double t);

/// eps_from_velocity applied to field.velocity(z, t, c).
Vector extract_epsilon(const VelocityField& field, const NoiseSchedule& schedule, const Latent& z, double t,
                       const Condition& c);

}  // namespace rfedit
