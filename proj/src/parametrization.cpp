#include "rfedit/parametrization.hpp"

#include <cmath>

#include "rfedit/errors.hpp"

namespace rfedit {

Vector eps_from_velocity(const NoiseSchedule& schedule, const Latent& z, const Vector& v, double t) {
    const double a = schedule.signal(t);
    const double b = schedule.noise(t);
    if (!(b > 0.0))
        throw DomainError("noise prediction is undefined where alpha_bar = 1 (t=" + std::to_string(t) + ")");
    if (!(a > 0.0))
        throw DomainError("noise prediction needs a positive signal coefficient");
    const double da = schedule.signal_rate(t);
    const double db = schedule.noise_rate(t);
    const double det = da * b - a * db;
    if (det == 0.0)
        throw DomainError("schedule rates are degenerate at t=" + std::to_string(t));
    return (a * v + da * z) / det;
}

Vector velocity_from_eps(const NoiseSchedule& schedule, const Latent& z, const Vector& eps, double t) {
    const double a = schedule.signal(t);
    if (!(a > 0.0))
        throw DomainError("velocity conversion needs a positive signal coefficient");
    const double b = schedule.noise(t);
    const Vector x0 = (z - b * eps) / a;
    return -(schedule.signal_rate(t) * x0 + schedule.noise_rate(t) * eps);
}

Vector extract_epsilon(const VelocityField& field, const NoiseSchedule& schedule, const Latent& z, double t,
                       const Condition& c) {
    return eps_from_velocity(schedule, z, field.velocity(z, t, c), t);
}

}  // namespace rfedit
