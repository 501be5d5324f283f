#pragma once

#include <memory>
#include <string>

namespace rfedit {

/// Interpolation z_t = signal(t) * x_0 + noise(t) * eps between data (t = 0) and noise (t = 1).
///
/// For the variance-preserving family alpha_bar(t) = signal(t)^2.
class NoiseSchedule {
public:
    virtual ~NoiseSchedule() = default;

    virtual std::string name() const = 0;
    virtual double signal(double t) const = 0;
    virtual double noise(double t) const = 0;
    virtual double signal_rate(double t) const = 0;
    virtual double noise_rate(double t) const = 0;

    double alpha_bar(double t) const {
        const double s = signal(t);
        return s * s;
    }
};

/// Rectified-flow interpolant: signal 1 - t, noise t.
class LinearSchedule final : public NoiseSchedule {
public:
    std::string name() const override { return "linear"; }
    double signal(double t) const override { return 1.0 - t; }
    double noise(double t) const override { return t; }
    double signal_rate(double) const override { return -1.0; }
    double noise_rate(double) const override { return 1.0; }
};

/// Variance-preserving cosine schedule alpha_bar(t) = cos^2(theta_max t), truncated so that
/// alpha_bar(1) = alpha_bar_min. signal = cos(theta_max t), noise = sin(theta_max t).
class CosineSchedule final : public NoiseSchedule {
public:
    explicit CosineSchedule(double alpha_bar_min = 1e-4);

    std::string name() const override { return "cosine"; }
    double signal(double t) const override;
    double noise(double t) const override;
    double signal_rate(double t) const override;
    double noise_rate(double t) const override;

    double theta_max() const noexcept { return m_theta_max; }

private:
    double m_theta_max;
};

/// "linear" or "cosine"; throws ConfigError otherwise.
std::shared_ptr<const NoiseSchedule> make_schedule(const std::string& name);

}  // namespace rfedit
