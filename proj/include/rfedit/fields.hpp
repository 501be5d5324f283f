#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rfedit/schedule.hpp"
#include "rfedit/types.hpp"

namespace rfedit {

/// Velocity estimator v(z, t, c).
///
/// Orientation follows the Euler updates used throughout: denoising from t_{k+1} to t_k adds
/// v * dt, inversion from t_k to t_{k+1} subtracts it. Implementations must be deterministic
/// and safe to evaluate concurrently.
class VelocityField {
public:
    virtual ~VelocityField() = default;

    virtual std::size_t dim() const = 0;
    virtual Vector velocity(const Latent& z, double t, const Condition& c) const = 0;
};

/// v(z, t, c) = scale(t, c) * z + offset(t, c).
struct AffineCoefficients {
    double scale = 0.0;
    Vector offset;
};

class AffineField : public VelocityField {
public:
    virtual AffineCoefficients coefficients(double t, const Condition& c) const = 0;

    Vector velocity(const Latent& z, double t, const Condition& c) const override {
        AffineCoefficients co = coefficients(t, c);
        return co.scale * z + co.offset;
    }
};

/// Noise-prediction estimator eps(z, t, c) with its schedule.
class EpsilonField {
public:
    virtual ~EpsilonField() = default;

    virtual std::size_t dim() const = 0;
    virtual Vector epsilon(const Latent& z, double t, const Condition& c) const = 0;
    virtual const NoiseSchedule& schedule() const = 0;

    double alpha_bar(double t) const { return schedule().alpha_bar(t); }
};

/// Isotropic Gaussian data model: x_0 ~ N(m_c, sigma^2 I) for each condition c.
class GaussianModel {
public:
    GaussianModel(std::map<std::string, Vector> means, double sigma);

    std::size_t dim() const noexcept { return m_dim; }
    double sigma() const noexcept { return m_sigma; }

    bool contains(const std::string& id) const { return m_means.count(id) != 0; }
    const Vector& mean(const Condition& c) const;
    const Vector& mean(const std::string& id) const;

    /// Condition whose embedding is the component mean.
    Condition condition(const std::string& id) const;
    std::vector<Condition> conditions() const;

    const std::map<std::string, Vector>& means() const noexcept { return m_means; }

private:
    std::map<std::string, Vector> m_means;
    double m_sigma;
    std::size_t m_dim;
};

/// Exact marginal velocity of the interpolant z_t = signal x_0 + noise eps for the Gaussian
/// model: v = -E[signal' x_0 + noise' eps | z_t = z]. Affine in z.
///
/// With the linear schedule this is the rectified-flow velocity E[x_0 - eps | z_t]; with the
/// cosine schedule it is the variance-preserving probability-flow velocity.
class GaussianFlowField final : public AffineField {
public:
    GaussianFlowField(std::shared_ptr<const GaussianModel> model, std::shared_ptr<const NoiseSchedule> schedule);

    std::size_t dim() const override { return m_model->dim(); }
    AffineCoefficients coefficients(double t, const Condition& c) const override;

    const GaussianModel& model() const noexcept { return *m_model; }
    const NoiseSchedule& schedule() const noexcept { return *m_schedule; }

private:
    std::shared_ptr<const GaussianModel> m_model;
    std::shared_ptr<const NoiseSchedule> m_schedule;
};

/// Rectified-flow field: linear interpolant.
std::shared_ptr<GaussianFlowField> gaussian_rf_field(std::shared_ptr<const GaussianModel> model);

/// Probability-flow field of the variance-preserving process with the given schedule.
std::shared_ptr<GaussianFlowField> vp_flow_field(std::shared_ptr<const GaussianModel> model,
                                                 std::shared_ptr<const NoiseSchedule> schedule);

/// Exact E[eps | z_t = z] for the Gaussian model.
class GaussianEpsilonField final : public EpsilonField {
public:
    GaussianEpsilonField(std::shared_ptr<const GaussianModel> model, std::shared_ptr<const NoiseSchedule> schedule);

    std::size_t dim() const override { return m_model->dim(); }
    Vector epsilon(const Latent& z, double t, const Condition& c) const override;
    const NoiseSchedule& schedule() const override { return *m_schedule; }

private:
    std::shared_ptr<const GaussianModel> m_model;
    std::shared_ptr<const NoiseSchedule> m_schedule;
};

}  // namespace rfedit
