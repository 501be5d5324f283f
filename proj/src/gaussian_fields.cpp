#include "rfedit/fields.hpp"

#include <cmath>

#include "rfedit/errors.hpp"

namespace rfedit {

GaussianModel::GaussianModel(std::map<std::string, Vector> means, double sigma)
    : m_means(std::move(means)), m_sigma(sigma), m_dim(0) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ConfigError("Gaussian model needs a finite sigma > 0");
    if (m_means.empty())
        throw ConfigError("Gaussian model needs at least one component");
    m_dim = static_cast<std::size_t>(m_means.begin()->second.size());
    if (m_dim == 0)
        throw ConfigError("Gaussian model means must have dimension >= 1");
    for (const auto& [id, m] : m_means) {
        if (static_cast<std::size_t>(m.size()) != m_dim)
            throw ConfigError("mean of component '" + id + "' has inconsistent dimension");
        if (!all_finite(m))
            throw ConfigError("mean of component '" + id + "' is not finite");
    }
}

const Vector& GaussianModel::mean(const std::string& id) const {
    auto it = m_means.find(id);
    if (it == m_means.end())
        throw DomainError("unknown condition id '" + id + "'");
    return it->second;
}

const Vector& GaussianModel::mean(const Condition& c) const {
    return mean(c.id);
}

Condition GaussianModel::condition(const std::string& id) const {
    return Condition{id, mean(id)};
}

std::vector<Condition> GaussianModel::conditions() const {
    std::vector<Condition> out;
    out.reserve(m_means.size());
    for (const auto& [id, m] : m_means)
        out.push_back(Condition{id, m});
    return out;
}

GaussianFlowField::GaussianFlowField(std::shared_ptr<const GaussianModel> model,
                                     std::shared_ptr<const NoiseSchedule> schedule)
    : m_model(std::move(model)), m_schedule(std::move(schedule)) {
    if (!m_model || !m_schedule)
        throw ConfigError("Gaussian flow field needs a model and a schedule");
}

AffineCoefficients GaussianFlowField::coefficients(double t, const Condition& c) const {
    const Vector& m = m_model->mean(c);
    const double var = m_model->sigma() * m_model->sigma();
    const double a = m_schedule->signal(t);
    const double b = m_schedule->noise(t);
    const double da = m_schedule->signal_rate(t);
    const double db = m_schedule->noise_rate(t);

    // Cov(z_t) = (a^2 var + b^2) I and Cov(a' x_0 + b' eps, z_t) = (a' a var + b' b) I.
    const double marginal_var = a * a * var + b * b;
    const double gain = (da * a * var + db * b) / marginal_var;

    // v = -[a' m + gain (z - a m)]
    AffineCoefficients co;
    co.scale = -gain;
    co.offset = (gain * a - da) * m;
    return co;
}

std::shared_ptr<GaussianFlowField> gaussian_rf_field(std::shared_ptr<const GaussianModel> model) {
    return std::make_shared<GaussianFlowField>(std::move(model), std::make_shared<LinearSchedule>());
}

std::shared_ptr<GaussianFlowField> vp_flow_field(std::shared_ptr<const GaussianModel> model,
                                                 std::shared_ptr<const NoiseSchedule> schedule) {
    return std::make_shared<GaussianFlowField>(std::move(model), std::move(schedule));
}

GaussianEpsilonField::GaussianEpsilonField(std::shared_ptr<const GaussianModel> model,
                                           std::shared_ptr<const NoiseSchedule> schedule)
    : m_model(std::move(model)), m_schedule(std::move(schedule)) {
    if (!m_model || !m_schedule)
        throw ConfigError("Gaussian epsilon field needs a model and a schedule");
}

Vector GaussianEpsilonField::epsilon(const Latent& z, double t, const Condition& c) const {
    const Vector& m = m_model->mean(c);
    const double var = m_model->sigma() * m_model->sigma();
    const double a = m_schedule->signal(t);
    const double b = m_schedule->noise(t);
    const double marginal_var = a * a * var + b * b;
    return (b / marginal_var) * (z - a * m);
}

}  // namespace rfedit
