#include "rfedit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rfedit/errors.hpp"

namespace rfedit {

namespace {

void require_same_dim(const Latent& a, const Latent& b) {
    if (a.size() != b.size())
        throw DomainError("metric inputs have different dimensions");
    if (a.size() == 0)
        throw DomainError("metric inputs are empty");
}

}  // namespace

double mse(const Latent& a, const Latent& b) {
    require_same_dim(a, b);
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double psnr(const Latent& a, const Latent& b, double peak) {
    if (!(peak > 0.0))
        throw DomainError("psnr peak must be > 0");
    const double err = mse(a, b);
    if (err == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / err);
}

double consistency(const Latent& a, const Latent& b, const Mask& mask) {
    require_same_dim(a, b);
    if (mask.dim() != static_cast<std::size_t>(a.size()))
        throw DomainError("consistency mask has the wrong dimension");
    double sum = 0.0;
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (mask.values()[i] != 0.0)
            continue;
        const double d = a[i] - b[i];
        sum += d * d;
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double alignment(const Latent& z, const GaussianModel& model, const Condition& c_tgt) {
    const Vector& m = model.mean(c_tgt);
    require_same_dim(z, m);
    const double var = model.sigma() * model.sigma();
    return -(z - m).squaredNorm() / (2.0 * var);
}

double default_peak(const GaussianModel& model) {
    double largest = 0.0;
    for (const auto& [id, m] : model.means())
        largest = std::max(largest, m.norm());
    return largest + 3.0 * model.sigma();
}

MetricReport evaluate_report(const Latent& output, const Latent& source, const GaussianModel& model,
                             const Condition& c_tgt, const Mask& region, double peak, std::uint64_t nfe) {
    MetricReport r;
    r.mse = mse(output, source);
    r.psnr = psnr(output, source, peak);
    r.consistency = consistency(output, source, region);
    r.alignment = alignment(output, model, c_tgt);
    r.roundtrip = (output - source).norm();
    r.nfe = nfe;
    return r;
}

}  // namespace rfedit
