#pragma once

#include <cstdint>

#include "rfedit/editing.hpp"
#include "rfedit/fields.hpp"

namespace rfedit {

/// Mean of squared componentwise differences.
double mse(const Latent& a, const Latent& b);

/// 10 log10(peak^2 / mse); +infinity when the inputs are identical.
double psnr(const Latent& a, const Latent& b, double peak);

/// MSE over the dimensions where mask = 0. An all-ones mask leaves nothing to compare and
/// yields 0.
double consistency(const Latent& a, const Latent& b, const Mask& mask);

/// -|z - m_tgt|^2 / (2 sigma^2): log-density of the target component up to a constant.
double alignment(const Latent& z, const GaussianModel& model, const Condition& c_tgt);

/// max_c |m_c| + 3 sigma.
double default_peak(const GaussianModel& model);

struct MetricReport {
    double mse = 0.0;
    double psnr = 0.0;
    double consistency = 0.0;
    double alignment = 0.0;
    double roundtrip = 0.0;  // |output - source|_2
    std::uint64_t nfe = 0;
};

/// Scores an output latent against its source. `region` marks the edit region excluded
/// from the consistency analog.
MetricReport evaluate_report(const Latent& output, const Latent& source, const GaussianModel& model,
                             const Condition& c_tgt, const Mask& region, double peak, std::uint64_t nfe);

}  // namespace rfedit
