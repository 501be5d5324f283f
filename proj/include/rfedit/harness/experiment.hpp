#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfedit/harness/config.hpp"
#include "rfedit/harness/svg.hpp"
#include "rfedit/metrics.hpp"
#include "rfedit/straighten.hpp"

namespace rfedit::harness {

/// A harness-level check failed (NFE mismatch, sweep direction). Exit code 1.
class AssertionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Objects materialized from a config.
struct Setup {
    std::shared_ptr<const GaussianModel> model;
    std::shared_ptr<const NoiseSchedule> interpolant;  // schedule of the base field
    std::shared_ptr<const GaussianFlowField> base;     // curved
    std::shared_ptr<const StraightenedField> straight;
    TimeGrid grid;
    Condition source;
    Condition target;
    Mask region;  // edit region excluded from the consistency analog
    double peak = 1.0;
};

/// Validates the config and builds its fields, grid and conditions.
Setup build_setup(const ExperimentConfig& config);

/// Edit region for metrics.region = mean_difference: dimensions where |m_tgt - m_src|
/// exceeds `threshold` times its maximum. All zeros when the means coincide.
Mask mean_difference_region(const Vector& source_mean, const Vector& target_mean, double threshold);

struct RunRow {
    std::string fingerprint;
    std::string label;
    std::size_t sample = 0;
    std::uint64_t seed = 0;
    MetricReport metrics;
    std::uint64_t expected_nfe = 0;
    std::vector<double> guidance_norms;
    double wall_ms = 0.0;  // reported separately, never part of the deterministic outputs
};

/// Sorts by (fingerprint, label, sample).
void sort_rows(std::vector<RunRow>& rows);

/// Round trips with c_tgt = c_src per sample, four rows each:
///   perrfi_nli    invert + sample on the straightened field
///   perrfi_ili    the configured ILI edit as an identity edit
///   euler_curved  invert + sample on the curved base field
///   ddim          DDIM inversion + sampling with the noise predictor of the curved
///                 variance-preserving field (field.schedule)
std::vector<RunRow> run_reconstruct(const ExperimentConfig& config);

struct EditRun {
    std::vector<RunRow> rows;
    std::vector<Latent> sources;
    std::vector<EditResult> results;
};

/// The configured edit over run.samples source draws. method.inversion must be perrfi.
EditRun run_edit(const ExperimentConfig& config);

/// Cross product of the compare axes; every cell reuses the same per-sample seeds.
std::vector<RunRow> run_compare(const ExperimentConfig& config);

/// Cell configs of the compare matrix, in row-label order.
std::vector<std::pair<std::string, ExperimentConfig>> compare_cells(const ExperimentConfig& config);

enum class SweepParam { w, alpha, s, n_steps };
SweepParam parse_sweep_param(const std::string& s);
std::string to_string(SweepParam p);

struct SweepPoint {
    double value = 0.0;
    std::string fingerprint;
    std::size_t samples = 0;
    double mean_mse = 0.0;
    double mean_consistency = 0.0;
    double mean_alignment = 0.0;
    double mean_roundtrip = 0.0;
    std::uint64_t nfe = 0;  // per sample
};

enum class Trend { increasing, decreasing };

/// Non-strict between neighbours, strict between the first and last value.
struct DirectionCheck {
    std::string metric;
    Trend expected = Trend::increasing;
    bool holds = false;
};

struct SweepResult {
    SweepParam param = SweepParam::w;
    std::vector<SweepPoint> points;
    std::vector<DirectionCheck> checks;
    std::vector<RunRow> rows;

    bool all_hold() const;
};

/// Documented directions: w raises consistency (worse) and alignment (better); alpha, s and
/// n_steps lower consistency. n_steps sets k_start = n_steps. Values must be ascending.
SweepResult run_sweep(const ExperimentConfig& config, SweepParam param, const std::vector<double>& values);

bool trend_holds(const std::vector<double>& series, Trend expected);

struct FlowPlotData {
    std::vector<std::vector<Point2>> curved;    // one polyline per sample
    std::vector<std::vector<Point2>> straight;  // one polyline per (sample, window)
    std::vector<Point2> means;
    double sigma = 1.0;
};

/// Noise-to-data trajectories under c_src from shared noise draws: the curved base field and
/// the straightened field, each integrated on `steps_per_window` Euler steps per window.
/// Needs D = 2.
FlowPlotData flow_trajectories(const ExperimentConfig& config, std::size_t max_samples = 16,
                               std::size_t steps_per_window = 64);

std::string render_flow_svg(const FlowPlotData& data);

/// Inversion (dashed) and regeneration (solid) paths of an edit run, with the mixture
/// components. Needs D = 2.
std::string render_edit_svg(const ExperimentConfig& config, const EditRun& run, std::size_t max_samples = 16);

}  // namespace rfedit::harness
