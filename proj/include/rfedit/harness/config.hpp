#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfedit/editing.hpp"

namespace rfedit::harness {

struct FieldSpec {
    std::string base = "rf";         // rf | vp: the curved field that gets straightened
    double sigma = 1.0;
    std::string schedule = "cosine";  // schedule of the vp field, the DDIM baseline and vp NSLI anchors
    std::size_t windows = 4;
    double hook_scale = 0.0;
    std::map<std::string, Vector> means;
};

struct GridSpec {
    std::size_t n_steps = 4;
    std::size_t k_start = 4;
};

struct MethodSpec {
    std::string inversion = "perrfi";  // perrfi | ddim (ddim: reconstruct only)
    RegenStrategy strategy = RegenStrategy::ili;
    GuidanceConfig guidance;
    std::string source = "src";
    std::string target = "tgt";
};

struct RunSpec {
    std::optional<std::uint64_t> seed;
    std::size_t samples = 100;
};

struct MetricsSpec {
    std::string region = "none";  // none | mean_difference
    double region_threshold = 0.5;
};

/// Axes of the compare matrix. Empty axes fall back to the method's single value.
struct CompareSpec {
    std::vector<RegenStrategy> strategies;
    std::vector<GuidanceMode> guidance;
    std::vector<double> hook_scales;
    std::vector<bool> masks;
};

struct OutputSpec {
    std::string dir = "out";
    std::string format = "csv";  // csv | json
    bool svg = false;
};

struct ExperimentConfig {
    FieldSpec field;
    GridSpec grid;
    MethodSpec method;
    RunSpec run;
    MetricsSpec metrics;
    CompareSpec compare;
    OutputSpec output;

    /// Throws ConfigError on any inconsistency, including a missing seed.
    void validate() const;
};

/// The built-in experiment: D = 2, components src = (-2, 0) and tgt = (2, 0), sigma = 1,
/// N = 4, k_start = 4, K = 4 windows, ILI + DPG (w = 2.5, alpha = 0.4). No seed.
ExperimentConfig default_config();

/// Parses flat `section.key = value` text on top of default_config(). `#` starts a comment.
/// Unknown or repeated keys throw ConfigError. Any field.mean.* key replaces the default means.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Every effective setting except output.*, one `key = value` per line in sorted key order.
std::string canonical_text(const ExperimentConfig& config);

/// FNV-1a 64 of canonical_text, as 16 hex digits.
std::string fingerprint(const ExperimentConfig& config);

}  // namespace rfedit::harness
