#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfedit/flow.hpp"

namespace rfedit {

enum class GuidanceMode { none, pg, dpg };
enum class RegenStrategy { nli, nsli, ili };
enum class MaskMode { per_step, fixed };

std::string to_string(GuidanceMode mode);
std::string to_string(RegenStrategy strategy);
std::string to_string(MaskMode mode);
GuidanceMode parse_guidance_mode(const std::string& s);
RegenStrategy parse_regen_strategy(const std::string& s);
MaskMode parse_mask_mode(const std::string& s);

/// Guidance applied during regeneration. Inversion never uses guidance.
struct GuidanceConfig {
    GuidanceMode mode = GuidanceMode::dpg;
    double scale = 2.5;      // w
    bool mask_enabled = true;
    double threshold = 0.4;  // alpha
    MaskMode mask_mode = MaskMode::per_step;

    void validate() const;
};

/// Binary per-dimension gate.
class Mask {
public:
    static Mask zeros(std::size_t dim);
    static Mask ones(std::size_t dim);
    /// Throws DomainError unless every entry is exactly 0 or 1.
    static Mask from_values(Vector values);

    const Vector& values() const noexcept { return m_values; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_values.size()); }
    std::size_t count() const;

    Vector apply(const Vector& v) const { return m_values.cwiseProduct(v); }

private:
    explicit Mask(Vector values) : m_values(std::move(values)) {}
    Vector m_values;
};

/// z + dt_k * v(z, t_{k+1}, c): the one-step denoised latent.
Latent mu(const VelocityField& field, const TimeGrid& grid, const Latent& z, std::size_t k, const Condition& c,
          NfeCounter& nfe);

/// Vector projection (v_target . v_source / |v_source|^2) v_source; zero when |v_source| < 1e-12.
Vector project(const Vector& v_target, const Vector& v_source);

/// Component of v_target orthogonal to v_source, with one re-orthogonalization pass.
/// Equals v_target when |v_source| < 1e-12.
Vector orthogonal_component(const Vector& v_target, const Vector& v_source);

inline constexpr double degenerate_source_norm = 1e-12;

/// w (v_target - v_source)
Vector pg_guidance(const Vector& v_target, const Vector& v_source, double w);
/// w (v_target - Proj(v_target onto v_source))
Vector dpg_guidance(const Vector& v_target, const Vector& v_source, double w);

/// Pseudo-guidance at z_hat for step k: two field evaluations at t_{k+1}.
Vector pg_velocity(const VelocityField& field, const TimeGrid& grid, const Latent& z_hat, std::size_t k,
                   const Condition& c_src, const Condition& c_tgt, double w, NfeCounter& nfe);

/// Disentangled prompt guidance at z_hat for step k: two field evaluations at t_{k+1}.
Vector dpg_velocity(const VelocityField& field, const TimeGrid& grid, const Latent& z_hat, std::size_t k,
                    const Condition& c_src, const Condition& c_tgt, double w, NfeCounter& nfe);

/// |difference| min-max normalized to [0, 1]. All-zero input maps to zeros; a constant
/// non-zero input maps to ones.
Vector relevance_from_difference(const Vector& difference);

/// Relevance of each dimension to the edit at z_hat: relevance_from_difference of
/// v(z_hat, t_{k+1}, c_tgt) - v(z_hat, t_{k+1}, c_src).
Vector relevance_map(const VelocityField& field, const TimeGrid& grid, const Latent& z_hat, std::size_t k,
                     const Condition& c_src, const Condition& c_tgt, NfeCounter& nfe);

/// m_i = 1 iff relevance_i > alpha.
Mask threshold_mask(const Vector& relevance, double alpha);

/// Latents the regeneration anchors to, with velocities already paid for.
///
/// cached_velocities[k] (when present) is v(latents[k], t_k, c_src). Inverted records cache
/// every level below their depth; NSLI anchors cache nothing.
struct AnchorView {
    std::span<const Latent> latents;
    std::span<const Vector> cached_velocities;

    static AnchorView of(const TrajectoryRecord& record) { return {record.latents(), record.velocities()}; }
};

struct StepOutcome {
    Latent latent;
    Mask mask;
    double guidance_norm = 0.0;
};

/// One anchored regeneration step from level k+1 to level k:
///
///   z_hat_k = z^a_k + m * dt_k G + m * [mu(z_hat, c_src) - mu(z^a_{k+1}, c_src)]
///
/// G is the configured guidance velocity (mode none: v_tgt - v_src, i.e. w = 1) and m the
/// relevance mask (all ones when masking is disabled; `fixed_mask` overrides recomputation).
/// Two field evaluations at z_hat (target and source). mu(z^a_{k+1}, c_src) comes from the
/// anchor cache when available, from the source evaluation when z_hat is bitwise equal to the
/// anchor, and otherwise costs a third evaluation.
StepOutcome regeneration_step(const VelocityField& field, const TimeGrid& grid, const AnchorView& anchors,
                              const Latent& z_hat, std::size_t k, const Condition& c_src, const Condition& c_tgt,
                              const GuidanceConfig& g, const Mask* fixed_mask, NfeCounter& nfe);

/// Inversion latent injection step against a PerRFI record.
Latent ili_step(const VelocityField& field, const TrajectoryRecord& record, const Latent& z_hat, std::size_t k,
                const Condition& c_src, const Condition& c_tgt, const GuidanceConfig& g, NfeCounter& nfe);

struct EditResult {
    Latent output;
    std::vector<Latent> trajectory;  // regeneration path, z_hat_{k_start} first, output last
    std::vector<Latent> anchors;     // inverted latents (or NSLI anchors), level 0 first
    std::uint64_t nfe = 0;
    std::vector<double> guidance_norms;  // per regeneration step, in execution order
    bool reference_configuration = true;  // false for guided NLI, which the method does not use
};

/// Plain conditional sampling under c_tgt from an inverted latent.
EditResult nli_edit(const VelocityField& field, const Latent& z_start, const Condition& c_tgt, const TimeGrid& grid,
                    std::size_t k_start);

/// z_k = signal(t_k) z0 + noise(t_k) eps_k with fresh eps_k ~ N(0, I) per level, k = 0..k_max.
std::vector<Latent> nsli_anchors(const NoiseSchedule& schedule, const Latent& z0, const TimeGrid& grid,
                                 std::size_t k_max, std::uint64_t seed);

struct EditOptions {
    double hook_scale = 0.0;  // aux hook strength; the reference is the anchor trajectory
    std::shared_ptr<const NoiseSchedule> nsli_schedule;  // required for NSLI
    std::uint64_t nsli_seed = 0;
};

/// Full pipeline: PerRFI inversion (or NSLI anchors) under c_src up to k_start, then k_start
/// regeneration steps under c_tgt with the chosen strategy and guidance.
///
/// The hook, when enabled, only acts during regeneration. It vanishes on the anchor trajectory
/// at grid nodes, so cached source velocities stay valid.
EditResult edit(const VelocityField& field, const Latent& z0, const Condition& c_src, const Condition& c_tgt,
                RegenStrategy strategy, const GuidanceConfig& g, const TimeGrid& grid, std::size_t k_start,
                const EditOptions& options = {});

/// Evaluations edit() spends for the given plan.
std::uint64_t expected_edit_nfe(RegenStrategy strategy, GuidanceMode mode, std::size_t k_start);

}  // namespace rfedit
