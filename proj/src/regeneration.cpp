#include <optional>
#include <random>
#include <string>

#include "rfedit/aux_hook.hpp"
#include "rfedit/editing.hpp"
#include "rfedit/errors.hpp"

namespace rfedit {

namespace {

Vector guidance_velocity(const GuidanceConfig& g, const Vector& v_tgt, const Vector& v_src) {
    switch (g.mode) {
    case GuidanceMode::none: return v_tgt - v_src;
    case GuidanceMode::pg: return pg_guidance(v_tgt, v_src, g.scale);
    case GuidanceMode::dpg: return dpg_guidance(v_tgt, v_src, g.scale);
    }
    throw ConfigError("unhandled guidance mode");
}

Mask step_mask(const GuidanceConfig& g, const Mask* fixed_mask, const Vector& v_tgt, const Vector& v_src) {
    const auto dim = static_cast<std::size_t>(v_tgt.size());
    if (!g.mask_enabled)
        return Mask::ones(dim);
    if (fixed_mask != nullptr) {
        if (fixed_mask->dim() != dim)
            throw DomainError("fixed mask has the wrong dimension");
        return *fixed_mask;
    }
    return threshold_mask(relevance_from_difference(v_tgt - v_src), g.threshold);
}

// Guided no-latent-injection step: mu(z_hat, c_src) + m * dt G. Mode none is plain
// target-conditioned denoising and costs one evaluation.
StepOutcome nli_step(const VelocityField& field, const TimeGrid& grid, const Latent& z_hat, std::size_t k,
                     const Condition& c_src, const Condition& c_tgt, const GuidanceConfig& g, const Mask* fixed_mask,
                     NfeCounter& nfe) {
    const double t = grid.t(k + 1);
    const double dt = grid.dt(k);
    const Vector v_tgt = evaluate_velocity(field, z_hat, t, c_tgt, k, nfe);
    if (g.mode == GuidanceMode::none)
        return StepOutcome{z_hat + v_tgt * dt, Mask::ones(static_cast<std::size_t>(z_hat.size())), 0.0};

    const Vector v_src = evaluate_velocity(field, z_hat, t, c_src, k, nfe);
    Mask mask = step_mask(g, fixed_mask, v_tgt, v_src);
    const Vector guided = mask.apply(guidance_velocity(g, v_tgt, v_src));
    Latent next = z_hat + v_src * dt + guided * dt;
    return StepOutcome{std::move(next), std::move(mask), guided.norm()};
}

}  // namespace

StepOutcome regeneration_step(const VelocityField& field, const TimeGrid& grid, const AnchorView& anchors,
                              const Latent& z_hat, std::size_t k, const Condition& c_src, const Condition& c_tgt,
                              const GuidanceConfig& g, const Mask* fixed_mask, NfeCounter& nfe) {
    if (k >= grid.steps())
        throw IndexError("regeneration step index " + std::to_string(k) + " out of range");
    if (anchors.latents.size() < k + 2)
        throw IndexError("anchor trajectory has " + std::to_string(anchors.latents.size()) +
                         " levels, step " + std::to_string(k) + " needs " + std::to_string(k + 2));
    if (z_hat.size() != anchors.latents[k + 1].size() || !all_finite(z_hat))
        throw DomainError("regeneration latent must be finite and match the anchor dimension");

    const double t = grid.t(k + 1);
    const double dt = grid.dt(k);
    const Latent& anchor_next = anchors.latents[k + 1];

    const Vector v_tgt = evaluate_velocity(field, z_hat, t, c_tgt, k, nfe);
    const Vector v_src = evaluate_velocity(field, z_hat, t, c_src, k, nfe);

    Vector v_anchor;
    if (k + 1 < anchors.cached_velocities.size())
        v_anchor = anchors.cached_velocities[k + 1];
    else if (k + 2 == anchors.latents.size() && z_hat == anchor_next)
        v_anchor = v_src;
    else
        v_anchor = evaluate_velocity(field, anchor_next, t, c_src, k, nfe);

    Mask mask = step_mask(g, fixed_mask, v_tgt, v_src);
    const Vector guided = mask.apply(guidance_velocity(g, v_tgt, v_src));
    const Vector cross_trajectory = (z_hat + v_src * dt) - (anchor_next + v_anchor * dt);

    Latent next = anchors.latents[k] + guided * dt + mask.apply(cross_trajectory);
    return StepOutcome{std::move(next), std::move(mask), guided.norm()};
}

Latent ili_step(const VelocityField& field, const TrajectoryRecord& record, const Latent& z_hat, std::size_t k,
                const Condition& c_src, const Condition& c_tgt, const GuidanceConfig& g, NfeCounter& nfe) {
    if (!(record.condition() == c_src))
        throw DomainError("record was inverted under '" + record.condition().id + "', not '" + c_src.id + "'");
    if (record.depth() < k + 1)
        throw IndexError("record depth " + std::to_string(record.depth()) + " does not cover step " +
                         std::to_string(k));
    g.validate();
    return regeneration_step(field, record.grid(), AnchorView::of(record), z_hat, k, c_src, c_tgt, g, nullptr, nfe)
        .latent;
}

EditResult nli_edit(const VelocityField& field, const Latent& z_start, const Condition& c_tgt, const TimeGrid& grid,
                    std::size_t k_start) {
    NfeCounter nfe;
    EditResult result;
    result.trajectory = sample(field, z_start, c_tgt, grid, k_start, nfe);
    result.output = result.trajectory.back();
    result.nfe = nfe.count();
    result.guidance_norms.assign(k_start, 0.0);
    return result;
}

std::vector<Latent> nsli_anchors(const NoiseSchedule& schedule, const Latent& z0, const TimeGrid& grid,
                                 std::size_t k_max, std::uint64_t seed) {
    if (k_max > grid.steps())
        throw IndexError("anchor depth exceeds grid steps");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<Latent> anchors;
    anchors.reserve(k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k) {
        Vector eps(z0.size());
        for (Eigen::Index i = 0; i < eps.size(); ++i)
            eps[i] = normal(rng);
        const double t = grid.t(k);
        anchors.push_back(schedule.signal(t) * z0 + schedule.noise(t) * eps);
    }
    return anchors;
}

EditResult edit(const VelocityField& field, const Latent& z0, const Condition& c_src, const Condition& c_tgt,
                RegenStrategy strategy, const GuidanceConfig& g, const TimeGrid& grid, std::size_t k_start,
                const EditOptions& options) {
    g.validate();
    if (k_start > grid.steps())
        throw IndexError("k_start exceeds grid steps");
    if (static_cast<std::size_t>(z0.size()) != field.dim() || !all_finite(z0))
        throw DomainError("z0 must be finite and match the field dimension");

    NfeCounter nfe;
    EditResult result;
    std::vector<Vector> cached;

    if (strategy == RegenStrategy::nsli) {
        if (!options.nsli_schedule)
            throw ConfigError("NSLI needs a noise schedule");
        result.anchors = nsli_anchors(*options.nsli_schedule, z0, grid, k_start, options.nsli_seed);
    } else {
        TrajectoryRecord record = invert(field, z0, c_src, grid, k_start, nfe);
        result.anchors = record.latents();
        cached = record.velocities();
    }
    result.reference_configuration = !(strategy == RegenStrategy::nli && g.mode != GuidanceMode::none);

    std::optional<AuxHookField> hooked;
    if (options.hook_scale != 0.0) {
        AuxHook hook;
        hook.scale = options.hook_scale;
        for (std::size_t k = 0; k <= k_start; ++k)
            hook.anchors.emplace_back(grid.t(k), result.anchors[k]);
        hooked.emplace(field, std::move(hook));
    }
    const VelocityField& regen_field = hooked ? static_cast<const VelocityField&>(*hooked) : field;

    const AnchorView anchors{result.anchors, cached};
    std::optional<Mask> fixed;
    const bool fix_mask = g.mask_enabled && g.mask_mode == MaskMode::fixed;

    Latent z_hat = result.anchors[k_start];
    result.trajectory.push_back(z_hat);
    for (std::size_t k = k_start; k-- > 0;) {
        const Mask* fixed_ptr = fixed ? &*fixed : nullptr;
        StepOutcome step = strategy == RegenStrategy::nli
                               ? nli_step(regen_field, grid, z_hat, k, c_src, c_tgt, g, fixed_ptr, nfe)
                               : regeneration_step(regen_field, grid, anchors, z_hat, k, c_src, c_tgt, g, fixed_ptr, nfe);
        if (fix_mask && !fixed && !(strategy == RegenStrategy::nli && g.mode == GuidanceMode::none))
            fixed = step.mask;
        z_hat = std::move(step.latent);
        result.trajectory.push_back(z_hat);
        result.guidance_norms.push_back(step.guidance_norm);
    }

    result.output = z_hat;
    result.nfe = nfe.count();
    return result;
}

std::uint64_t expected_edit_nfe(RegenStrategy strategy, GuidanceMode mode, std::size_t k_start) {
    const std::uint64_t k = k_start;
    switch (strategy) {
    case RegenStrategy::ili: return k + 2 * k;
    case RegenStrategy::nsli: return k == 0 ? 0 : 2 * k + (k - 1);
    case RegenStrategy::nli: return mode == GuidanceMode::none ? 2 * k : 3 * k;
    }
    return 0;
}

}  // namespace rfedit
