#include <cmath>
#include <limits>

#include "rfedit/editing.hpp"
#include "rfedit/errors.hpp"

namespace rfedit {

std::string to_string(GuidanceMode mode) {
    switch (mode) {
    case GuidanceMode::none: return "none";
    case GuidanceMode::pg: return "pg";
    case GuidanceMode::dpg: return "dpg";
    }
    return "?";
}

std::string to_string(RegenStrategy strategy) {
    switch (strategy) {
    case RegenStrategy::nli: return "nli";
    case RegenStrategy::nsli: return "nsli";
    case RegenStrategy::ili: return "ili";
    }
    return "?";
}

std::string to_string(MaskMode mode) {
    return mode == MaskMode::fixed ? "fixed" : "per_step";
}

GuidanceMode parse_guidance_mode(const std::string& s) {
    if (s == "none") return GuidanceMode::none;
    if (s == "pg") return GuidanceMode::pg;
    if (s == "dpg") return GuidanceMode::dpg;
    throw ConfigError("unknown guidance mode '" + s + "' (expected none, pg or dpg)");
}

RegenStrategy parse_regen_strategy(const std::string& s) {
    if (s == "nli") return RegenStrategy::nli;
    if (s == "nsli") return RegenStrategy::nsli;
    if (s == "ili") return RegenStrategy::ili;
    throw ConfigError("unknown regeneration strategy '" + s + "' (expected nli, nsli or ili)");
}

MaskMode parse_mask_mode(const std::string& s) {
    if (s == "per_step") return MaskMode::per_step;
    if (s == "fixed") return MaskMode::fixed;
    throw ConfigError("unknown mask mode '" + s + "' (expected per_step or fixed)");
}

void GuidanceConfig::validate() const {
    if (!std::isfinite(scale) || scale < 0.0)
        throw ConfigError("guidance scale must be finite and >= 0");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ConfigError("mask threshold must lie in [0, 1]");
}

Mask Mask::zeros(std::size_t dim) {
    return Mask(Vector::Zero(static_cast<Eigen::Index>(dim)));
}

Mask Mask::ones(std::size_t dim) {
    return Mask(Vector::Ones(static_cast<Eigen::Index>(dim)));
}

Mask Mask::from_values(Vector values) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] != 0.0 && values[i] != 1.0)
            throw DomainError("mask entries must be 0 or 1");
    }
    return Mask(std::move(values));
}

std::size_t Mask::count() const {
    return static_cast<std::size_t>((m_values.array() != 0.0).count());
}

Latent mu(const VelocityField& field, const TimeGrid& grid, const Latent& z, std::size_t k, const Condition& c,
          NfeCounter& nfe) {
    return denoise_step(field, grid, z, k, c, nfe);
}

Vector project(const Vector& v_target, const Vector& v_source) {
    const double norm2 = v_source.dot(v_source);
    if (std::sqrt(norm2) < degenerate_source_norm)
        return Vector::Zero(v_target.size());
    return (v_target.dot(v_source) / norm2) * v_source;
}

// The coefficient is v_t.v_s / v_s.v_s so that v_t == v_s yields exactly zero.
Vector orthogonal_component(const Vector& v_target, const Vector& v_source) {
    const double norm2 = v_source.dot(v_source);
    if (std::sqrt(norm2) < degenerate_source_norm)
        return v_target;
    Vector r = v_target - (v_target.dot(v_source) / norm2) * v_source;
    r -= (r.dot(v_source) / norm2) * v_source;
    // A residual at rounding level of v_target carries no direction (e.g. in one dimension).
    if (r.norm() <= 8.0 * std::numeric_limits<double>::epsilon() * v_target.norm())
        return Vector::Zero(v_target.size());
    return r;
}

Vector pg_guidance(const Vector& v_target, const Vector& v_source, double w) {
    return w * (v_target - v_source);
}

Vector dpg_guidance(const Vector& v_target, const Vector& v_source, double w) {
    return w * orthogonal_component(v_target, v_source);
}

Vector pg_velocity(const VelocityField& field, const TimeGrid& grid, const Latent& z_hat, std::size_t k,
                   const Condition& c_src, const Condition& c_tgt, double w, NfeCounter& nfe) {
    const double t = grid.t(k + 1);
    const Vector v_tgt = evaluate_velocity(field, z_hat, t, c_tgt, k, nfe);
    const Vector v_src = evaluate_velocity(field, z_hat, t, c_src, k, nfe);
    return pg_guidance(v_tgt, v_src, w);
}

Vector dpg_velocity(const VelocityField& field, const TimeGrid& grid, const Latent& z_hat, std::size_t k,
                    const Condition& c_src, const Condition& c_tgt, double w, NfeCounter& nfe) {
    const double t = grid.t(k + 1);
    const Vector v_tgt = evaluate_velocity(field, z_hat, t, c_tgt, k, nfe);
    const Vector v_src = evaluate_velocity(field, z_hat, t, c_src, k, nfe);
    return dpg_guidance(v_tgt, v_src, w);
}

Vector relevance_from_difference(const Vector& difference) {
    const Vector magnitude = difference.cwiseAbs();
    if (magnitude.size() == 0)
        return magnitude;
    const double lo = magnitude.minCoeff();
    const double hi = magnitude.maxCoeff();
    if (hi == 0.0)
        return Vector::Zero(magnitude.size());
    if (hi == lo)
        return Vector::Ones(magnitude.size());
    return (magnitude.array() - lo) / (hi - lo);
}

Vector relevance_map(const VelocityField& field, const TimeGrid& grid, const Latent& z_hat, std::size_t k,
                     const Condition& c_src, const Condition& c_tgt, NfeCounter& nfe) {
    const double t = grid.t(k + 1);
    const Vector v_tgt = evaluate_velocity(field, z_hat, t, c_tgt, k, nfe);
    const Vector v_src = evaluate_velocity(field, z_hat, t, c_src, k, nfe);
    return relevance_from_difference(v_tgt - v_src);
}

Mask threshold_mask(const Vector& relevance, double alpha) {
    Vector values = (relevance.array() > alpha).cast<double>();
    return Mask::from_values(std::move(values));
}

}  // namespace rfedit
