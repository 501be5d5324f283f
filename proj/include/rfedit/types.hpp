#pragma once

#include <string>

#include <Eigen/Core>

namespace rfedit {

using Vector = Eigen::VectorXd;

// z_t: a point in latent space. Velocities and noise predictions share the representation.
using Latent = Vector;

inline bool all_finite(const Vector& v) {
    return v.allFinite();
}

/// A prompt stand-in. Fields resolve it by id; equality is by id only.
struct Condition {
    std::string id;
    Vector embedding;
};

inline bool operator==(const Condition& a, const Condition& b) {
    return a.id == b.id;
}

/// Validates the embedding and builds a condition.
Condition make_condition(std::string id, Vector embedding);

}  // namespace rfedit
