#pragma once

#include <cstddef>
#include <cstdint>

#include "rfedit/types.hpp"

namespace rfedit::harness {

/// One splitmix64 step: advances `state` by the golden-ratio increment and returns the
/// finalized output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of sample i: the (i+1)-th splitmix64 output starting from the master seed.
std::uint64_t sample_seed(std::uint64_t master, std::size_t index);

/// Seed for a named stream derived from a sample seed (stream 0 draws z0, stream 1 NSLI noise).
std::uint64_t stream_seed(std::uint64_t sample, std::uint64_t stream);

/// mean + sigma * N(0, I), drawn with mt19937_64 seeded by `seed`.
Latent draw_gaussian(const Vector& mean, double sigma, std::uint64_t seed);

}  // namespace rfedit::harness
