#include "rfedit/harness/seeding.hpp"

#include <random>

namespace rfedit::harness {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t sample_seed(std::uint64_t master, std::size_t index) {
    std::uint64_t state = master + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index);
    return splitmix64(state);
}

std::uint64_t stream_seed(std::uint64_t sample, std::uint64_t stream) {
    std::uint64_t state = sample ^ (0xd1b54a32d192ed03ULL * (stream + 1));
    return splitmix64(state);
}

Latent draw_gaussian(const Vector& mean, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Latent z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z[i] = mean[i] + sigma * normal(rng);
    return z;
}

}  // namespace rfedit::harness
