#include "ftdkf/random.hpp"

#include <random>

namespace ftdkf {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_key(std::uint64_t seed, Stream domain, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    for (std::uint64_t part : {static_cast<std::uint64_t>(domain), a, b}) {
        s = h ^ part;
        h = splitmix64(s);
    }
    return h;
}

Vec gaussian(CounterRng& rng, const Mat& sqrt_cov) {
    // Fresh distribution per call: std::normal_distribution caches a spare draw.
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec z(sqrt_cov.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    return sqrt_cov * z;
}

}  // namespace ftdkf
