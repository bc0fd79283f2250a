#pragma once

#include <cstdint>
#include <limits>

#include "ftdkf/types.hpp"

namespace ftdkf {

// Stream domains keep process noise, measurement noise, delays and the
// initial state statistically independent for the same seed.
enum class Stream : std::uint64_t {
    InitialState = 1,
    Process = 2,
    Measurement = 3,
    Delay = 4,
    Run = 5,
};

std::uint64_t splitmix64(std::uint64_t& state);

// Hash (seed, domain, a, b) into a stream key.
std::uint64_t derive_key(std::uint64_t seed, Stream domain, std::uint64_t a, std::uint64_t b);

// Counter-based generator: every (seed, domain, a, b) tuple names its own
// stream, so draws do not depend on evaluation order.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : state_(key) {}
    CounterRng(std::uint64_t seed, Stream domain, std::uint64_t a, std::uint64_t b)
        : state_(derive_key(seed, domain, a, b)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(state_); }

private:
    std::uint64_t state_;
};

// Zero-mean Gaussian sample with covariance sqrt_cov * sqrt_cov^T.
Vec gaussian(CounterRng& rng, const Mat& sqrt_cov);

}  // namespace ftdkf
