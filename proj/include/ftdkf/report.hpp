#pragma once

#include <optional>
#include <string>

#include "ftdkf/bounds.hpp"
#include "ftdkf/scenario.hpp"

namespace ftdkf {

struct BoundsReport {
    ResolvedBounds resolved;
    Step floor_k = 0;         // (Z+1) d_t
    BoundResult floor;        // at (floor_k, s = floor_k), the smallest over D_t(k)
    // From one simulated run of the buffering filter; empty when the horizon
    // does not reach the corresponding range.
    std::optional<double> vartheta;          // min lambda_min([P]^{-1}) for k < (Z+1) d_t
    std::optional<double> simulated_min_info;  // same for k >= (Z+1) d_t
    double target_cov = 0.0;
    bool target_from_simulation = false;
    DelayBound delay_bound;
};

// Resolves the bound constants, evaluates the floor and the delay bound for
// `target_cov` (defaults to the simulated worst covariance 1 / min info).
// Throws BoundUndefined for a degenerate logarithm base.
BoundsReport bounds_report(const Scenario& scenario, std::optional<double> target_cov = std::nullopt);

std::string format_bounds_report(const BoundsReport& report);

}  // namespace ftdkf
