#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftdkf/fusion.hpp"
#include "ftdkf/graph.hpp"
#include "ftdkf/model.hpp"
#include "ftdkf/network.hpp"

namespace ftdkf {

enum class EstimatorKind { Ftdkf, DropLate, Centralized };

std::string to_string(EstimatorKind kind);
// "ftdkf" | "droplate" | "centralized"
EstimatorKind parse_estimator(const std::string& text);
// Comma-separated list, duplicates rejected.
std::vector<EstimatorKind> parse_estimator_list(const std::string& text);

struct Scenario {
    std::string name;
    SystemModel system;
    std::vector<SensorModel> sensors;  // sorted by sensor_id, id i is node i-1
    Topology topology;                 // weights resolved
    DelayProfile delays;
    int buffer_length = 0;  // 0: max_delay + 2
    int horizon = 0;
    int runs = 200;
    FusionMode fusion = FusionMode::Vector;
    std::vector<EstimatorKind> estimators{EstimatorKind::Ftdkf};
    std::uint64_t seed = 1;
    int workers = 0;  // 0: hardware concurrency
    std::vector<std::string> warnings;

    int max_delay() const { return delays.max_delay(); }
    // Copy with a uniform delay profile over 0..d and the default buffer length.
    Scenario with_max_delay(int d) const;
};

// Parses and validates a scenario document. Errors are ValidationError with
// the offending field path in the message (e.g. "run.horizon: missing").
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace ftdkf
