#pragma once

#include <string>
#include <vector>

#include "ftdkf/simulation.hpp"

namespace ftdkf {

inline constexpr const char* kMetricsHeader = "estimator,run_group,k,component,mse,fused_mse,min_eig_info";

// One row per (record, component) in record order; fused_mse is blank when the
// record was not fused. Numbers use %.12g, so equal records give equal bytes.
std::string format_metrics(const std::vector<MetricsRecord>& records);

// Writes format_metrics to `path`; throws Error on I/O failure.
void emit_metrics(const std::vector<MetricsRecord>& records, const std::string& path);

}  // namespace ftdkf
