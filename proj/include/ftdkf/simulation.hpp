#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ftdkf/filter.hpp"
#include "ftdkf/fusion.hpp"
#include "ftdkf/scenario.hpp"

namespace ftdkf {

// Everything an observer may inspect after one estimator finished instant k.
struct StepSnapshot {
    int run = 0;
    Step k = 0;
    EstimatorKind estimator = EstimatorKind::Ftdkf;
    const Vec* truth = nullptr;
    const std::vector<LocalEstimate>* locals = nullptr;
    const DistributedFilter* filter = nullptr;      // null for the centralized filter
    const DynMat* joint_cov = nullptr;             // null without fusion
    const FusionWeights* weights = nullptr;        // null without fusion
};

using StepObserver = std::function<void(const StepSnapshot&)>;

struct MetricsRecord {
    std::string estimator;
    std::string run_group;
    Step k = 0;
    Vec mse;                      // per component, averaged over sensors and runs
    Vec fused_mse;                // empty when not fused
    std::vector<Vec> sensor_mse;  // per sensor, per component
    double min_eig_info = 0.0;    // min over runs and sensors of lambda_min([P^i_k(k)]^{-1})
    double window_min_info = 0.0; // same over every re-filtered instant s at time k
};

struct RunOptions {
    int workers = 0;  // 0: scenario value (0 there: hardware concurrency)
    // Called for every (run, k, estimator); forces sequential execution.
    StepObserver observer;
};

// Monte-Carlo simulation of every estimator in the scenario. Records are
// ordered by estimator (scenario order) then k = 1..horizon. Results do not
// depend on the worker count.
std::vector<MetricsRecord> run_monte_carlo(const Scenario& scenario, const RunOptions& options = {});

// Steady-state mean of one component over the final `fraction` of the horizon.
double steady_state(const std::vector<MetricsRecord>& records, const std::string& estimator, int component,
                    bool fused = false, double fraction = 0.2);

// All values finite and the final-20% mean at most `ratio` times the mean over
// the 40-60% window.
bool is_bounded(const std::vector<MetricsRecord>& records, const std::string& estimator, int component,
                double ratio = 2.0);

}  // namespace ftdkf
