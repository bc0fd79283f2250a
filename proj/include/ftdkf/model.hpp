#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftdkf/random.hpp"
#include "ftdkf/types.hpp"

namespace ftdkf {

// A matrix that may vary with the step index. Constant series skip the
// std::function call.
class StepSeries {
public:
    StepSeries() = default;
    StepSeries(Mat constant) : constant_(std::move(constant)) {}  // NOLINT: implicit by intent
    explicit StepSeries(std::function<Mat(Step)> provider) : provider_(std::move(provider)) {}

    Mat at(Step k) const { return provider_ ? provider_(k) : constant_; }
    bool is_constant() const { return !provider_; }

private:
    Mat constant_;
    std::function<Mat(Step)> provider_;
};

// x_{k+1} = Phi_k x_k + w_k,  w_k ~ N(0, Q_k),  x_0 ~ N(mu_0, P_0).
struct SystemModel {
    int state_dim = 0;
    StepSeries transition;
    StepSeries process_cov;
    Vec init_mean;
    Mat init_cov;

    static SystemModel constant(const Mat& transition, const Mat& process_cov, const Vec& init_mean,
                                const Mat& init_cov);
};

// y^i_k = H^i_k x_k + v^i_k,  v^i_k ~ N(0, R^i_k).
struct SensorModel {
    int sensor_id = 0;  // 1-based label, matches the scenario file
    StepSeries obs_matrix;
    StepSeries meas_cov;

    static SensorModel constant(int sensor_id, const Mat& obs_matrix, const Mat& meas_cov);
};

struct GramianReport {
    Mat gramian;
    double alpha = 0.0;
    double beta = 0.0;
    double alpha_bar = 0.0;
    double beta_bar = 0.0;
    int horizon = 0;
};

struct ValidationReport {
    double eta = 0.0;  // min singular value of Phi^{-1}
    std::vector<std::string> violations;
    std::optional<GramianReport> observability;

    bool ok() const { return violations.empty(); }
    // Throws ValidationError listing every violation.
    void throw_if_invalid() const;
};

// Constant-acceleration kinematics with sampling period T.
Mat constant_acceleration_transition(double period);

Vec step_truth(const SystemModel& model, const Vec& state, Step k, CounterRng& rng);
// Variant with a precomputed process-noise square root.
Vec step_truth(const Mat& transition, const Mat& process_sqrt, const Vec& state, CounterRng& rng);

Vec measure(const SensorModel& sensor, const Vec& state, Step k, CounterRng& rng);
Vec measure(const Mat& obs_matrix, const Mat& meas_sqrt, const Vec& state, CounterRng& rng);

// M_{k+horizon,k} = sum_{l=k}^{k+horizon} O_{l,k}^T (sum_i H_l^T R_l^{-1} H_l) O_{l,k}; alpha/beta
// bound its spectrum, alpha_bar/beta_bar bound the window extended by n-1 steps.
GramianReport observability_gramian(const SystemModel& system, const std::vector<SensorModel>& sensors,
                                    Step k, int horizon);

// Smallest horizon whose Gramian has lambda_min > 1e-9; nullopt if none up to max_horizon.
std::optional<GramianReport> find_observability_horizon(const SystemModel& system,
                                                        const std::vector<SensorModel>& sensors, Step k = 0,
                                                        int max_horizon = 64);

double transition_eta(const Mat& transition);

ValidationReport validate_model(const SystemModel& system, const std::vector<SensorModel>& sensors,
                                Step k = 0);

}  // namespace ftdkf
