#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ftdkf/consensus.hpp"
#include "ftdkf/graph.hpp"
#include "ftdkf/model.hpp"
#include "ftdkf/types.hpp"

namespace ftdkf {

// x^i_k(s), P^i_k(s): sensor i's estimate of instant s as held at time k.
// `info` caches [P]^{-1} after an update (empty after a predict).
struct LocalEstimate {
    int sensor_id = 0;
    Step k = 0;
    Step s = 0;
    Vec state;
    Mat cov;
    Mat info;
};

// Prior for instant est.s + 1: x = Phi_s x, P = Phi_s P Phi_s^T + Q_s.
LocalEstimate predict(const LocalEstimate& est, const SystemModel& system);
LocalEstimate predict(const LocalEstimate& est, const Mat& transition, const Mat& process_cov);

// Information-form update: [P]^{-1} = [P_prior]^{-1} + Omega,
// x = P ([P_prior]^{-1} x_prior + Theta). Throws NumericalError when the
// information sum is singular or its condition estimate exceeds 1e12.
LocalEstimate update(const LocalEstimate& prior, const Vec& theta, const Mat& omega);

// K = P H^T (H P H^T + R)^{-1}.
Mat kalman_gain(const Mat& prior_cov, const Mat& obs_matrix, const Mat& meas_cov);

// Covariance-form update with gain K: x = x + K (y - H x), P = (I - K H) P.
LocalEstimate covariance_update(const LocalEstimate& prior, const Mat& obs_matrix, const Mat& meas_cov,
                                const Vec& y);

struct EngineConfig {
    int max_delay = 0;
    // How many stale instants are re-filtered each step. Equal to max_delay
    // for the buffering filter, 0 for the drop-late ablation.
    int reprocess_depth = 0;
    // Track the joint error covariance of all local estimators (needed for fusion).
    bool track_joint_cov = false;
};

// Gating for instant s as seen at the current time: G(i, j) = gamma * w_ij.
using GatingProvider = std::function<DynMat(Step s)>;

// The anti-delay distributed filter for every sensor of a network. At each
// time k the anchor x_{k-1}(a), a = max(0, k - depth - 1), is carried forward
// and every instant a+1..k is re-filtered with the gating currently known.
class DistributedFilter {
public:
    DistributedFilter(SystemModel system, std::vector<SensorModel> sensors, const Topology& topology,
                      EngineConfig config);

    const EngineConfig& config() const { return config_; }
    int rounds_per_consensus() const { return rounds_; }
    Step now() const { return now_; }

    // Advances to time k = now() + 1. `own` holds each sensor's stamp-k pair
    // (H^T R^{-1} y, H^T R^{-1} H).
    void step(std::vector<InfoPair> own, const GatingProvider& gating);

    // x^i_k(k) for every sensor.
    const std::vector<LocalEstimate>& current() const { return window_.back().locals; }
    // Estimates of instant s held at the current time; s must lie in the re-filtered window.
    const std::vector<LocalEstimate>& estimates_at(Step s) const;
    // First instant re-filtered at the current time (a + 1).
    Step window_first() const { return window_first_; }
    // Joint error covariance of all locals at instant k (block (i, l) is P^{il}).
    const DynMat& joint_cov() const;

    // Consensus rounds consumed by the last step.
    int rounds_last_step() const { return rounds_last_step_; }
    // Min over sensors and re-filtered instants of lambda_min([P^i_k(s)]^{-1}) for the last step.
    double window_min_info_eig() const { return window_min_info_eig_; }

private:
    struct Slice {
        Step s = 0;
        std::vector<LocalEstimate> locals;
        DynMat joint;
    };

    const Slice& slice(Step s) const;

    SystemModel system_;
    std::vector<SensorModel> sensors_;
    std::shared_ptr<const ConsensusPlan> plan_;
    EngineConfig config_;
    int rounds_ = 1;
    Step now_ = 0;
    Step window_first_ = 0;
    // Own measurement pairs, newest last, covering the re-filter window.
    std::vector<std::vector<InfoPair>> own_history_;
    // Estimates for instants a..k from the latest pass.
    std::vector<Slice> window_;
    int rounds_last_step_ = 0;
    double window_min_info_eig_ = 0.0;
};

}  // namespace ftdkf
