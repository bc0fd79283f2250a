#include "ftdkf/filter.hpp"

#include <algorithm>
#include <limits>

#include "ftdkf/error.hpp"
#include "ftdkf/fusion.hpp"

namespace ftdkf {

namespace {

constexpr double kMinRcond = 1e-12;
constexpr double kMaxCond = 1e12;

Eigen::LLT<Mat> factor(const Mat& m, const char* what) {
    Eigen::LLT<Mat> llt(m);
    if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
        throw NumericalError(std::string(what) + " is singular or ill-conditioned (condition > 1e12)");
    }
    return llt;
}

}  // namespace

LocalEstimate predict(const LocalEstimate& est, const Mat& transition, const Mat& process_cov) {
    require_dims(transition.cols() == est.state.size(), "transition vs state");
    LocalEstimate out;
    out.sensor_id = est.sensor_id;
    out.k = est.k;
    out.s = est.s + 1;
    out.state.noalias() = transition * est.state;
    out.cov = symmetrized(transition * est.cov * transition.transpose() + process_cov);
    return out;
}

LocalEstimate predict(const LocalEstimate& est, const SystemModel& system) {
    return predict(est, system.transition.at(est.s), system.process_cov.at(est.s));
}

LocalEstimate update(const LocalEstimate& prior, const Vec& theta, const Mat& omega) {
    const auto n = prior.state.size();
    require_dims(theta.size() == n && omega.rows() == n && omega.cols() == n, "Theta/Omega vs state");
    const auto prior_info = spd_inverse(prior.cov, std::numeric_limits<double>::infinity());
    if (!prior_info) throw NumericalError("prior covariance is not positive definite");

    LocalEstimate out;
    out.sensor_id = prior.sensor_id;
    out.k = prior.k;
    out.s = prior.s;
    out.info = symmetrized(*prior_info + omega);
    auto cov = spd_inverse(out.info, kMaxCond);
    if (!cov) throw NumericalError("information matrix is singular or ill-conditioned (condition > 1e12)");
    out.cov = std::move(*cov);
    out.state.noalias() = out.cov * (*prior_info * prior.state + theta);
    return out;
}

Mat kalman_gain(const Mat& prior_cov, const Mat& obs_matrix, const Mat& meas_cov) {
    require_dims(obs_matrix.cols() == prior_cov.rows(), "observation matrix vs covariance");
    const Mat innovation = symmetrized(obs_matrix * prior_cov * obs_matrix.transpose() + meas_cov);
    const auto llt = factor(innovation, "innovation covariance");
    // K = P H^T S^{-1} = (S^{-1} H P)^T
    return llt.solve(obs_matrix * prior_cov).transpose();
}

LocalEstimate covariance_update(const LocalEstimate& prior, const Mat& obs_matrix, const Mat& meas_cov,
                                const Vec& y) {
    const Mat gain = kalman_gain(prior.cov, obs_matrix, meas_cov);
    const auto n = static_cast<int>(prior.state.size());
    LocalEstimate out = prior;
    out.state = prior.state + gain * (y - obs_matrix * prior.state);
    out.cov = symmetrized((identity(n) - gain * obs_matrix) * prior.cov);
    out.info.resize(0, 0);
    return out;
}

DistributedFilter::DistributedFilter(SystemModel system, std::vector<SensorModel> sensors,
                                     const Topology& topology, EngineConfig config)
    : system_(std::move(system)),
      sensors_(std::move(sensors)),
      plan_(std::make_shared<const ConsensusPlan>(topology)),
      config_(config) {
    if (config_.max_delay < 0) throw ValidationError("max_delay must be >= 0");
    if (config_.reprocess_depth < 0 || config_.reprocess_depth > config_.max_delay) {
        throw ValidationError("reprocess_depth must lie in 0..max_delay");
    }
    const int n = topology.node_count();
    require_dims(static_cast<int>(sensors_.size()) == n, "sensor count vs topology nodes");
    rounds_ = n > 1 ? diameter(topology) : 1;

    const int nx = system_.state_dim;
    Slice initial;
    initial.s = 0;
    const Mat p0_info = factor(system_.init_cov, "initial covariance").solve(identity(nx));
    for (const auto& sensor : sensors_) {
        initial.locals.push_back({sensor.sensor_id, 0, 0, system_.init_mean, system_.init_cov, p0_info});
    }
    if (config_.track_joint_cov) {
        initial.joint.resize(static_cast<Eigen::Index>(nx) * n, static_cast<Eigen::Index>(nx) * n);
        for (int i = 0; i < n; ++i) {
            for (int l = 0; l < n; ++l) initial.joint.block(i * nx, l * nx, nx, nx) = system_.init_cov;
        }
    }
    window_.push_back(std::move(initial));
}

const DistributedFilter::Slice& DistributedFilter::slice(Step s) const {
    const Step first = window_.front().s;
    if (s < first || s > window_.back().s) throw ValidationError("instant outside the re-filtered window");
    return window_[static_cast<std::size_t>(s - first)];
}

const std::vector<LocalEstimate>& DistributedFilter::estimates_at(Step s) const { return slice(s).locals; }

const DynMat& DistributedFilter::joint_cov() const {
    if (!config_.track_joint_cov) throw ValidationError("joint covariance tracking is disabled");
    return window_.back().joint;
}

void DistributedFilter::step(std::vector<InfoPair> own, const GatingProvider& gating) {
    const int n = plan_->node_count;
    require_dims(static_cast<int>(own.size()) == n, "own pairs vs sensor count");
    const Step k = now_ + 1;
    const int depth = config_.reprocess_depth;

    own_history_.push_back(std::move(own));
    if (static_cast<int>(own_history_.size()) > depth + 1) own_history_.erase(own_history_.begin());
    const Step history_first = k - static_cast<Step>(own_history_.size()) + 1;

    const Step anchor = std::max<Step>(0, k - depth - 1);
    // The anchor is x_{k-1}(anchor), produced by the previous pass.
    while (window_.front().s < anchor) window_.erase(window_.begin());
    window_.resize(1);
    for (auto& est : window_.front().locals) est.k = k;

    window_first_ = anchor + 1;
    rounds_last_step_ = 0;
    window_min_info_eig_ = std::numeric_limits<double>::infinity();

    for (Step s = anchor + 1; s <= k; ++s) {
        const Slice& prev = window_.back();
        const Mat phi = system_.transition.at(s - 1);
        const Mat q = system_.process_cov.at(s - 1);
        const auto& own_s = own_history_[static_cast<std::size_t>(s - history_first)];

        const DynMat gated = gating(s);
        const auto aggregates = run_rounds(plan_, own_s, gated, rounds_);
        rounds_last_step_ += rounds_;

        Slice next;
        next.s = s;
        next.locals.reserve(static_cast<std::size_t>(n));
        std::vector<Mat> blend;
        std::vector<Mat> posterior_covs;
        for (int i = 0; i < n; ++i) {
            const LocalEstimate prior = predict(prev.locals[static_cast<std::size_t>(i)], phi, q);
            const auto& agg = aggregates[static_cast<std::size_t>(i)];
            LocalEstimate post = update(prior, agg.theta, agg.omega);
            window_min_info_eig_ = std::min(window_min_info_eig_, min_eigenvalue(post.info));
            if (config_.track_joint_cov) {
                // A_i = P_i [P_prior]^{-1}
                blend.push_back(post.cov * *spd_inverse(prior.cov, std::numeric_limits<double>::infinity()));
                posterior_covs.push_back(post.cov);
            }
            next.locals.push_back(std::move(post));
        }
        if (config_.track_joint_cov) {
            std::vector<Mat> sensor_info;
            sensor_info.reserve(static_cast<std::size_t>(n));
            for (const auto& p : own_s) sensor_info.push_back(p.info_mat);
            const DynMat coeffs = consensus_coefficients(*plan_, gated, rounds_);
            next.joint = joint_cov_step(prev.joint, phi, q, blend, posterior_covs, coeffs, sensor_info);
        }
        window_.push_back(std::move(next));
    }
    now_ = k;
}

}  // namespace ftdkf
