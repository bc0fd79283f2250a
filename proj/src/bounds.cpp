#include "ftdkf/bounds.hpp"

#include <cmath>
#include <limits>

#include "ftdkf/error.hpp"
#include "ftdkf/network.hpp"

namespace ftdkf {

namespace {

Mat inverse_of(const Mat& transition) {
    Eigen::FullPivLU<Mat> lu(transition);
    if (!lu.isInvertible()) throw ValidationError("transition matrix is singular");
    return lu.inverse();
}

// Phi^{-1} Q Phi^{-T}
Mat pulled_back_noise(const Mat& transition, const Mat& process_cov) {
    require_dims(transition.rows() == transition.cols() && process_cov.rows() == transition.rows() &&
                     process_cov.cols() == transition.cols(),
                 "transition / process_cov shapes");
    const Mat inv = inverse_of(transition);
    return symmetrized(inv * process_cov * inv.transpose());
}

}  // namespace

std::string to_string(BoundRegime regime) {
    return regime == BoundRegime::Directed ? "directed" : "undirected";
}

BoundParams BoundParams::with_delay(int d) const {
    if (d < 0) throw ValidationError("delay must be >= 0");
    BoundParams p = *this;
    p.max_delay = d;
    p.varpi = std::pow(gamma_hat, d);
    return p;
}

void BoundParams::validate() const {
    if (!(gamma_hat > 0.0 && gamma_hat <= 1.0)) throw ValidationError("gamma_hat must lie in (0, 1]");
    if (!(eta > 0.0)) throw ValidationError("eta must be positive");
    if (!(omega_min > 0.0)) throw ValidationError("omega_min must be positive");
    if (!(varpi > 0.0)) throw ValidationError("varpi must be positive");
    if (z < 1) throw ValidationError("Z must be >= 1");
    if (max_delay < 0) throw ValidationError("d_t must be >= 0");
}

double lemma1_gamma(const Mat& transition, const Mat& process_cov, const Mat& omega_cap) {
    require_dims(omega_cap.rows() == transition.rows() && omega_cap.cols() == transition.cols(),
                 "omega_cap vs transition");
    if (!is_psd(omega_cap)) throw ValidationError("omega_cap must be PSD");
    const double noise = max_eigenvalue(pulled_back_noise(transition, process_cov));
    const double cap = max_eigenvalue(omega_cap);
    return 1.0 / (1.0 + std::max(0.0, noise) * std::max(0.0, cap));
}

double lemma1_gamma(const SystemModel& system, const Mat& omega_cap, Step k) {
    return lemma1_gamma(system.transition.at(k), system.process_cov.at(k), omega_cap);
}

double lemma1_gamma_upper(const Mat& transition, const Mat& process_cov, const Mat& omega_floor) {
    require_dims(omega_floor.rows() == transition.rows() && omega_floor.cols() == transition.cols(),
                 "omega_floor vs transition");
    if (!is_psd(omega_floor)) throw ValidationError("omega_floor must be PSD");
    const double noise = min_eigenvalue(pulled_back_noise(transition, process_cov));
    const double floor = min_eigenvalue(omega_floor);
    return 1.0 / (1.0 + std::max(0.0, noise) * std::max(0.0, floor));
}

Mat lemma1_residual(const Mat& transition, const Mat& process_cov, const Mat& omega, double gamma) {
    const Mat inv = inverse_of(transition);
    const auto n = static_cast<int>(transition.rows());
    const Mat m = symmetrized(inv.transpose() * omega * inv);
    // (Phi Omega^{-1} Phi^T + Q)^{-1} = M (I + Q M)^{-1}, valid for singular Omega.
    const Mat y = (identity(n) + process_cov * m).transpose().partialPivLu().solve(m).transpose();
    return symmetrized(y - gamma * m);
}

double omega_min(const DynMat& weights, int first_power, int last_power) {
    if (first_power < 1 || last_power < first_power) throw ValidationError("omega_min needs 1 <= first <= last");
    const DynMat base = with_self_weights(weights);
    DynMat power = base;
    for (int i = 1; i < first_power; ++i) power = power * base;
    double best = std::numeric_limits<double>::infinity();
    for (int sigma = first_power; sigma <= last_power; ++sigma) {
        for (Eigen::Index i = 0; i < power.size(); ++i) {
            const double v = power.data()[i];
            if (v > 0.0) best = std::min(best, v);
        }
        if (sigma < last_power) power = power * base;
    }
    if (!std::isfinite(best)) throw ValidationError("consensus matrix has no positive entry");
    return best;
}

namespace {

double log_gramian_constant(const BoundParams& params, BoundRegime regime) {
    const double a = regime == BoundRegime::Undirected ? params.alpha_bar : params.alpha;
    if (!(a > 0.0)) throw ValidationError("Gramian constant must be positive");
    return std::log(a);
}

}  // namespace

BoundResult cov_lower_bound(const BoundParams& params, BoundRegime regime, Step k, Step s) {
    params.validate();
    const int d = params.max_delay;
    if (!transmission_window(k, d).contains(s)) throw ValidationError("cov_lower_bound needs s in D_t(k)");
    if (k < static_cast<Step>(params.z + 1) * d) throw ValidationError("cov_lower_bound needs k >= (Z+1) d_t");
    const double lag = static_cast<double>(s - k + d);
    const double log_floor = std::log(params.omega_min) + params.z * std::log(params.varpi) +
                             log_gramian_constant(params, regime) + lag * std::log(params.gamma_hat) +
                             (2.0 * (static_cast<double>(params.z) * d - 1.0) + 2.0 * lag) * std::log(params.eta);
    return {std::exp(log_floor), log_floor, regime};
}

DelayBound max_delay_bound(const BoundParams& params, BoundRegime regime, double target_cov, Step k, Step s) {
    params.validate();
    if (!(target_cov > 0.0)) throw ValidationError("target covariance must be positive");
    if (s > k) throw ValidationError("max_delay_bound needs s <= k");
    const double log_base = std::log(params.gamma_hat) + 2.0 * (params.z + 1) * std::log(params.eta);
    if (std::abs(log_base) < 1e-15) {
        throw BoundUndefined("bound undefined - attenuation-free regime (gamma_hat * eta^(2(Z+1)) = 1)");
    }
    const double gap = static_cast<double>(k - s);
    const double log_c = std::log(params.omega_min) + params.z * std::log(params.varpi) +
                         log_gramian_constant(params, regime);
    const double log_arg =
        gap * std::log(params.gamma_hat) + 2.0 * (gap + 1.0) * std::log(params.eta) - std::log(target_cov) - log_c;
    DelayBound out;
    out.raw = log_arg / log_base;
    if (log_base < 0.0) out.max_delay = static_cast<std::int64_t>(std::floor(out.raw));
    return out;
}

ResolvedBounds resolve_bounds(const SystemModel& system, const std::vector<SensorModel>& sensors,
                              const Topology& topology, int max_delay) {
    if (max_delay < 0) throw ValidationError("max_delay must be >= 0");
    ResolvedBounds out;
    out.node_count = topology.node_count();
    out.regime = topology.directed() ? BoundRegime::Directed : BoundRegime::Undirected;
    const auto report = find_observability_horizon(system, sensors, 0);
    if (!report) throw ValidationError("system not uniformly observable within 64 steps");
    out.gramian = *report;
    out.observability_horizon = report->horizon;

    auto& p = out.params;
    p.eta = transition_eta(system.transition.at(0));
    p.z = out.node_count + report->horizon;
    p.alpha = report->alpha;
    p.alpha_bar = report->alpha_bar;
    const int nx = system.state_dim;
    p.gamma_hat = lemma1_gamma(system, report->beta_bar * identity(nx));
    p.max_delay = max_delay;
    p.varpi = std::pow(p.gamma_hat, max_delay);
    const int first = out.regime == BoundRegime::Directed ? out.node_count : 1;
    p.omega_min = omega_min(topology.weights(), first, p.z);
    p.validate();
    return out;
}

}  // namespace ftdkf
