#include "ftdkf/model.hpp"

#include <cmath>
#include <sstream>

#include "ftdkf/error.hpp"

namespace ftdkf {

namespace {

constexpr double kObservableFloor = 1e-9;
constexpr double kSingularFloor = 1e-12;

Mat information_of(const std::vector<SensorModel>& sensors, Step l, int n) {
    Mat info = Mat::Zero(n, n);
    for (const auto& sensor : sensors) {
        const Mat h = sensor.obs_matrix.at(l);
        const Mat r = sensor.meas_cov.at(l);
        require_dims(h.cols() == n, "observation matrix columns vs state_dim");
        info += h.transpose() * r.llt().solve(h);
    }
    return info;
}

void check_invertible(const Mat& phi, Step l) {
    Eigen::JacobiSVD<Mat> svd(phi);
    if (svd.singularValues().minCoeff() <= kSingularFloor) {
        std::ostringstream msg;
        msg << "transition matrix singular at step " << l;
        throw ValidationError(msg.str());
    }
}

}  // namespace

SystemModel SystemModel::constant(const Mat& transition, const Mat& process_cov, const Vec& init_mean,
                                  const Mat& init_cov) {
    SystemModel m;
    m.state_dim = static_cast<int>(transition.rows());
    m.transition = transition;
    m.process_cov = process_cov;
    m.init_mean = init_mean;
    m.init_cov = init_cov;
    return m;
}

SensorModel SensorModel::constant(int sensor_id, const Mat& obs_matrix, const Mat& meas_cov) {
    SensorModel s;
    s.sensor_id = sensor_id;
    s.obs_matrix = obs_matrix;
    s.meas_cov = meas_cov;
    return s;
}

void ValidationReport::throw_if_invalid() const {
    if (ok()) return;
    std::ostringstream msg;
    msg << "model assumptions violated:";
    for (const auto& v : violations) msg << "\n  - " << v;
    throw ValidationError(msg.str());
}

Mat constant_acceleration_transition(double period) {
    Mat phi(3, 3);
    phi << 1.0, period, period * period / 2.0,
           0.0, 1.0, period,
           0.0, 0.0, 1.0;
    return phi;
}

Vec step_truth(const Mat& transition, const Mat& process_sqrt, const Vec& state, CounterRng& rng) {
    require_dims(transition.cols() == state.size(), "state vs transition");
    return transition * state + gaussian(rng, process_sqrt);
}

Vec step_truth(const SystemModel& model, const Vec& state, Step k, CounterRng& rng) {
    require_dims(state.size() == model.state_dim, "state vs state_dim");
    return step_truth(model.transition.at(k), psd_sqrt(model.process_cov.at(k)), state, rng);
}

Vec measure(const Mat& obs_matrix, const Mat& meas_sqrt, const Vec& state, CounterRng& rng) {
    require_dims(obs_matrix.cols() == state.size(), "observation matrix columns vs state");
    return obs_matrix * state + gaussian(rng, meas_sqrt);
}

Vec measure(const SensorModel& sensor, const Vec& state, Step k, CounterRng& rng) {
    return measure(sensor.obs_matrix.at(k), psd_sqrt(sensor.meas_cov.at(k)), state, rng);
}

GramianReport observability_gramian(const SystemModel& system, const std::vector<SensorModel>& sensors,
                                    Step k, int horizon) {
    if (horizon < 0) throw ValidationError("observability horizon must be >= 0");
    const int n = system.state_dim;
    const int extended = horizon + std::max<int>(1, static_cast<int>(sensors.size())) - 1;

    GramianReport report;
    report.horizon = horizon;
    Mat gramian = Mat::Zero(n, n);
    Mat products = identity(n);  // O_{l,k}
    for (int offset = 0; offset <= extended; ++offset) {
        const Step l = k + offset;
        gramian += products.transpose() * information_of(sensors, l, n) * products;
        if (offset == horizon) {
            report.gramian = symmetrized(gramian);
            Eigen::SelfAdjointEigenSolver<Mat> es(report.gramian, Eigen::EigenvaluesOnly);
            report.alpha = es.eigenvalues().minCoeff();
            report.beta = es.eigenvalues().maxCoeff();
        }
        if (offset < extended) {
            const Mat phi = system.transition.at(l);
            check_invertible(phi, l);
            products = phi * products;
        }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(gramian), Eigen::EigenvaluesOnly);
    report.alpha_bar = es.eigenvalues().minCoeff();
    report.beta_bar = es.eigenvalues().maxCoeff();
    return report;
}

std::optional<GramianReport> find_observability_horizon(const SystemModel& system,
                                                        const std::vector<SensorModel>& sensors, Step k,
                                                        int max_horizon) {
    for (int horizon = 0; horizon <= max_horizon; ++horizon) {
        auto report = observability_gramian(system, sensors, k, horizon);
        if (report.alpha > kObservableFloor) return report;
    }
    return std::nullopt;
}

double transition_eta(const Mat& transition) {
    Eigen::JacobiSVD<Mat> svd(transition);
    const double largest = svd.singularValues().maxCoeff();
    if (svd.singularValues().minCoeff() <= kSingularFloor) return 0.0;
    // Singular values of Phi^{-1} are reciprocals of those of Phi.
    return 1.0 / largest;
}

ValidationReport validate_model(const SystemModel& system, const std::vector<SensorModel>& sensors, Step k) {
    ValidationReport report;
    const int n = system.state_dim;
    auto& v = report.violations;

    if (n <= 0 || n > kMaxDim) {
        v.push_back("state_dim must be in 1.." + std::to_string(kMaxDim));
        return report;
    }
    const Mat phi = system.transition.at(k);
    const Mat q = system.process_cov.at(k);
    if (phi.rows() != n || phi.cols() != n) v.push_back("transition is not state_dim x state_dim");
    if (q.rows() != n || q.cols() != n) v.push_back("process_cov is not state_dim x state_dim");
    if (system.init_mean.size() != n) v.push_back("init_mean has wrong length");
    if (system.init_cov.rows() != n || system.init_cov.cols() != n) v.push_back("init_cov is not state_dim x state_dim");
    if (!v.empty()) return report;

    report.eta = transition_eta(phi);
    if (report.eta <= 0.0) v.push_back("transition not invertible");
    if (!is_psd(q)) v.push_back("process_cov not PSD");
    if (!is_psd(system.init_cov)) v.push_back("init_cov not PSD");
    if (sensors.empty()) v.push_back("no sensors");

    bool sensors_ok = true;
    for (const auto& s : sensors) {
        const Mat h = s.obs_matrix.at(k);
        const Mat r = s.meas_cov.at(k);
        const std::string tag = "sensor " + std::to_string(s.sensor_id);
        if (h.cols() != n || h.rows() < 1 || h.rows() > kMaxDim) {
            v.push_back(tag + ": obs_matrix has wrong shape");
            sensors_ok = false;
            continue;
        }
        if (r.rows() != h.rows() || r.cols() != h.rows()) {
            v.push_back(tag + ": meas_cov shape does not match obs_matrix rows");
            sensors_ok = false;
            continue;
        }
        if (!is_pd(r)) {
            v.push_back(tag + ": meas_cov not positive definite");
            sensors_ok = false;
        }
    }

    if (sensors_ok && !sensors.empty() && report.eta > 0.0) {
        report.observability = find_observability_horizon(system, sensors, k);
        if (!report.observability) v.push_back("system not uniformly observable within 64 steps");
    }
    return report;
}

}  // namespace ftdkf
