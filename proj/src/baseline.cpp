#include "ftdkf/baseline.hpp"

#include "ftdkf/error.hpp"

namespace ftdkf {

std::string to_string(BaselineKind kind) { return kind == BaselineKind::Centralized ? "centralized" : "droplate"; }

LocalEstimate centralized_kf(const SystemModel& system, const std::vector<InfoPair>& pairs,
                             const LocalEstimate& previous) {
    const LocalEstimate prior = predict(previous, system);
    if (pairs.empty()) return prior;
    InfoPair total = InfoPair::zero(system.state_dim);
    for (const auto& p : pairs) {
        require_dims(p.info_vec.size() == system.state_dim, "information pair vs state_dim");
        total.add_scaled(p, 1.0);
    }
    return update(prior, total.info_vec, total.info_mat);
}

CentralizedFilter::CentralizedFilter(SystemModel system) : system_(std::move(system)) {
    current_.sensor_id = 0;
    current_.state = system_.init_mean;
    current_.cov = system_.init_cov;
    current_.info = system_.init_cov.llt().solve(identity(system_.state_dim));
}

void CentralizedFilter::step(const std::vector<InfoPair>& pairs) {
    const Step k = current_.k + 1;
    current_ = centralized_kf(system_, pairs, current_);
    current_.k = k;
}

DistributedFilter make_drop_late(SystemModel system, std::vector<SensorModel> sensors, const Topology& topology,
                                 int max_delay, bool track_joint_cov) {
    EngineConfig config;
    config.max_delay = max_delay;
    config.reprocess_depth = 0;
    config.track_joint_cov = track_joint_cov;
    return {std::move(system), std::move(sensors), topology, config};
}

}  // namespace ftdkf
