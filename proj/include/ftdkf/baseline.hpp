#pragma once

#include <string>
#include <vector>

#include "ftdkf/consensus.hpp"
#include "ftdkf/filter.hpp"
#include "ftdkf/graph.hpp"
#include "ftdkf/model.hpp"

namespace ftdkf {

enum class BaselineKind { Centralized, DropLate };

std::string to_string(BaselineKind kind);

// One step of the centralized information filter: predicts `previous` to the
// next instant and adds every sensor's (H^T R^{-1} y, H^T R^{-1} H). With no
// pairs this is a pure prediction.
LocalEstimate centralized_kf(const SystemModel& system, const std::vector<InfoPair>& pairs,
                             const LocalEstimate& previous);

class CentralizedFilter {
public:
    explicit CentralizedFilter(SystemModel system);

    void step(const std::vector<InfoPair>& pairs);
    const LocalEstimate& current() const { return current_; }

private:
    SystemModel system_;
    LocalEstimate current_;
};

// The distributed filter without the buffer: only packets with zero delay are
// used (gating evaluated at the packet's own instant) and nothing is re-filtered.
DistributedFilter make_drop_late(SystemModel system, std::vector<SensorModel> sensors, const Topology& topology,
                                 int max_delay, bool track_joint_cov = false);

}  // namespace ftdkf
