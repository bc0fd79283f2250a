#include "ftdkf/consensus.hpp"

#include <algorithm>

#include "ftdkf/error.hpp"

namespace ftdkf {

InfoPair InfoPair::zero(int state_dim) { return {Vec::Zero(state_dim), Mat::Zero(state_dim, state_dim)}; }

InfoPair& InfoPair::add_scaled(const InfoPair& other, double weight) {
    info_vec.noalias() += weight * other.info_vec;
    info_mat.noalias() += weight * other.info_mat;
    return *this;
}

InfoPair init_message(const Mat& obs_matrix, const Mat& meas_cov, const Vec& y) {
    require_dims(obs_matrix.rows() == y.size(), "measurement length vs observation rows");
    require_dims(meas_cov.rows() == y.size() && meas_cov.cols() == y.size(), "meas_cov vs measurement");
    Eigen::LLT<Mat> llt(meas_cov);
    if (llt.info() != Eigen::Success) throw NumericalError("measurement covariance is not positive definite");
    const Mat r_inv_h = llt.solve(obs_matrix);
    InfoPair p;
    p.info_vec = r_inv_h.transpose() * y;
    p.info_mat = symmetrized(obs_matrix.transpose() * r_inv_h);
    return p;
}

InfoPair init_message(const SensorModel& sensor, Step s, const Vec& y) {
    return init_message(sensor.obs_matrix.at(s), sensor.meas_cov.at(s), y);
}

Aggregate aggregate(const InfoPair& own, std::span<const WeightedMessage> incoming) {
    InfoPair sum = own;
    for (const auto& in : incoming) {
        if (in.weight < 0.0) throw ValidationError("consensus weights must be nonnegative");
        require_dims(in.message.info_vec.size() == own.info_vec.size(), "incoming message vs own pair");
        sum.add_scaled(in.message, in.weight);
    }
    return {sum.info_vec, sum.info_mat};
}

ConsensusPlan::ConsensusPlan(const Topology& topology)
    : node_count(topology.node_count()), links(topology.links()) {
    inbound.assign(static_cast<std::size_t>(node_count), {});
    for (std::size_t idx = 0; idx < links.size(); ++idx) {
        inbound[static_cast<std::size_t>(links[idx].to)].push_back(static_cast<int>(idx));
    }
    relay.resize(links.size());
    for (std::size_t idx = 0; idx < links.size(); ++idx) {
        const auto [i, j] = links[idx];
        for (int in_idx : inbound[static_cast<std::size_t>(i)]) {
            if (links[static_cast<std::size_t>(in_idx)].from != j) relay[idx].push_back(in_idx);
        }
    }
}

RoundState::RoundState(std::shared_ptr<const ConsensusPlan> plan, std::vector<InfoPair> own, DynMat gated)
    : plan_(std::move(plan)), own_(std::move(own)), gated_(std::move(gated)) {
    const int n = plan_->node_count;
    require_dims(static_cast<int>(own_.size()) == n, "own pairs vs node count");
    require_dims(gated_.rows() == n && gated_.cols() == n, "gated weights vs node count");
    if ((gated_.array() < 0.0).any()) throw ValidationError("consensus weights must be nonnegative");
    messages_.reserve(plan_->links.size());
    for (const auto& link : plan_->links) messages_.push_back(own_[static_cast<std::size_t>(link.from)]);
}

const InfoPair& RoundState::message(NodeId from, NodeId to) const {
    const Link key{from, to};
    const auto& links = plan_->links;
    auto it = std::lower_bound(links.begin(), links.end(), key);
    if (it == links.end() || *it != key) throw ValidationError("no link between the requested nodes");
    return messages_[static_cast<std::size_t>(it - links.begin())];
}

namespace {

InfoPair relay_sum(const ConsensusPlan& plan, const std::vector<InfoPair>& messages, const DynMat& gated,
                   const InfoPair& own, NodeId receiver, const std::vector<int>& in_links) {
    InfoPair out = own;
    for (int idx : in_links) {
        const auto& link = plan.links[static_cast<std::size_t>(idx)];
        const double w = gated(receiver, link.from);
        if (w != 0.0) out.add_scaled(messages[static_cast<std::size_t>(idx)], w);
    }
    return out;
}

}  // namespace

void RoundState::advance() {
    scratch_.resize(messages_.size());
    for (std::size_t idx = 0; idx < plan_->links.size(); ++idx) {
        const NodeId i = plan_->links[idx].from;
        scratch_[idx] = relay_sum(*plan_, messages_, gated_, own_[static_cast<std::size_t>(i)], i, plan_->relay[idx]);
    }
    messages_.swap(scratch_);
    ++round_;
}

InfoPair outgoing_message(const RoundState& state, NodeId i, NodeId j) {
    const auto& plan = *state.plan_;
    const Link key{i, j};
    auto it = std::lower_bound(plan.links.begin(), plan.links.end(), key);
    if (it == plan.links.end() || *it != key) throw ValidationError("outgoing_message: no link i -> j");
    const auto idx = static_cast<std::size_t>(it - plan.links.begin());
    return relay_sum(plan, state.messages_, state.gated_, state.own_[static_cast<std::size_t>(i)], i, plan.relay[idx]);
}

Aggregate aggregate(const RoundState& state, NodeId i) {
    const auto& plan = *state.plan_;
    InfoPair sum = relay_sum(plan, state.messages_, state.gated_, state.own_[static_cast<std::size_t>(i)], i,
                             plan.inbound[static_cast<std::size_t>(i)]);
    sum.info_mat = symmetrized(sum.info_mat);
    return {std::move(sum.info_vec), std::move(sum.info_mat)};
}

std::vector<Aggregate> run_rounds(std::shared_ptr<const ConsensusPlan> plan, std::vector<InfoPair> own,
                                  const DynMat& gated, int rounds) {
    if (rounds < 1) throw ValidationError("consensus needs at least one round");
    RoundState state(std::move(plan), std::move(own), gated);
    for (int t = 1; t < rounds; ++t) state.advance();
    std::vector<Aggregate> out;
    out.reserve(static_cast<std::size_t>(state.plan().node_count));
    for (NodeId i = 0; i < state.plan().node_count; ++i) out.push_back(aggregate(state, i));
    return out;
}

std::vector<Aggregate> run_rounds(const Topology& topology, std::vector<InfoPair> own, const DynMat& gated,
                                  int rounds) {
    return run_rounds(std::make_shared<const ConsensusPlan>(topology), std::move(own), gated, rounds);
}

DynMat consensus_coefficients(const ConsensusPlan& plan, const DynMat& gated, int rounds) {
    if (rounds < 1) throw ValidationError("consensus needs at least one round");
    const int n = plan.node_count;
    const auto link_count = plan.links.size();
    // Row `idx` holds the coefficients of message `idx` over every origin node.
    DynMat messages(static_cast<Eigen::Index>(link_count), n);
    for (std::size_t idx = 0; idx < link_count; ++idx) {
        messages.row(static_cast<Eigen::Index>(idx)) = DynVec::Unit(n, plan.links[idx].from).transpose();
    }
    auto relay = [&](NodeId receiver, const std::vector<int>& in_links, const DynMat& msgs) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Unit(n, receiver);
        for (int idx : in_links) {
            const double w = gated(receiver, plan.links[static_cast<std::size_t>(idx)].from);
            if (w != 0.0) row += w * msgs.row(idx);
        }
        return row;
    };
    for (int t = 1; t < rounds; ++t) {
        DynMat next(static_cast<Eigen::Index>(link_count), n);
        for (std::size_t idx = 0; idx < link_count; ++idx) {
            next.row(static_cast<Eigen::Index>(idx)) = relay(plan.links[idx].from, plan.relay[idx], messages);
        }
        messages = std::move(next);
    }
    DynMat coeff(n, n);
    for (NodeId i = 0; i < n; ++i) coeff.row(i) = relay(i, plan.inbound[static_cast<std::size_t>(i)], messages);
    return coeff;
}

}  // namespace ftdkf
