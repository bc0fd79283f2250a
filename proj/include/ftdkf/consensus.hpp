#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ftdkf/graph.hpp"
#include "ftdkf/model.hpp"
#include "ftdkf/types.hpp"

namespace ftdkf {

// Information vector / matrix pair (psi, phi) exchanged during consensus.
struct InfoPair {
    Vec info_vec;
    Mat info_mat;

    static InfoPair zero(int state_dim);

    InfoPair& add_scaled(const InfoPair& other, double weight);
};

// psi = H^T R^{-1} y, phi = H^T R^{-1} H.
InfoPair init_message(const Mat& obs_matrix, const Mat& meas_cov, const Vec& y);
InfoPair init_message(const SensorModel& sensor, Step s, const Vec& y);

struct Aggregate {
    Vec theta;
    Mat omega;
};

struct WeightedMessage {
    InfoPair message;
    double weight = 0.0;
};

// Theta = psi_own + sum_j w_j psi_j, Omega likewise.
Aggregate aggregate(const InfoPair& own, std::span<const WeightedMessage> incoming);

// Link bookkeeping for the message recursion, built once per topology.
struct ConsensusPlan {
    explicit ConsensusPlan(const Topology& topology);

    int node_count = 0;
    std::vector<Link> links;
    // For node i: indices of links l -> i.
    std::vector<std::vector<int>> inbound;
    // For link i -> j: indices of links l -> i with l != j (echo excluded).
    std::vector<std::vector<int>> relay;
};

// Synchronous message state at round t. Messages are indexed like
// ConsensusPlan::links; round 0 messages are the senders' own pairs.
// `gated(i, j)` is the delay-gated weight node i applies to j's message.
class RoundState {
public:
    RoundState(std::shared_ptr<const ConsensusPlan> plan, std::vector<InfoPair> own, DynMat gated);

    int round() const { return round_; }
    const InfoPair& own(NodeId i) const { return own_[static_cast<std::size_t>(i)]; }
    const InfoPair& message(NodeId from, NodeId to) const;
    const ConsensusPlan& plan() const { return *plan_; }
    double gated(NodeId receiver, NodeId sender) const { return gated_(receiver, sender); }

    // Moves every message from round t to round t + 1.
    void advance();

private:
    friend InfoPair outgoing_message(const RoundState&, NodeId, NodeId);
    friend Aggregate aggregate(const RoundState&, NodeId);

    std::shared_ptr<const ConsensusPlan> plan_;
    std::vector<InfoPair> own_;
    DynMat gated_;
    std::vector<InfoPair> messages_;
    std::vector<InfoPair> scratch_;
    int round_ = 0;
};

// Message i -> j for round t + 1 given the state at round t:
// own_i + sum_{l in N_i \ {j}} w_il m_{l->i}(t). Throws ValidationError for a non-link.
InfoPair outgoing_message(const RoundState& state, NodeId i, NodeId j);

// Theta_i(t + 1), Omega_i(t + 1) from the state at round t.
Aggregate aggregate(const RoundState& state, NodeId i);

// Runs `rounds` synchronous rounds and returns every node's (Theta_i, Omega_i).
std::vector<Aggregate> run_rounds(std::shared_ptr<const ConsensusPlan> plan, std::vector<InfoPair> own,
                                  const DynMat& gated, int rounds);
std::vector<Aggregate> run_rounds(const Topology& topology, std::vector<InfoPair> own, const DynMat& gated,
                                  int rounds);

// The recursion is linear: Theta_i = sum_j C(i, j) psi_j. Returns C by running
// the same rounds on indicator inputs.
DynMat consensus_coefficients(const ConsensusPlan& plan, const DynMat& gated, int rounds);

}  // namespace ftdkf
