#pragma once

#include <cstdint>
#include <vector>

#include "ftdkf/consensus.hpp"
#include "ftdkf/graph.hpp"
#include "ftdkf/types.hpp"

namespace ftdkf {

// Distribution of the per-packet delay over {0..max_delay}.
class DelayProfile {
public:
    DelayProfile() : DelayProfile(0, {1.0}) {}
    // probabilities[d] = P(delay = d); must sum to 1 (within 1e-9).
    DelayProfile(int max_delay, std::vector<double> probabilities);

    static DelayProfile uniform(int max_delay);
    static DelayProfile point_mass(int max_delay, int value);

    int max_delay() const { return max_delay_; }
    const std::vector<double>& probabilities() const { return probabilities_; }

private:
    int max_delay_ = 0;
    std::vector<double> probabilities_;
};

// Delay of the packet stamped `stamp` travelling along link from -> to.
// Deterministic in (seed, link, stamp).
int sample_delay(const DelayProfile& profile, std::uint64_t seed, const Link& link, Step stamp);

struct Packet {
    NodeId src = 0;
    NodeId dst = 0;
    Step stamp = 0;
    InfoPair payload;
    Step arrival = 0;
};

// Sensor i's store of time-stamped neighbour packets: one row per in-neighbour,
// `length` cells per row covering stamps {k-L+1..k} at instant k.
class DelayBuffer {
public:
    DelayBuffer(NodeId owner, std::vector<NodeId> neighbors, int length);

    NodeId owner() const { return owner_; }
    int length() const { return length_; }
    Step now() const { return now_; }

    // Opens the cells for stamps up to k, discarding those older than k-L+1.
    void shift_to(Step k);
    // Stores an arrived packet. Throws if its cell has been discarded or the
    // packet is not addressed to this buffer.
    void deliver(const Packet& packet);

    // 1 iff the (src, stamp) packet arrived at or before `at`; self is always 1.
    // Throws for stamps outside the window or in the future.
    bool gamma(NodeId src, Step stamp, Step at) const;
    bool gamma(NodeId src, Step stamp) const { return gamma(src, stamp, now_); }
    // Stored payload or nullptr when the packet has not arrived.
    const InfoPair* payload(NodeId src, Step stamp) const;

    // Number of filled cells.
    int occupancy() const;
    int capacity() const { return static_cast<int>(neighbors_.size()) * length_; }

private:
    struct Cell {
        Step stamp = -1;
        bool filled = false;
        Step arrival = 0;
        InfoPair payload;
    };

    int row_of(NodeId src) const;
    const Cell& cell(int row, Step stamp) const;
    Cell& cell(int row, Step stamp);
    void check_window(Step stamp, Step at) const;

    NodeId owner_;
    std::vector<NodeId> neighbors_;
    int length_;
    Step now_ = -1;
    std::vector<Cell> cells_;  // row-major: row * length + stamp mod length
};

struct Arrival {
    NodeId src = 0;
    NodeId dst = 0;
    Step stamp = 0;
};

// Delayed packet delivery over a topology. One packet per (link, stamp).
class Network {
public:
    // buffer_length <= 0 selects max_delay + 2.
    Network(const Topology& topology, DelayProfile profile, std::uint64_t seed, int buffer_length = 0);

    const Topology& topology() const { return topology_; }
    const DelayProfile& profile() const { return profile_; }
    int buffer_length() const { return buffer_length_; }
    Step now() const { return now_; }

    // Moves to instant k: shifts every buffer, sends each node's stamp-k payload
    // to its out-neighbours with sampled delays and delivers everything due at k.
    // `payloads` may be empty, in which case zero pairs are carried.
    std::vector<Arrival> advance(Step k, const std::vector<InfoPair>& payloads = {});

    const DelayBuffer& buffer(NodeId i) const { return buffers_[static_cast<std::size_t>(i)]; }
    int delay(const Link& link, Step stamp) const;

    bool gamma(NodeId i, NodeId j, Step s) const;
    // gamma_k^{ij}(s) * w_ij for a link j -> i, 1 for i = j. Throws for other pairs.
    double gated_weight(NodeId i, NodeId j, Step s) const;
    // Full matrix G(i, j) = gated_weight(i, j, s) for links, 0 elsewhere (diagonal
    // 0: the self term is added by the consensus itself).
    DynMat gated_weights(Step s) const;

private:
    Topology topology_;
    DelayProfile profile_;
    std::uint64_t seed_;
    int buffer_length_;
    Step now_ = 0;
    std::vector<DelayBuffer> buffers_;
    std::vector<std::vector<Packet>> in_flight_;  // bins by arrival mod (max_delay + 1)
};

// D_t(k): {0..k} for k <= d_t + 1, {k-d_t..k} afterwards. Returned as [first, last].
struct StepRange {
    Step first = 0;
    Step last = 0;
    bool contains(Step s) const { return s >= first && s <= last; }
    Step size() const { return last - first + 1; }
};
StepRange transmission_window(Step k, int max_delay);

}  // namespace ftdkf
