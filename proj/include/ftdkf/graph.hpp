#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ftdkf/types.hpp"

namespace ftdkf {

// Directed link: information flows from `from` to `to`.
struct Link {
    NodeId from = 0;
    NodeId to = 0;
    friend bool operator==(const Link&, const Link&) = default;
    friend auto operator<=>(const Link&, const Link&) = default;
};

// Communication topology. Node ids are zero-based. For undirected graphs
// every edge is stored once as (min, max) and yields two links. The weight
// matrix follows the row-receiver convention: W(i, j) > 0 iff a link j -> i
// exists. Self loops are never stored; the unit self weight is applied by
// the consensus gating.
class Topology {
public:
    Topology() = default;
    // Weights default to 1 on every link.
    Topology(int node_count, bool directed, std::vector<std::pair<NodeId, NodeId>> edges);

    int node_count() const { return node_count_; }
    bool directed() const { return directed_; }
    // Canonical, sorted edge list as given (undirected edges normalised to (min, max)).
    const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }
    // Every directed link, sorted; undirected edges contribute both directions.
    const std::vector<Link>& links() const { return links_; }

    // N_i: nodes whose packets reach node i.
    const std::vector<NodeId>& in_neighbors(NodeId i) const { return in_[static_cast<std::size_t>(i)]; }
    const std::vector<NodeId>& out_neighbors(NodeId i) const { return out_[static_cast<std::size_t>(i)]; }
    bool has_link(NodeId from, NodeId to) const;
    // Position of the link in links(); -1 when absent.
    int link_index(NodeId from, NodeId to) const;

    const DynMat& weights() const { return weights_; }
    double weight(NodeId receiver, NodeId sender) const { return weights_(receiver, sender); }

    // Replaces the weight matrix; W must be nonnegative, zero on the diagonal
    // and positive exactly on links.
    Topology with_weights(const DynMat& weights) const;

    // Same nodes with ids permuted: node i becomes perm[i].
    Topology relabeled(const std::vector<NodeId>& perm) const;

private:
    int node_count_ = 0;
    bool directed_ = false;
    std::vector<std::pair<NodeId, NodeId>> edges_;
    std::vector<Link> links_;
    std::vector<std::vector<NodeId>> in_;
    std::vector<std::vector<NodeId>> out_;
    DynMat weights_;
};

enum class TopologyKind { UndirectedTree, ConnectedUndirected, StronglyConnectedDigraph, Invalid };

std::string to_string(TopologyKind kind);

struct TopologyClass {
    TopologyKind kind = TopologyKind::Invalid;
    int diameter = -1;  // d_g, or the directed diameter for digraphs; -1 when Invalid
};

TopologyClass classify(const Topology& topology);

// Longest shortest-path hop count; throws ValidationError when not (strongly) connected.
int diameter(const Topology& topology);

// Hop counts along links; -1 where unreachable. dist[u][v] is from u to v.
std::vector<std::vector<int>> hop_distances(const Topology& topology);

// w_ij = 1/|N_i| for j in N_i. Throws ValidationError for an isolated node when n > 1.
DynMat default_weights(const Topology& topology);

// W + I: the effective consensus matrix with the unit self weight.
DynMat with_self_weights(const DynMat& weights);

// True iff every entry of W^s is strictly positive.
bool weight_power_positive(const DynMat& weights, int s);

}  // namespace ftdkf
