#include "ftdkf/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "ftdkf/error.hpp"

namespace ftdkf {

Topology::Topology(int node_count, bool directed, std::vector<std::pair<NodeId, NodeId>> edges)
    : node_count_(node_count), directed_(directed) {
    if (node_count < 1) throw ValidationError("topology needs at least one node");
    for (auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
            std::ostringstream msg;
            msg << "edge (" << a + 1 << "," << b + 1 << ") references a node outside 1.." << node_count;
            throw ValidationError(msg.str());
        }
        if (a == b) throw ValidationError("self loops are not allowed as edges");
        if (!directed && a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw ValidationError("duplicate edge in topology");
    }
    edges_ = std::move(edges);

    for (const auto& [a, b] : edges_) {
        links_.push_back({a, b});
        if (!directed_) links_.push_back({b, a});
    }
    std::sort(links_.begin(), links_.end());

    in_.assign(static_cast<std::size_t>(node_count_), {});
    out_.assign(static_cast<std::size_t>(node_count_), {});
    weights_ = DynMat::Zero(node_count_, node_count_);
    for (const auto& l : links_) {
        out_[static_cast<std::size_t>(l.from)].push_back(l.to);
        in_[static_cast<std::size_t>(l.to)].push_back(l.from);
        weights_(l.to, l.from) = 1.0;
    }
    for (auto& v : in_) std::sort(v.begin(), v.end());
    for (auto& v : out_) std::sort(v.begin(), v.end());
}

bool Topology::has_link(NodeId from, NodeId to) const { return link_index(from, to) >= 0; }

int Topology::link_index(NodeId from, NodeId to) const {
    const Link key{from, to};
    auto it = std::lower_bound(links_.begin(), links_.end(), key);
    if (it == links_.end() || *it != key) return -1;
    return static_cast<int>(it - links_.begin());
}

Topology Topology::with_weights(const DynMat& weights) const {
    if (weights.rows() != node_count_ || weights.cols() != node_count_) {
        throw ValidationError("weight matrix must be node_count x node_count");
    }
    for (int i = 0; i < node_count_; ++i) {
        for (int j = 0; j < node_count_; ++j) {
            const double w = weights(i, j);
            const bool link = i != j && has_link(j, i);
            if (w < 0.0) throw ValidationError("weights must be nonnegative");
            if (link && !(w > 0.0)) {
                std::ostringstream msg;
                msg << "weight w(" << i + 1 << "," << j + 1 << ") must be positive on an existing link";
                throw ValidationError(msg.str());
            }
            if (!link && w != 0.0) {
                std::ostringstream msg;
                msg << "weight w(" << i + 1 << "," << j + 1 << ") is nonzero but there is no link "
                    << j + 1 << " -> " << i + 1;
                throw ValidationError(msg.str());
            }
        }
    }
    Topology t = *this;
    t.weights_ = weights;
    return t;
}

Topology Topology::relabeled(const std::vector<NodeId>& perm) const {
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(edges_.size());
    for (const auto& [a, b] : edges_) {
        edges.emplace_back(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
    }
    Topology t(node_count_, directed_, std::move(edges));
    DynMat w = DynMat::Zero(node_count_, node_count_);
    for (int i = 0; i < node_count_; ++i) {
        for (int j = 0; j < node_count_; ++j) {
            w(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = weights_(i, j);
        }
    }
    return t.with_weights(w);
}

std::string to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::UndirectedTree: return "undirected-tree";
        case TopologyKind::ConnectedUndirected: return "connected-undirected";
        case TopologyKind::StronglyConnectedDigraph: return "strongly-connected-digraph";
        case TopologyKind::Invalid: return "invalid";
    }
    return "invalid";
}

std::vector<std::vector<int>> hop_distances(const Topology& topology) {
    const int n = topology.node_count();
    std::vector<std::vector<int>> dist(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
    for (NodeId src = 0; src < n; ++src) {
        auto& row = dist[static_cast<std::size_t>(src)];
        row[static_cast<std::size_t>(src)] = 0;
        std::deque<NodeId> queue{src};
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            for (NodeId v : topology.out_neighbors(u)) {
                if (row[static_cast<std::size_t>(v)] < 0) {
                    row[static_cast<std::size_t>(v)] = row[static_cast<std::size_t>(u)] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    return dist;
}

namespace {

// Max hop distance; -1 when some pair is unreachable.
int eccentricity_max(const std::vector<std::vector<int>>& dist) {
    int d = 0;
    for (const auto& row : dist) {
        for (int x : row) {
            if (x < 0) return -1;
            d = std::max(d, x);
        }
    }
    return d;
}

}  // namespace

TopologyClass classify(const Topology& topology) {
    const int d = eccentricity_max(hop_distances(topology));
    if (d < 0) return {TopologyKind::Invalid, -1};
    if (topology.directed()) return {TopologyKind::StronglyConnectedDigraph, d};
    const auto edges = static_cast<int>(topology.edges().size());
    if (edges == topology.node_count() - 1) return {TopologyKind::UndirectedTree, d};
    return {TopologyKind::ConnectedUndirected, d};
}

int diameter(const Topology& topology) {
    const int d = eccentricity_max(hop_distances(topology));
    if (d < 0) throw ValidationError("topology is not connected; diameter undefined");
    return d;
}

DynMat default_weights(const Topology& topology) {
    const int n = topology.node_count();
    DynMat w = DynMat::Zero(n, n);
    for (NodeId i = 0; i < n; ++i) {
        const auto& nbrs = topology.in_neighbors(i);
        if (nbrs.empty()) {
            if (n > 1) throw ValidationError("node " + std::to_string(i + 1) + " has no neighbors");
            continue;
        }
        for (NodeId j : nbrs) w(i, j) = 1.0 / static_cast<double>(nbrs.size());
    }
    return w;
}

DynMat with_self_weights(const DynMat& weights) {
    return weights + DynMat::Identity(weights.rows(), weights.cols());
}

bool weight_power_positive(const DynMat& weights, int s) {
    if (s < 1) throw ValidationError("weight_power_positive needs s >= 1");
    DynMat power = weights;
    for (int i = 1; i < s; ++i) power = power * weights;
    return (power.array() > 0.0).all();
}

}  // namespace ftdkf
