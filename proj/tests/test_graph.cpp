#include <doctest.h>

#include <deque>

#include "ftdkf/error.hpp"
#include "ftdkf/graph.hpp"
#include "support.hpp"

using namespace ftdkf;
using ftdkf::test::Gen;

namespace {

// Plain BFS over an adjacency list built from the edge list.
int bfs_diameter(int n, const std::vector<std::pair<NodeId, NodeId>>& edges, bool directed) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (auto [a, b] : edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        if (!directed) adj[static_cast<std::size_t>(b)].push_back(a);
    }
    int best = 0;
    for (int src = 0; src < n; ++src) {
        std::vector<int> dist(static_cast<std::size_t>(n), -1);
        std::deque<int> q{src};
        dist[static_cast<std::size_t>(src)] = 0;
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    q.push_back(v);
                }
            }
        }
        for (int d : dist) {
            if (d < 0) return -1;
            best = std::max(best, d);
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("reference tree") {
    const Topology t(12, false, test::reference_edges());
    const auto cls = classify(t);
    CHECK(cls.kind == TopologyKind::UndirectedTree);
    CHECK(cls.diameter == 6);
    CHECK(t.links().size() == 22);
    CHECK(t.in_neighbors(0).size() == 3);
}

TEST_CASE("reference digraph is strongly connected") {
    const auto& sc = test::reference_case2();
    const auto cls = classify(sc.topology);
    CHECK(cls.kind == TopologyKind::StronglyConnectedDigraph);
    CHECK(cls.diameter == 5);
    CHECK(cls.diameter == bfs_diameter(12, sc.topology.edges(), true));
}

TEST_CASE("single node and path graphs") {
    CHECK(diameter(Topology(1, false, {})) == 0);
    CHECK(diameter(Topology(4, false, {{0, 1}, {1, 2}, {2, 3}})) == 3);
    CHECK(classify(Topology(4, false, {{0, 1}, {1, 2}, {2, 3}, {3, 0}})).kind == TopologyKind::ConnectedUndirected);
}

TEST_CASE("disconnected graphs are invalid") {
    const Topology t(4, false, {{0, 1}, {2, 3}});
    CHECK(classify(t).kind == TopologyKind::Invalid);
    CHECK_THROWS_AS(diameter(t), ValidationError);
    const Topology d(3, true, {{0, 1}, {1, 2}});
    CHECK(classify(d).kind == TopologyKind::Invalid);
}

TEST_CASE("bad edges are rejected") {
    CHECK_THROWS_AS(Topology(3, false, {{0, 0}}), ValidationError);
    CHECK_THROWS_AS(Topology(3, false, {{0, 5}}), ValidationError);
}

TEST_CASE("uniform weights are 1/|N_i| on links") {
    const Topology t(12, false, test::reference_edges());
    const DynMat w = default_weights(t);
    for (NodeId i = 0; i < 12; ++i) {
        CHECK(w.row(i).sum() == doctest::Approx(1.0));
        CHECK(w(i, i) == 0.0);
        for (NodeId j : t.in_neighbors(i)) CHECK(w(i, j) == doctest::Approx(1.0 / static_cast<double>(t.in_neighbors(i).size())));
    }
    CHECK(w(0, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(w(1, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(w(10, 4) == doctest::Approx(1.0));
}

TEST_CASE("with_weights rejects weights off the links") {
    const Topology t(3, false, {{0, 1}, {1, 2}});
    DynMat w = DynMat::Zero(3, 3);
    w(0, 2) = 0.5;
    CHECK_THROWS_AS(t.with_weights(w), ValidationError);
}

TEST_CASE("weight powers on the reference tree") {
    const Topology t(12, false, test::reference_edges());
    const DynMat m = with_self_weights(default_weights(t));
    CHECK_FALSE(weight_power_positive(m, 5));
    CHECK(weight_power_positive(m, 6));
}

TEST_CASE("property: diameter matches BFS and is invariant under relabeling") {
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        Gen g(21, trial);
        const int n = g.integer(1, 12);
        const Topology t = g.tree(n);
        const auto cls = classify(t);
        CHECK(cls.kind == TopologyKind::UndirectedTree);
        CHECK(cls.diameter == bfs_diameter(n, t.edges(), false));
        const Topology r = t.relabeled(g.permutation(n));
        CHECK(diameter(r) == cls.diameter);
        CHECK(r.links().size() == t.links().size());
    }
}

TEST_CASE("property: hop distances are symmetric on undirected graphs") {
    for (std::uint64_t trial = 0; trial < 30; ++trial) {
        Gen g(22, trial);
        const int n = g.integer(2, 12);
        const Topology t = g.tree(n);
        const auto d = hop_distances(t);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) CHECK(d[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] == d[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]);
    }
}

}
