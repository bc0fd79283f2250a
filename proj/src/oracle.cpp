#include "ftdkf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "ftdkf/error.hpp"
#include "ftdkf/fusion.hpp"

namespace ftdkf::oracle {

Topology random_tree(int n, CounterRng& rng) {
    if (n < 1) throw ValidationError("random_tree needs n >= 1");
    std::vector<NodeId> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 0);
    std::shuffle(labels.begin(), labels.end(), rng);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> parent(0, v - 1);
        edges.emplace_back(labels[static_cast<std::size_t>(parent(rng))], labels[static_cast<std::size_t>(v)]);
    }
    return {n, false, std::move(edges)};
}

DynMat tree_path_coefficients(const Topology& tree, const DynMat& gated) {
    const int n = tree.node_count();
    DynMat c = DynMat::Zero(n, n);
    // Walk outward from each receiver i; reaching node v through `prev` means
    // v's pair travels v -> prev -> ... -> i, picking up G(prev, v) on the way.
    for (NodeId i = 0; i < n; ++i) {
        std::function<void(NodeId, NodeId, double)> walk = [&](NodeId v, NodeId prev, double product) {
            c(i, v) = product;
            for (NodeId u : tree.in_neighbors(v)) {
                if (u != prev) walk(u, v, product * gated(v, u));
            }
        };
        walk(i, -1, 1.0);
    }
    return c;
}

std::vector<Aggregate> tree_sums(const Topology& tree, const std::vector<InfoPair>& own, const DynMat& gated) {
    const DynMat c = tree_path_coefficients(tree, gated);
    std::vector<Aggregate> out;
    for (NodeId i = 0; i < tree.node_count(); ++i) {
        Aggregate a{Vec::Zero(own.front().info_vec.size()), Mat::Zero(own.front().info_mat.rows(), own.front().info_mat.cols())};
        for (NodeId j = 0; j < tree.node_count(); ++j) {
            a.theta += c(i, j) * own[static_cast<std::size_t>(j)].info_vec;
            a.omega += c(i, j) * own[static_cast<std::size_t>(j)].info_mat;
        }
        out.push_back(a);
    }
    return out;
}

DynMat kkt_fusion_weights(const DynMat& xi, int state_dim) {
    const auto total = xi.rows();
    const auto count = total / state_dim;
    DynMat kkt = DynMat::Zero(total + state_dim, total + state_dim);
    kkt.topLeftCorner(total, total) = 2.0 * xi;
    for (Eigen::Index i = 0; i < count; ++i) {
        kkt.block(i * state_dim, total, state_dim, state_dim).setIdentity();
        kkt.block(total, i * state_dim, state_dim, state_dim).setIdentity();
    }
    DynMat rhs = DynMat::Zero(total + state_dim, state_dim);
    rhs.bottomRows(state_dim).setIdentity();
    return kkt.fullPivLu().solve(rhs).topRows(total);
}

namespace {

InfoPair random_pair(CounterRng& rng, int dim) {
    std::normal_distribution<double> normal;
    InfoPair p;
    p.info_vec.resize(dim);
    for (int r = 0; r < dim; ++r) p.info_vec(r) = normal(rng);
    Mat a(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) a(r, c) = normal(rng);
    }
    p.info_mat = a * a.transpose();
    return p;
}

double relative_error(const DynMat& got, const DynMat& want) {
    return (got - want).norm() / std::max(1.0, want.norm());
}

Check consensus_on_random_trees(std::uint64_t seed, bool weighted) {
    Check check{weighted ? "consensus: weighted trees match path products" : "consensus: unit trees match global sum",
                true, 0.0, 1e-9};
    CounterRng rng(seed, Stream::Run, weighted ? 2 : 1, 0);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 12;
        const Topology tree = random_tree(n, rng);
        DynMat gated = DynMat::Zero(n, n);
        for (const auto& l : tree.links()) gated(l.to, l.from) = weighted ? weight(rng) : 1.0;
        std::vector<InfoPair> own;
        for (int i = 0; i < n; ++i) own.push_back(random_pair(rng, 3));
        const auto got = run_rounds(tree, own, gated, std::max(1, diameter(tree)));
        const auto want = tree_sums(tree, own, gated);
        for (int i = 0; i < n; ++i) {
            const auto si = static_cast<std::size_t>(i);
            check.worst = std::max(check.worst, relative_error(got[si].theta, want[si].theta));
            check.worst = std::max(check.worst, relative_error(got[si].omega, want[si].omega));
        }
    }
    check.passed = check.worst <= check.tolerance;
    return check;
}

Check fusion_against_kkt(std::uint64_t seed) {
    Check check{"fusion: matrix weights match the KKT solution", true, 0.0, 1e-8};
    CounterRng rng(seed, Stream::Run, 3, 0);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        const int count = 1 + trial % 4;
        const int nx = 1 + trial % 3;
        const int total = count * nx;
        DynMat a(total, total + 2);
        for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
        const DynMat xi = a * a.transpose() + 0.1 * DynMat::Identity(total, total);
        const auto w = matrix_weights(xi, nx);
        check.worst = std::max(check.worst, relative_error(w.gamma, kkt_fusion_weights(xi, nx)));
    }
    check.passed = check.worst <= check.tolerance;
    return check;
}

}  // namespace

std::vector<Check> run_suite(std::uint64_t seed) {
    return {consensus_on_random_trees(seed, false), consensus_on_random_trees(seed, true), fusion_against_kkt(seed)};
}

}  // namespace ftdkf::oracle
