#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ftdkf/consensus.hpp"
#include "ftdkf/graph.hpp"
#include "ftdkf/model.hpp"
#include "ftdkf/random.hpp"
#include "ftdkf/scenario.hpp"
#include "ftdkf/types.hpp"

// Shared fixtures and hand-rolled generators for the test suites.
namespace ftdkf::test {

inline std::string scenario_path(const std::string& name) {
    return std::string(FTDKF_SCENARIO_DIR) + "/" + name + ".json";
}

inline const Scenario& reference_case1() {
    static const Scenario sc = load_scenario(scenario_path("paper_sec5_case1"));
    return sc;
}

inline const Scenario& reference_case2() {
    static const Scenario sc = load_scenario(scenario_path("paper_sec5_case2"));
    return sc;
}

// Reference tree, 1-based edges.
inline std::vector<std::pair<NodeId, NodeId>> reference_edges() {
    const std::vector<std::pair<int, int>> one_based{{1, 2}, {1, 3}, {1, 4}, {2, 5},  {2, 6},  {3, 7},
                                                     {3, 8}, {4, 9}, {4, 10}, {5, 11}, {9, 12}};
    std::vector<std::pair<NodeId, NodeId>> out;
    for (auto [a, b] : one_based) out.emplace_back(a - 1, b - 1);
    return out;
}

// Deterministic generator for property tests; the same (seed, case) always
// yields the same instance.
class Gen {
public:
    explicit Gen(std::uint64_t seed, std::uint64_t trial = 0) : rng_(seed, Stream::Run, 0xfeed, trial) {}

    CounterRng& rng() { return rng_; }

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>()(rng_); }

    Mat matrix(int rows, int cols) {
        Mat m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m(r, c) = normal();
        return m;
    }

    Vec vector(int n) {
        Vec v(n);
        for (int r = 0; r < n; ++r) v(r) = normal();
        return v;
    }

    // SPD with eigenvalues in [lo, hi].
    Mat spd(int n, double lo = 0.1, double hi = 2.0) {
        const Eigen::HouseholderQR<Mat> qr(matrix(n, n));
        const Mat q = qr.householderQ();
        Vec d(n);
        for (int r = 0; r < n; ++r) d(r) = uniform(lo, hi);
        return symmetrized(q * d.asDiagonal() * q.transpose());
    }

    // Invertible transition with singular values in [0.5, 1.5].
    Mat transition(int n) {
        const Eigen::HouseholderQR<Mat> qa(matrix(n, n));
        const Eigen::HouseholderQR<Mat> qb(matrix(n, n));
        Vec s(n);
        for (int r = 0; r < n; ++r) s(r) = uniform(0.5, 1.5);
        return Mat(qa.householderQ()) * s.asDiagonal() * Mat(qb.householderQ()).transpose();
    }

    // Random labelled tree: every node attaches to an earlier one under a
    // shuffled labelling.
    Topology tree(int n) {
        std::vector<NodeId> label(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) label[static_cast<std::size_t>(v)] = v;
        for (int v = n - 1; v > 0; --v) std::swap(label[static_cast<std::size_t>(v)], label[static_cast<std::size_t>(integer(0, v))]);
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (int v = 1; v < n; ++v) {
            edges.emplace_back(label[static_cast<std::size_t>(integer(0, v - 1))], label[static_cast<std::size_t>(v)]);
        }
        return {n, false, std::move(edges)};
    }

    InfoPair pair(int dim) {
        const Mat a = matrix(dim, dim);
        return {vector(dim), symmetrized(a * a.transpose())};
    }

    std::vector<NodeId> permutation(int n) {
        std::vector<NodeId> p(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) p[static_cast<std::size_t>(v)] = v;
        for (int v = n - 1; v > 0; --v) std::swap(p[static_cast<std::size_t>(v)], p[static_cast<std::size_t>(integer(0, v))]);
        return p;
    }

private:
    CounterRng rng_;
};

inline double rel_err(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(1.0, b.norm()); }
inline double rel_err(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace ftdkf::test
