#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftdkf/consensus.hpp"
#include "ftdkf/graph.hpp"
#include "ftdkf/random.hpp"

// Brute-force reference computations, written independently of the library
// algorithms they check.
namespace ftdkf::oracle {

// Random labelled tree on n nodes (each node attaches to an earlier one, then
// the labels are shuffled).
Topology random_tree(int n, CounterRng& rng);

// Coefficient of node j's own pair in node i's aggregate on a tree: the product
// of receiver-side weights G(next, prev) along the unique path j -> i (1 for i = j).
DynMat tree_path_coefficients(const Topology& tree, const DynMat& gated);

// Theta_i, Omega_i = sum_j coefficient(i, j) * own_j.
std::vector<Aggregate> tree_sums(const Topology& tree, const std::vector<InfoPair>& own, const DynMat& gated);

// Minimum-trace unbiased weights from the KKT system [2 Xi, e; e^T, 0].
DynMat kkt_fusion_weights(const DynMat& xi, int state_dim);

struct Check {
    std::string name;
    bool passed = false;
    double worst = 0.0;  // worst observed error
    double tolerance = 0.0;
};

// Small-instance comparisons of the library against the brute-force references.
std::vector<Check> run_suite(std::uint64_t seed);

}  // namespace ftdkf::oracle
