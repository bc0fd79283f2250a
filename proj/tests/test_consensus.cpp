#include <doctest.h>

#include <memory>

#include "ftdkf/consensus.hpp"
#include "ftdkf/error.hpp"
#include "ftdkf/oracle.hpp"
#include "support.hpp"

using namespace ftdkf;
using ftdkf::test::Gen;

namespace {

DynMat unit_gating(const Topology& t) {
    DynMat g = DynMat::Zero(t.node_count(), t.node_count());
    for (const auto& l : t.links()) g(l.to, l.from) = 1.0;
    return g;
}

std::vector<InfoPair> random_pairs(Gen& g, int n, int dim) {
    std::vector<InfoPair> own;
    for (int i = 0; i < n; ++i) own.push_back(g.pair(dim));
    return own;
}

InfoPair global_sum(const std::vector<InfoPair>& own) {
    InfoPair s = InfoPair::zero(static_cast<int>(own.front().info_vec.size()));
    for (const auto& p : own) s.add_scaled(p, 1.0);
    return s;
}

}  // namespace

TEST_SUITE("consensus") {

TEST_CASE("init message") {
    Mat h(1, 3);
    h << 1, 0, 0;
    Mat r(1, 1);
    r << 0.5;
    Vec y(1);
    y << 3.0;
    const auto p = init_message(h, r, y);
    CHECK(p.info_vec(0) == doctest::Approx(6.0));
    CHECK(p.info_mat(0, 0) == doctest::Approx(2.0));
    CHECK(p.info_mat.sum() == doctest::Approx(2.0));
}

TEST_CASE("aggregate of own pair and weighted messages") {
    const InfoPair own{Vec::Ones(2), identity(2)};
    const std::vector<WeightedMessage> in{{InfoPair{2.0 * Vec::Ones(2), 2.0 * identity(2)}, 0.5},
                                          {InfoPair{Vec::Ones(2), identity(2)}, 0.0}};
    const auto a = aggregate(own, in);
    CHECK(a.theta(0) == doctest::Approx(2.0));
    CHECK(a.omega(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("two nodes: the echo is not counted back") {
    const Topology t(2, false, {{0, 1}});
    const std::vector<InfoPair> own{{Vec::Constant(1, 1.0), Mat::Constant(1, 1, 1.0)},
                                    {Vec::Constant(1, 10.0), Mat::Constant(1, 1, 10.0)}};
    for (int rounds : {1, 2, 5}) {
        const auto out = run_rounds(t, own, unit_gating(t), rounds);
        CHECK(out[0].theta(0) == doctest::Approx(11.0));
        CHECK(out[1].omega(0, 0) == doctest::Approx(11.0));
    }
}

TEST_CASE("path of three: one round is not enough") {
    const Topology t(3, false, {{0, 1}, {1, 2}});
    const std::vector<InfoPair> own{{Vec::Constant(1, 1.0), Mat::Constant(1, 1, 1.0)},
                                    {Vec::Constant(1, 2.0), Mat::Constant(1, 1, 2.0)},
                                    {Vec::Constant(1, 4.0), Mat::Constant(1, 1, 4.0)}};
    const auto one = run_rounds(t, own, unit_gating(t), 1);
    CHECK(one[0].theta(0) == doctest::Approx(3.0));
    CHECK(one[1].theta(0) == doctest::Approx(7.0));
    const auto two = run_rounds(t, own, unit_gating(t), 2);
    for (const auto& a : two) CHECK(a.theta(0) == doctest::Approx(7.0));
}

TEST_CASE("zero rounds and non-links are rejected") {
    const Topology t(3, false, {{0, 1}, {1, 2}});
    Gen g(1);
    CHECK_THROWS_AS(run_rounds(t, random_pairs(g, 3, 2), unit_gating(t), 0), ValidationError);
    const RoundState state(std::make_shared<const ConsensusPlan>(t), random_pairs(g, 3, 2), unit_gating(t));
    CHECK_THROWS_AS(outgoing_message(state, 0, 2), ValidationError);
}

TEST_CASE("property: unit-weight trees reach the exact global sum after d_g rounds") {
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        Gen g(31, trial);
        const int n = g.integer(1, 12);
        const int dim = g.integer(1, 4);
        const Topology t = g.tree(n);
        const auto own = random_pairs(g, n, dim);
        const InfoPair total = global_sum(own);
        const auto out = run_rounds(t, own, unit_gating(t), std::max(1, diameter(t)));
        for (const auto& a : out) {
            CHECK(test::rel_err(a.theta, total.info_vec) <= 1e-9);
            CHECK(test::rel_err(a.omega, total.info_mat) <= 1e-9);
        }
    }
}

TEST_CASE("property: weighted and gated trees match path products") {
    for (std::uint64_t trial = 0; trial < 60; ++trial) {
        Gen g(32, trial);
        const int n = g.integer(2, 12);
        const Topology t = g.tree(n);
        DynMat gated = DynMat::Zero(n, n);
        for (const auto& l : t.links()) gated(l.to, l.from) = g.integer(0, 3) == 0 ? 0.0 : g.uniform(0.1, 1.0);
        const auto own = random_pairs(g, n, 3);
        const auto out = run_rounds(t, own, gated, diameter(t));
        const auto ref = oracle::tree_sums(t, own, gated);
        for (int i = 0; i < n; ++i) {
            CHECK(test::rel_err(out[static_cast<std::size_t>(i)].theta, ref[static_cast<std::size_t>(i)].theta) <= 1e-9);
            CHECK(test::rel_err(out[static_cast<std::size_t>(i)].omega, ref[static_cast<std::size_t>(i)].omega) <= 1e-9);
        }
        const ConsensusPlan plan(t);
        const DynMat c = consensus_coefficients(plan, gated, diameter(t));
        CHECK((c - oracle::tree_path_coefficients(t, gated)).norm() <= 1e-12);
    }
}

TEST_CASE("property: extra rounds leave tree aggregates unchanged") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        Gen g(33, trial);
        const int n = g.integer(2, 10);
        const Topology t = g.tree(n);
        const auto own = random_pairs(g, n, 2);
        const auto a = run_rounds(t, own, unit_gating(t), diameter(t));
        const auto b = run_rounds(t, own, unit_gating(t), diameter(t) + 3);
        for (int i = 0; i < n; ++i) CHECK(test::rel_err(a[static_cast<std::size_t>(i)].theta, b[static_cast<std::size_t>(i)].theta) <= 1e-12);
    }
}

TEST_CASE("property: relabeling permutes the aggregates") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        Gen g(34, trial);
        const int n = g.integer(2, 12);
        const Topology t = g.tree(n);
        const auto perm = g.permutation(n);
        const Topology r = t.relabeled(perm);
        const auto own = random_pairs(g, n, 2);
        std::vector<InfoPair> own_r(own.size());
        for (int i = 0; i < n; ++i) own_r[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = own[static_cast<std::size_t>(i)];
        const DynMat w = default_weights(t);
        DynMat w_r = DynMat::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) w_r(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = w(i, j);
        const auto a = run_rounds(t, own, w, diameter(t));
        const auto b = run_rounds(r, own_r, w_r, diameter(r));
        for (int i = 0; i < n; ++i) {
            CHECK(test::rel_err(a[static_cast<std::size_t>(i)].theta, b[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])].theta) <= 1e-12);
        }
    }
}

TEST_CASE("property: aggregates are linear in the inputs") {
    Gen g(35);
    const Topology t(12, false, test::reference_edges());
    const DynMat w = default_weights(t);
    const auto a = random_pairs(g, 12, 3);
    const auto b = random_pairs(g, 12, 3);
    std::vector<InfoPair> ab;
    for (int i = 0; i < 12; ++i) {
        InfoPair p = a[static_cast<std::size_t>(i)];
        p.add_scaled(b[static_cast<std::size_t>(i)], 2.0);
        ab.push_back(p);
    }
    const auto ra = run_rounds(t, a, w, 6);
    const auto rb = run_rounds(t, b, w, 6);
    const auto rab = run_rounds(t, ab, w, 6);
    for (int i = 0; i < 12; ++i) {
        const Vec expect = ra[static_cast<std::size_t>(i)].theta + 2.0 * rb[static_cast<std::size_t>(i)].theta;
        CHECK(test::rel_err(rab[static_cast<std::size_t>(i)].theta, expect) <= 1e-12);
    }
}

TEST_CASE("oracle suite passes") {
    for (const auto& c : oracle::run_suite(5)) {
        INFO(c.name);
        CHECK(c.passed);
    }
}

}
