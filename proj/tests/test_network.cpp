#include <doctest.h>

#include "ftdkf/error.hpp"
#include "ftdkf/network.hpp"
#include "support.hpp"

using namespace ftdkf;
using ftdkf::test::Gen;

TEST_SUITE("network") {

TEST_CASE("transmission window") {
    CHECK(transmission_window(3, 4).first == 0);
    CHECK(transmission_window(5, 4).first == 0);
    CHECK(transmission_window(6, 4).first == 2);
    CHECK(transmission_window(6, 4).size() == 5);
    CHECK(transmission_window(7, 0).first == 7);
    CHECK(transmission_window(1, 0).first == 0);
}

TEST_CASE("delay profiles validate") {
    CHECK_THROWS_AS(DelayProfile(2, {0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(DelayProfile(1, {0.7, 0.7}), ValidationError);
    CHECK_THROWS_AS(DelayProfile::uniform(-1), ValidationError);
    CHECK(DelayProfile::uniform(3).probabilities()[2] == doctest::Approx(0.25));
}

TEST_CASE("no delay: every packet is there at its own instant") {
    const Topology t(12, false, test::reference_edges());
    Network net(t, DelayProfile::uniform(0), 5);
    for (Step k = 1; k <= 20; ++k) {
        net.advance(k);
        const DynMat g = net.gated_weights(k);
        for (const auto& l : t.links()) CHECK(g(l.to, l.from) == doctest::Approx(t.weight(l.to, l.from)));
    }
}

TEST_CASE("point-mass delay: packets arrive exactly d instants late") {
    const Topology t(3, false, {{0, 1}, {1, 2}});
    Network net(t, DelayProfile::point_mass(3, 2), 1);
    for (Step k = 1; k <= 10; ++k) {
        const auto arrivals = net.advance(k);
        for (const auto& a : arrivals) CHECK(a.stamp == k - 2);
        if (k >= 3) {
            CHECK(net.gamma(1, 0, k - 2));
            CHECK_FALSE(net.gamma(1, 0, k - 1));
            CHECK(net.buffer(1).gamma(0, k - 2, k));
            CHECK_FALSE(net.buffer(1).gamma(0, k - 2, k - 1));
        }
        CHECK(net.gated_weight(2, 2, k) == 1.0);
    }
    CHECK_THROWS_AS(net.gated_weight(0, 2, 10), ValidationError);
}

TEST_CASE("network advances one instant at a time under delays") {
    const Topology t(2, false, {{0, 1}});
    Network net(t, DelayProfile::uniform(2), 1);
    net.advance(1);
    CHECK_THROWS_AS(net.advance(3), ValidationError);
    CHECK_THROWS_AS(net.advance(1), ValidationError);
}

TEST_CASE("buffer rejects late or misaddressed packets") {
    DelayBuffer b(0, {1, 2}, 3);
    b.shift_to(10);
    Packet p;
    p.src = 1;
    p.dst = 0;
    p.stamp = 7;
    CHECK_THROWS_AS(b.deliver(p), Error);
    p.stamp = 8;
    b.deliver(p);
    CHECK(b.gamma(1, 8));
    CHECK(b.payload(2, 8) == nullptr);
    p.dst = 1;
    CHECK_THROWS_AS(b.deliver(p), ValidationError);
    CHECK_THROWS_AS(b.gamma(1, 11), ValidationError);
    CHECK(b.gamma(0, 9));
}

TEST_CASE("delay samples are deterministic and in range") {
    const auto profile = DelayProfile::uniform(4);
    std::vector<int> counts(5, 0);
    for (Step s = 0; s < 20000; ++s) {
        const int d = sample_delay(profile, 3, Link{0, 1}, s);
        REQUIRE(d >= 0);
        REQUIRE(d <= 4);
        CHECK(d == sample_delay(profile, 3, Link{0, 1}, s));
        ++counts[static_cast<std::size_t>(d)];
    }
    for (int c : counts) CHECK(std::abs(c / 20000.0 - 0.2) < 0.015);
    int differ = 0;
    for (Step s = 0; s < 200; ++s) differ += sample_delay(profile, 3, Link{0, 1}, s) != sample_delay(profile, 3, Link{1, 0}, s);
    CHECK(differ > 100);
}

TEST_CASE("property: arrivals respect the profile and occupancy stays within capacity") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        Gen g(41, trial);
        const int n = g.integer(2, 8);
        const int d = g.integer(0, 5);
        const Topology t = g.tree(n);
        Network net(t, DelayProfile::uniform(d), trial, d + 1 + g.integer(0, 2));
        for (Step k = 1; k <= 40; ++k) {
            for (const auto& a : net.advance(k)) {
                CHECK(k - a.stamp == net.delay(Link{a.src, a.dst}, a.stamp));
                CHECK(k - a.stamp <= d);
            }
            for (NodeId i = 0; i < n; ++i) CHECK(net.buffer(i).occupancy() <= net.buffer(i).capacity());
            // Every packet of stamp k - d has arrived by now.
            if (k - d >= 1) {
                for (const auto& l : t.links()) CHECK(net.gamma(l.to, l.from, k - d));
            }
            // Gamma is monotone in the query instant.
            const Step s = std::max<Step>(1, k - d);
            for (const auto& l : t.links()) {
                bool seen = false;
                for (Step at = s; at <= k; ++at) {
                    const bool now = net.buffer(l.to).gamma(l.from, s, at);
                    CHECK((!seen || now));
                    seen = now;
                }
            }
        }
    }
}

}
