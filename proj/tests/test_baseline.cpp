#include <doctest.h>

#include "ftdkf/baseline.hpp"
#include "ftdkf/network.hpp"
#include "support.hpp"

using namespace ftdkf;
using ftdkf::test::Gen;

TEST_SUITE("baseline") {

TEST_CASE("centralized step without pairs is a prediction") {
    const Mat phi = constant_acceleration_transition(0.1);
    const auto sys = SystemModel::constant(phi, 0.1 * identity(3), Vec::Ones(3), identity(3));
    const LocalEstimate start{0, 0, 0, Vec::Ones(3), identity(3), Mat()};
    const auto next = centralized_kf(sys, {}, start);
    CHECK((next.state - phi * Vec::Ones(3)).norm() == doctest::Approx(0.0));
    CHECK((next.cov - (phi * phi.transpose() + 0.1 * identity(3))).norm() < 1e-12);
}

TEST_CASE("centralized information filter equals sequential covariance updates") {
    Gen g(81);
    const int nx = 3;
    const auto sys = SystemModel::constant(g.transition(nx), g.spd(nx, 0.1, 0.5), g.vector(nx), g.spd(nx));
    std::vector<Mat> h{g.matrix(1, nx), g.matrix(2, nx)};
    std::vector<Mat> r{g.spd(1), g.spd(2)};
    CentralizedFilter c(sys);
    LocalEstimate kf{0, 0, 0, sys.init_mean, sys.init_cov, Mat()};
    for (Step k = 1; k <= 20; ++k) {
        std::vector<InfoPair> pairs;
        std::vector<Vec> ys;
        for (int i = 0; i < 2; ++i) {
            ys.push_back(g.vector(static_cast<int>(h[static_cast<std::size_t>(i)].rows())));
            pairs.push_back(init_message(h[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(i)], ys.back()));
        }
        c.step(pairs);
        kf = predict(kf, sys);
        for (int i = 0; i < 2; ++i) kf = covariance_update(kf, h[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(i)]);
        CHECK(test::rel_err(c.current().state, kf.state) < 1e-9);
        CHECK(test::rel_err(c.current().cov, kf.cov) < 1e-9);
        CHECK(c.current().s == k);
    }
}

TEST_CASE("drop-late equals the buffering filter when nothing is late") {
    const auto& sc = test::reference_case1();
    auto ftdkf = DistributedFilter(sc.system, sc.sensors, sc.topology, EngineConfig{0, 0, false});
    auto drop = make_drop_late(sc.system, sc.sensors, sc.topology, 0);
    Network net(sc.topology, DelayProfile::uniform(0), 3);
    const GatingProvider gating = [&net](Step s) { return net.gated_weights(s); };
    Gen g(82);
    for (Step k = 1; k <= 30; ++k) {
        std::vector<InfoPair> own;
        for (int i = 0; i < 12; ++i) {
            Vec y(1);
            y << g.normal();
            own.push_back(init_message(sc.sensors[static_cast<std::size_t>(i)], k, y));
        }
        net.advance(k, own);
        ftdkf.step(own, gating);
        drop.step(own, gating);
        for (int i = 0; i < 12; ++i) {
            CHECK(ftdkf.current()[static_cast<std::size_t>(i)].state == drop.current()[static_cast<std::size_t>(i)].state);
        }
    }
}

TEST_CASE("drop-late never re-filters") {
    const auto& sc = test::reference_case1();
    auto drop = make_drop_late(sc.system, sc.sensors, sc.topology, 4);
    Network net(sc.topology, DelayProfile::uniform(4), 3);
    const GatingProvider gating = [&net](Step s) { return net.gated_weights(s); };
    for (Step k = 1; k <= 12; ++k) {
        const std::vector<InfoPair> own(12, InfoPair::zero(3));
        net.advance(k, own);
        drop.step(own, gating);
        CHECK(drop.window_first() == k);
        CHECK(drop.rounds_last_step() == 6);
    }
}

}
