#include <doctest.h>

#include <cmath>

#include "ftdkf/error.hpp"
#include "ftdkf/model.hpp"
#include "support.hpp"

using namespace ftdkf;
using ftdkf::test::Gen;

TEST_SUITE("model") {

TEST_CASE("constant acceleration transition") {
    const Mat phi = constant_acceleration_transition(0.01);
    Mat expected(3, 3);
    expected << 1.0, 0.01, 0.00005, 0.0, 1.0, 0.01, 0.0, 0.0, 1.0;
    CHECK((phi - expected).norm() == doctest::Approx(0.0));
}

TEST_CASE("eta of the reference transition is frozen") {
    // Smallest singular value of Phi^{-1}, computed independently with numpy.
    CHECK(transition_eta(constant_acceleration_transition(0.01)) == doctest::Approx(0.9929538879940989).epsilon(1e-12));
    CHECK(transition_eta(identity(4)) == doctest::Approx(1.0));
}

TEST_CASE("reference scenario observability constants") {
    const auto& sc = test::reference_case1();
    const auto report = validate_model(sc.system, sc.sensors);
    REQUIRE(report.ok());
    REQUIRE(report.observability);
    const auto& g = *report.observability;
    // Every component is measured directly, so a single instant suffices and
    // M is the diagonal sum of H^T R^{-1} H.
    CHECK(g.horizon == 0);
    CHECK(g.alpha == doctest::Approx(4.25).epsilon(1e-12));
    CHECK(g.beta == doctest::Approx(12.166666666666666).epsilon(1e-12));
    CHECK(g.alpha_bar == doctest::Approx(49.764229963276485).epsilon(1e-9));
    CHECK(g.beta_bar == doctest::Approx(146.34288208666243).epsilon(1e-9));
}

TEST_CASE("a single position sensor needs two instants") {
    const auto sys = SystemModel::constant(constant_acceleration_transition(0.1), identity(3), Vec::Zero(3), identity(3));
    Mat h(1, 3);
    h << 1, 0, 0;
    const auto g = find_observability_horizon(sys, {SensorModel::constant(1, h, Mat::Identity(1, 1))});
    REQUIRE(g);
    CHECK(g->horizon == 2);
    CHECK(g->alpha > 1e-9);
}

TEST_CASE("unobservable pair is rejected") {
    const auto sys = SystemModel::constant(identity(2), identity(2), Vec::Zero(2), identity(2));
    Mat h(1, 2);
    h << 1, 0;
    const auto report = validate_model(sys, {SensorModel::constant(1, h, Mat::Identity(1, 1))});
    CHECK_FALSE(report.ok());
    CHECK_THROWS_AS(report.throw_if_invalid(), ValidationError);
}

TEST_CASE("singular transition and bad covariances are reported") {
    Mat phi = identity(2);
    phi(1, 1) = 0.0;
    Mat q = identity(2);
    q(0, 0) = -1.0;
    const auto sys = SystemModel::constant(phi, q, Vec::Zero(2), identity(2));
    const auto report = validate_model(sys, {SensorModel::constant(1, identity(2), Mat::Zero(2, 2))});
    CHECK(report.violations.size() >= 3);
}

TEST_CASE("property: Gramian spectrum brackets and observability of full-rank sensors") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        Gen g(11, trial);
        const int n = g.integer(1, 5);
        const auto sys = SystemModel::constant(g.transition(n), g.spd(n), Vec::Zero(n), g.spd(n));
        std::vector<SensorModel> sensors;
        const int m = g.integer(1, 4);
        for (int i = 0; i < m; ++i) sensors.push_back(SensorModel::constant(i + 1, g.matrix(n, n), g.spd(n)));
        const auto report = validate_model(sys, sensors);
        REQUIRE(report.ok());
        const auto& gr = *report.observability;
        CHECK(gr.alpha > 0.0);
        CHECK(gr.alpha <= gr.beta);
        CHECK(gr.alpha_bar >= gr.alpha - 1e-12);
        CHECK(gr.beta_bar >= gr.beta - 1e-12);
    }
}

TEST_CASE("counter streams are reproducible and independent") {
    CounterRng a(7, Stream::Process, 3, 0);
    CounterRng b(7, Stream::Process, 3, 0);
    CounterRng c(7, Stream::Measurement, 3, 0);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(derive_key(7, Stream::Delay, 1, 2) != derive_key(7, Stream::Delay, 2, 1));
}

TEST_CASE("gaussian draws match the requested covariance") {
    Gen g(3);
    const Mat cov = g.spd(3, 0.5, 2.0);
    const Mat root = psd_sqrt(cov);
    Mat acc = Mat::Zero(3, 3);
    const int samples = 40000;
    for (int s = 0; s < samples; ++s) {
        CounterRng rng(99, Stream::Process, static_cast<std::uint64_t>(s), 0);
        const Vec x = gaussian(rng, root);
        acc += x * x.transpose();
    }
    acc /= samples;
    CHECK((acc - cov).norm() / cov.norm() < 0.03);
}

TEST_CASE("noiseless truth follows the transition") {
    const Mat phi = constant_acceleration_transition(0.5);
    const auto sys = SystemModel::constant(phi, Mat::Zero(3, 3), Vec::Zero(3), identity(3));
    Vec x(3);
    x << 1, 2, 3;
    CounterRng rng(1, Stream::Process, 0, 0);
    CHECK((step_truth(sys, x, 0, rng) - phi * x).norm() == doctest::Approx(0.0));
}

}
