// ftdkf command line: simulate scenarios, report bounds, validate inputs and
// run the brute-force oracle checks.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ftdkf/error.hpp"
#include "ftdkf/metrics.hpp"
#include "ftdkf/oracle.hpp"
#include "ftdkf/report.hpp"
#include "ftdkf/scenario.hpp"
#include "ftdkf/simulation.hpp"

namespace {

enum ExitCode : int { kOk = 0, kIo = 1, kValidation = 2, kNumerical = 3, kBoundUndefined = 4 };

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<int> dt;
    std::optional<std::string> estimators;
    std::optional<std::string> fusion;
    std::optional<int> workers;
};

ftdkf::Scenario load_with(const std::string& path, const Overrides& o) {
    auto sc = ftdkf::load_scenario(path);
    if (o.dt) {
        if (*o.dt < 0) throw ftdkf::ValidationError("--dt-override must be >= 0");
        sc = sc.with_max_delay(*o.dt);
    }
    if (o.seed) sc.seed = *o.seed;
    if (o.runs) {
        if (*o.runs < 1) throw ftdkf::ValidationError("--runs must be >= 1");
        sc.runs = *o.runs;
    }
    if (o.estimators) sc.estimators = ftdkf::parse_estimator_list(*o.estimators);
    if (o.fusion) sc.fusion = ftdkf::parse_fusion_mode(*o.fusion);
    if (o.workers) {
        if (*o.workers < 0) throw ftdkf::ValidationError("--workers must be >= 0");
        sc.workers = *o.workers;
    }
    return sc;
}

void print_warnings(const ftdkf::Scenario& sc) {
    for (const auto& w : sc.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_run(const std::string& path, const std::string& out, const Overrides& o) {
    const auto sc = load_with(path, o);
    print_warnings(sc);
    const auto records = ftdkf::run_monte_carlo(sc);
    ftdkf::emit_metrics(records, out);
    std::printf("%s: %d runs x %d steps, d_t=%d, fusion=%s -> %s\n", sc.name.c_str(), sc.runs, sc.horizon,
                sc.max_delay(), ftdkf::to_string(sc.fusion).c_str(), out.c_str());
    for (auto kind : sc.estimators) {
        const auto label = ftdkf::to_string(kind);
        std::printf("  %-12s steady-state mse:", label.c_str());
        for (int c = 0; c < sc.system.state_dim; ++c) std::printf(" %.6g", ftdkf::steady_state(records, label, c));
        if (sc.fusion != ftdkf::FusionMode::None) {
            std::printf("  fused:");
            for (int c = 0; c < sc.system.state_dim; ++c) {
                std::printf(" %.6g", ftdkf::steady_state(records, label, c, true));
            }
        }
        std::printf("\n");
    }
    return kOk;
}

int cmd_bounds(const std::string& path, std::optional<double> target, const Overrides& o) {
    const auto sc = load_with(path, o);
    print_warnings(sc);
    const auto rep = ftdkf::bounds_report(sc, target);
    std::cout << ftdkf::format_bounds_report(rep);
    return kOk;
}

int cmd_validate(const std::string& path) {
    const auto sc = ftdkf::load_scenario(path);
    print_warnings(sc);
    const auto report = ftdkf::validate_model(sc.system, sc.sensors);
    const auto cls = ftdkf::classify(sc.topology);
    std::printf("%s: valid\n", sc.name.c_str());
    std::printf("  sensors %zu, state_dim %d, topology %s, diameter %d\n", sc.sensors.size(), sc.system.state_dim,
                ftdkf::to_string(cls.kind).c_str(), cls.diameter);
    std::printf("  eta %.10g, observability horizon %d (alpha %.6g, beta %.6g)\n", report.eta,
                report.observability->horizon, report.observability->alpha, report.observability->beta);
    std::printf("  d_t %d, buffer length %d, horizon %d, runs %d\n", sc.max_delay(),
                sc.buffer_length > 0 ? sc.buffer_length : sc.max_delay() + 2, sc.horizon, sc.runs);
    return kOk;
}

int cmd_oracle(std::uint64_t seed) {
    bool ok = true;
    for (const auto& c : ftdkf::oracle::run_suite(seed)) {
        std::printf("%s  %s  (worst %.3g, tol %.1g)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.worst,
                    c.tolerance);
        ok = ok && c.passed;
    }
    return ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anti-delay distributed Kalman filter with finite-time consensus"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out = "metrics.csv";
    Overrides o;
    std::optional<double> target;
    std::uint64_t oracle_seed = 1;

    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--seed", o.seed, "master seed");
        cmd->add_option("--runs", o.runs, "Monte-Carlo runs");
        cmd->add_option("--dt-override", o.dt, "maximum delay (uniform over 0..d)");
        cmd->add_option("--estimators", o.estimators, "comma list of ftdkf,droplate,centralized");
        cmd->add_option("--fusion", o.fusion, "matrix | vector | none");
        cmd->add_option("--workers", o.workers, "worker threads (0: all cores)");
    };

    auto* run = app.add_subcommand("run", "simulate a scenario and write per-instant MSE as CSV");
    run->add_option("--scenario", scenario, "scenario JSON file")->required();
    run->add_option("--out", out, "output CSV path");
    add_overrides(run);

    auto* bounds = app.add_subcommand("bounds", "print the covariance floor and the maximum allowable delay");
    bounds->add_option("--scenario", scenario, "scenario JSON file")->required();
    bounds->add_option("--target", target, "precision target: admissible covariance scale P");
    add_overrides(bounds);

    auto* validate = app.add_subcommand("validate", "check a scenario and its model assumptions");
    validate->add_option("--scenario", scenario, "scenario JSON file")->required();

    auto* oracle = app.add_subcommand("oracle", "brute-force consensus and fusion checks");
    oracle->add_option("--seed", oracle_seed, "seed for the random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (run->parsed()) return cmd_run(scenario, out, o);
        if (bounds->parsed()) return cmd_bounds(scenario, target, o);
        if (validate->parsed()) return cmd_validate(scenario);
        if (oracle->parsed()) return cmd_oracle(oracle_seed);
    } catch (const ftdkf::BoundUndefined& e) {
        std::cerr << "bound undefined: " << e.what() << '\n';
        return kBoundUndefined;
    } catch (const ftdkf::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const ftdkf::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const ftdkf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}
