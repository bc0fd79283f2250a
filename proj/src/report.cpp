#include "ftdkf/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ftdkf/error.hpp"
#include "ftdkf/simulation.hpp"

namespace ftdkf {

BoundsReport bounds_report(const Scenario& scenario, std::optional<double> target_cov) {
    BoundsReport rep;
    rep.resolved = resolve_bounds(scenario.system, scenario.sensors, scenario.topology, scenario.max_delay());
    const auto& p = rep.resolved.params;
    rep.floor_k = static_cast<Step>(p.z + 1) * p.max_delay;
    rep.floor = cov_lower_bound(p, rep.resolved.regime, rep.floor_k, rep.floor_k);

    Scenario single = scenario;
    single.runs = 1;
    single.estimators = {EstimatorKind::Ftdkf};
    single.fusion = FusionMode::None;
    const auto records = run_monte_carlo(single);
    double warm = std::numeric_limits<double>::infinity();
    double steady = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        if (r.k < rep.floor_k) {
            warm = std::min(warm, r.window_min_info);
        } else {
            steady = std::min(steady, r.window_min_info);
        }
    }
    if (std::isfinite(warm)) rep.vartheta = warm;
    if (std::isfinite(steady)) rep.simulated_min_info = steady;

    if (target_cov) {
        rep.target_cov = *target_cov;
    } else {
        const double worst = rep.simulated_min_info ? *rep.simulated_min_info : warm;
        rep.target_cov = 1.0 / worst;
        rep.target_from_simulation = true;
    }
    const Step k = std::max<Step>(rep.floor_k, 1);
    rep.delay_bound = max_delay_bound(p, rep.resolved.regime, rep.target_cov, k, k);
    return rep;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string format_bounds_report(const BoundsReport& rep) {
    const auto& p = rep.resolved.params;
    std::string out;
    auto line = [&out](const std::string& key, const std::string& value, const char* source) {
        out += key;
        out.append(key.size() < 22 ? 22 - key.size() : 1, ' ');
        out += value;
        out += "  (";
        out += source;
        out += ")\n";
    };
    line("regime", to_string(rep.resolved.regime), "topology");
    line("d_t", std::to_string(p.max_delay), "configured");
    line("n", std::to_string(rep.resolved.node_count), "configured");
    line("n_bar", std::to_string(rep.resolved.observability_horizon), "computed");
    line("Z", std::to_string(p.z), "computed");
    line("eta", fmt(p.eta), "computed");
    line("alpha", fmt(p.alpha), "computed");
    line("alpha_bar", fmt(p.alpha_bar), "computed");
    line("beta_bar", fmt(rep.resolved.gramian.beta_bar), "computed");
    line("gamma_hat", fmt(p.gamma_hat), "computed, Omega_hat = beta_bar I");
    line("varpi", fmt(p.varpi), "computed");
    line("omega_min", fmt(p.omega_min), "computed");
    line("floor k", std::to_string(rep.floor_k), "computed");
    line("info floor", fmt(rep.floor.info_floor) + " (ln " + fmt(rep.floor.log_floor) + ")", "computed");
    line("vartheta", rep.vartheta ? fmt(*rep.vartheta) : "n/a", "simulated");
    line("simulated min info", rep.simulated_min_info ? fmt(*rep.simulated_min_info) : "n/a", "simulated");
    line("target P", fmt(rep.target_cov), rep.target_from_simulation ? "simulated worst case" : "configured");
    line("d_t^max raw", fmt(rep.delay_bound.raw), "computed");
    line("d_t^max",
         rep.delay_bound.max_delay ? std::to_string(*rep.delay_bound.max_delay) : std::string("unbounded"),
         "computed");
    return out;
}

}  // namespace ftdkf
