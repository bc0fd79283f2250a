#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftdkf/graph.hpp"
#include "ftdkf/model.hpp"
#include "ftdkf/types.hpp"

namespace ftdkf {

enum class BoundRegime { Undirected, Directed };

std::string to_string(BoundRegime regime);

struct BoundParams {
    double eta = 1.0;          // min singular value of Phi^{-1}
    double gamma_hat = 1.0;    // prediction contraction constant
    double varpi = 1.0;        // gamma_hat^{d_t}
    double omega_min = 1.0;    // min positive entry of the consensus matrix powers
    int z = 1;                 // n + n_bar
    double alpha = 0.0;
    double alpha_bar = 0.0;
    int max_delay = 0;
    std::optional<double> vartheta;  // warm-up floor, measured

    // Copy with d_t replaced and varpi recoupled to gamma_hat^d.
    BoundParams with_delay(int d) const;
    // Throws ValidationError when an invariant (0 < gamma_hat <= 1, eta > 0,
    // omega_min > 0, Z >= 1) is violated.
    void validate() const;
};

struct BoundResult {
    double info_floor = 0.0;  // may underflow to 0; log_floor stays exact
    double log_floor = 0.0;
    BoundRegime regime = BoundRegime::Undirected;
};

// Largest-certified gamma with Y(Omega) >= gamma Phi^{-T} Omega Phi^{-1} for
// 0 <= Omega <= omega_cap, where Y(Omega) = (Phi Omega^{-1} Phi^T + Q)^{-1}:
// gamma = 1 / (1 + lambda_max(Phi^{-1} Q Phi^{-T}) lambda_max(omega_cap)).
double lemma1_gamma(const Mat& transition, const Mat& process_cov, const Mat& omega_cap);
double lemma1_gamma(const SystemModel& system, const Mat& omega_cap, Step k = 0);

// Mirror bound: Y(Omega) <= gamma Phi^{-T} Omega Phi^{-1} for Omega >= omega_floor,
// gamma = 1 / (1 + lambda_min(Phi^{-1} Q Phi^{-T}) lambda_min(omega_floor)).
double lemma1_gamma_upper(const Mat& transition, const Mat& process_cov, const Mat& omega_floor);

// Y(Omega) - gamma Phi^{-T} Omega Phi^{-1}, evaluated without inverting Omega.
Mat lemma1_residual(const Mat& transition, const Mat& process_cov, const Mat& omega, double gamma);

// Min strictly positive entry of (I + W)^sigma over sigma in [first, last].
double omega_min(const DynMat& weights, int first_power, int last_power);

// Floor on lambda_min([P^i_k(s)]^{-1}): alpha_bar enters for undirected
// graphs, alpha for digraphs. Requires s in D_t(k) and k >= (Z+1) d_t.
BoundResult cov_lower_bound(const BoundParams& params, BoundRegime regime, Step k, Step s);

struct DelayBound {
    double raw = 0.0;                   // real-valued right-hand side
    std::optional<std::int64_t> max_delay;  // floor(raw); nullopt when unbounded
};

// Largest d_t whose floor still guarantees [P]^{-1} >= 1/target_cov at (k, s).
// varpi is held at params.varpi. Throws BoundUndefined when the logarithm
// base gamma_hat * eta^{2(Z+1)} equals 1.
DelayBound max_delay_bound(const BoundParams& params, BoundRegime regime, double target_cov, Step k, Step s);

// Constants resolved from a model and topology.
struct ResolvedBounds {
    BoundParams params;
    BoundRegime regime = BoundRegime::Undirected;
    GramianReport gramian;
    int observability_horizon = 0;
    int node_count = 0;
};

// Omega_hat defaults to beta_bar * I.
ResolvedBounds resolve_bounds(const SystemModel& system, const std::vector<SensorModel>& sensors,
                              const Topology& topology, int max_delay);

}  // namespace ftdkf
