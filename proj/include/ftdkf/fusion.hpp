#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ftdkf/filter.hpp"
#include "ftdkf/types.hpp"

namespace ftdkf {

enum class FusionMode { Matrix, Vector, None };

std::string to_string(FusionMode mode);
// "matrix" | "vector" | "none"; throws ValidationError otherwise.
FusionMode parse_fusion_mode(const std::string& text);

// P^{ij}_k = (I - K^i H^i)(Phi P^{ij}_{k-1} Phi^T + Q)(I - K^j H^j)^T.
// Passing the shared measurement covariance (only meaningful for i = j, i.e.
// the same sensor on both sides) adds K^i R K^{jT}, which makes the recursion
// reproduce the posterior covariance of a local Kalman filter.
Mat cross_cov_step(const Mat& prev, const Mat& gain_i, const Mat& obs_i, const Mat& gain_j, const Mat& obs_j,
                   const Mat& transition, const Mat& process_cov,
                   const std::optional<Mat>& shared_meas_cov = std::nullopt);

// Joint error covariance of linear information-form estimators whose update is
// x_i = A_i x_prior_i + P_i sum_j C(i, j) H_j^T R_j^{-1} y_j:
//   P^{il} = A_i (Phi P^{il} Phi^T + Q) A_l^T + P_i (sum_j C(i,j) C(l,j) Phi_j) P_l
// with Phi_j = H_j^T R_j^{-1} H_j. `prev` and the result are n*nx square.
DynMat joint_cov_step(const DynMat& prev, const Mat& transition, const Mat& process_cov,
                      const std::vector<Mat>& blend, const std::vector<Mat>& posterior_covs,
                      const DynMat& coeffs, const std::vector<Mat>& sensor_info);

struct FusionWeights {
    // Stacked weights [Gamma_1; ...; Gamma_n], (n*nx) x nx.
    DynMat gamma;
    // Error covariance of the fused estimate, Gamma^T Xi Gamma.
    Mat fused_cov;
    int state_dim = 0;

    int count() const { return state_dim > 0 ? static_cast<int>(gamma.rows()) / state_dim : 0; }
    Mat block(int i) const { return gamma.block(i * state_dim, 0, state_dim, state_dim); }
};

// Gamma = Xi^{-1} e (e^T Xi^{-1} e)^{-1}. A rank-deficient PSD Xi falls back to
// its pseudo-inverse. Throws NumericalError if Xi is not PSD or e^T Xi^+ e is singular.
FusionWeights matrix_weights(const DynMat& xi, int state_dim);

// Diagonal weights built per state component from the diagonals of the blocks
// of Xi; fused_cov is the exact covariance Gamma~^T Xi Gamma~ of that choice.
// Throws NumericalError if a diagonal entry is not positive.
FusionWeights vector_weights(const DynMat& xi, int state_dim);

FusionWeights fusion_weights(FusionMode mode, const DynMat& xi, int state_dim);

// x^f = sum_i Gamma_i x_i.
Vec fuse(const std::vector<LocalEstimate>& locals, const FusionWeights& weights);

}  // namespace ftdkf
