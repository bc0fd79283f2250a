#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace ftdkf {

// Upper bound on state and per-sensor measurement dimensions. State-sized
// matrices live on the stack up to this size.
inline constexpr int kMaxDim = 12;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

// Network-sized objects (weight matrices, stacked cross-covariances).
using DynVec = Eigen::VectorXd;
using DynMat = Eigen::MatrixXd;

using Step = std::int64_t;
using NodeId = int;  // zero-based node / sensor index

inline Mat identity(int n) { return Mat::Identity(n, n); }

template <typename Derived>
auto symmetrized(const Eigen::MatrixBase<Derived>& m) {
    return (0.5 * (m + m.transpose())).eval();
}

// True when m is symmetric within `tol` relative to its largest entry.
bool is_symmetric(const DynMat& m, double tol = 1e-9);

// Smallest eigenvalue of the symmetric part of m.
double min_eigenvalue(const DynMat& m);
double max_eigenvalue(const DynMat& m);
// State-sized overloads that stay off the heap.
double min_eigenvalue(const Mat& m);
double max_eigenvalue(const Mat& m);

// Symmetric PSD test: symmetric and lambda_min >= -tol * max(1, |lambda_max|).
bool is_psd(const DynMat& m, double tol = 1e-10);
bool is_pd(const DynMat& m);

// Inverse of a symmetric positive definite matrix. nullopt when the matrix is
// not positive definite or its 1-norm condition number exceeds `max_cond`.
// Sizes up to 4 use fixed-size kernels.
std::optional<Mat> spd_inverse(const Mat& m, double max_cond = 1e12);

// Principal square root of a symmetric PSD matrix (negative eigenvalues clipped).
Mat psd_sqrt(const Mat& m);

}  // namespace ftdkf
