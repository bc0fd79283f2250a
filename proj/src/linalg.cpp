#include <algorithm>
#include <cmath>

#include "ftdkf/error.hpp"
#include "ftdkf/types.hpp"

namespace ftdkf {

bool is_symmetric(const DynMat& m, double tol) {
    if (m.rows() != m.cols()) return false;
    if (m.size() == 0) return true;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

double min_eigenvalue(const DynMat& m) {
    Eigen::SelfAdjointEigenSolver<DynMat> es(symmetrized(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const DynMat& m) {
    Eigen::SelfAdjointEigenSolver<DynMat> es(symmetrized(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double min_eigenvalue(const Mat& m) {
    if (m.rows() == 3 && m.cols() == 3) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
        es.computeDirect(Eigen::Matrix3d(symmetrized(m)), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

bool is_psd(const DynMat& m, double tol) {
    if (!is_symmetric(m)) return false;
    if (m.size() == 0) return true;
    Eigen::SelfAdjointEigenSolver<DynMat> es(symmetrized(m), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return ev.minCoeff() >= -tol * std::max(1.0, std::abs(ev.maxCoeff()));
}

bool is_pd(const DynMat& m) {
    if (!is_symmetric(m) || m.size() == 0) return false;
    return min_eigenvalue(m) > 0.0;
}

namespace {

template <int N>
std::optional<Mat> spd_inverse_fixed(const Mat& m, double max_cond) {
    using Fixed = Eigen::Matrix<double, N, N>;
    const Fixed a = m;
    Eigen::LLT<Fixed> llt(a);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Fixed inv;
    if constexpr (N <= 4) {
        inv = a.inverse();
    } else {
        inv = llt.solve(Fixed::Identity());
    }
    const double cond = a.cwiseAbs().colwise().sum().maxCoeff() * inv.cwiseAbs().colwise().sum().maxCoeff();
    if (!(cond <= max_cond)) return std::nullopt;
    return Mat(symmetrized(inv));
}

}  // namespace

std::optional<Mat> spd_inverse(const Mat& m, double max_cond) {
    if (m.rows() != m.cols() || m.rows() == 0) return std::nullopt;
    switch (m.rows()) {
        case 1: return spd_inverse_fixed<1>(m, max_cond);
        case 2: return spd_inverse_fixed<2>(m, max_cond);
        case 3: return spd_inverse_fixed<3>(m, max_cond);
        case 4: return spd_inverse_fixed<4>(m, max_cond);
        default: break;
    }
    Eigen::LLT<Mat> llt(m);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Mat inv = llt.solve(Mat::Identity(m.rows(), m.cols()));
    const double cond = m.cwiseAbs().colwise().sum().maxCoeff() * inv.cwiseAbs().colwise().sum().maxCoeff();
    if (!(cond <= max_cond)) return std::nullopt;
    return Mat(symmetrized(inv));
}

Mat psd_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(m));
    const Vec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

void require_dims(bool ok, const std::string& what) {
    if (!ok) throw DimensionError("dimension mismatch: " + what);
}

}  // namespace ftdkf
