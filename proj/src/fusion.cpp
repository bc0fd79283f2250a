#include "ftdkf/fusion.hpp"

#include "ftdkf/error.hpp"

namespace ftdkf {

namespace {

constexpr double kMinRcond = 1e-12;

// Solves Xi X = rhs for symmetric PSD Xi; pseudo-inverse when Xi is singular.
DynMat psd_solve(const DynMat& xi, const DynMat& rhs) {
    Eigen::LDLT<DynMat> ldlt(xi);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > kMinRcond) {
        return ldlt.solve(rhs);
    }
    Eigen::SelfAdjointEigenSolver<DynMat> es(symmetrized(xi));
    const auto& values = es.eigenvalues();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    if (values.minCoeff() < -1e-9 * scale) throw NumericalError("cross-covariance matrix is not PSD");
    const double cutoff = 1e-10 * scale;
    DynVec inv(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) inv(i) = values(i) > cutoff ? 1.0 / values(i) : 0.0;
    const auto& v = es.eigenvectors();
    return v * inv.asDiagonal() * (v.transpose() * rhs);
}

DynMat stacked_identity(int count, int state_dim) {
    DynMat e(static_cast<Eigen::Index>(count) * state_dim, state_dim);
    for (int i = 0; i < count; ++i) e.block(i * state_dim, 0, state_dim, state_dim).setIdentity();
    return e;
}

void check_shape(const DynMat& xi, int state_dim) {
    require_dims(state_dim > 0 && xi.rows() == xi.cols() && xi.rows() % state_dim == 0 && xi.rows() > 0,
                 "Xi must be (n*nx) square");
}

}  // namespace

std::string to_string(FusionMode mode) {
    switch (mode) {
        case FusionMode::Matrix: return "matrix";
        case FusionMode::Vector: return "vector";
        case FusionMode::None: return "none";
    }
    return "none";
}

FusionMode parse_fusion_mode(const std::string& text) {
    if (text == "matrix") return FusionMode::Matrix;
    if (text == "vector") return FusionMode::Vector;
    if (text == "none") return FusionMode::None;
    throw ValidationError("fusion mode must be one of matrix, vector, none (got \"" + text + "\")");
}

Mat cross_cov_step(const Mat& prev, const Mat& gain_i, const Mat& obs_i, const Mat& gain_j, const Mat& obs_j,
                   const Mat& transition, const Mat& process_cov, const std::optional<Mat>& shared_meas_cov) {
    const auto n = static_cast<int>(prev.rows());
    require_dims(prev.cols() == n && transition.rows() == n && gain_i.rows() == n && gain_j.rows() == n,
                 "cross_cov_step dimensions");
    require_dims(gain_i.cols() == obs_i.rows() && gain_j.cols() == obs_j.rows(), "gain vs observation rows");
    const Mat left = identity(n) - gain_i * obs_i;
    const Mat right = identity(n) - gain_j * obs_j;
    Mat out = left * (transition * prev * transition.transpose() + process_cov) * right.transpose();
    if (shared_meas_cov) {
        require_dims(gain_i.cols() == shared_meas_cov->rows() && gain_j.cols() == shared_meas_cov->rows(),
                     "shared measurement covariance vs gains");
        out += gain_i * (*shared_meas_cov) * gain_j.transpose();
    }
    return out;
}

DynMat joint_cov_step(const DynMat& prev, const Mat& transition, const Mat& process_cov,
                      const std::vector<Mat>& blend, const std::vector<Mat>& posterior_covs,
                      const DynMat& coeffs, const std::vector<Mat>& sensor_info) {
    const auto n = static_cast<int>(blend.size());
    const auto nx = static_cast<int>(transition.rows());
    require_dims(prev.rows() == static_cast<Eigen::Index>(n) * nx && prev.cols() == prev.rows(),
                 "joint covariance vs sensor count");
    require_dims(static_cast<int>(posterior_covs.size()) == n && static_cast<int>(sensor_info.size()) == n &&
                     coeffs.rows() == n && coeffs.cols() == n,
                 "joint_cov_step inputs");

    DynMat out(prev.rows(), prev.cols());
    const Mat phi_t = transition.transpose();
    for (int i = 0; i < n; ++i) {
        for (int l = i; l < n; ++l) {
            const Mat predicted = transition * Mat(prev.block(i * nx, l * nx, nx, nx)) * phi_t + process_cov;
            Mat shared = Mat::Zero(nx, nx);
            for (int j = 0; j < n; ++j) {
                const double c = coeffs(i, j) * coeffs(l, j);
                if (c != 0.0) shared.noalias() += c * sensor_info[static_cast<std::size_t>(j)];
            }
            const auto si = static_cast<std::size_t>(i);
            const auto sl = static_cast<std::size_t>(l);
            Mat block = blend[si] * predicted * blend[sl].transpose() + posterior_covs[si] * shared * posterior_covs[sl];
            if (i == l) block = symmetrized(block);
            out.block(i * nx, l * nx, nx, nx) = block;
            if (i != l) out.block(l * nx, i * nx, nx, nx) = block.transpose();
        }
    }
    return out;
}

FusionWeights matrix_weights(const DynMat& xi, int state_dim) {
    check_shape(xi, state_dim);
    const auto count = static_cast<int>(xi.rows()) / state_dim;
    const DynMat e = stacked_identity(count, state_dim);
    const DynMat xi_inv_e = psd_solve(xi, e);
    const DynMat info = symmetrized(e.transpose() * xi_inv_e);
    Eigen::LLT<DynMat> llt(info);
    if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
        throw NumericalError("fusion information e^T Xi^{-1} e is singular");
    }
    FusionWeights w;
    w.state_dim = state_dim;
    w.gamma = llt.solve(xi_inv_e.transpose()).transpose();
    w.fused_cov = symmetrized(w.gamma.transpose() * xi * w.gamma);
    return w;
}

FusionWeights vector_weights(const DynMat& xi, int state_dim) {
    check_shape(xi, state_dim);
    const auto count = static_cast<int>(xi.rows()) / state_dim;
    FusionWeights w;
    w.state_dim = state_dim;
    w.gamma = DynMat::Zero(xi.rows(), state_dim);
    const DynVec ones = DynVec::Ones(count);
    for (int c = 0; c < state_dim; ++c) {
        DynMat component(count, count);
        for (int i = 0; i < count; ++i) {
            for (int j = 0; j < count; ++j) component(i, j) = xi(i * state_dim + c, j * state_dim + c);
        }
        for (int i = 0; i < count; ++i) {
            if (!(component(i, i) > 0.0)) throw NumericalError("vector fusion needs positive diagonal variances");
        }
        const DynVec solved = psd_solve(component, ones);
        const double total = ones.dot(solved);
        if (!(total > 0.0)) throw NumericalError("vector fusion normaliser is not positive");
        for (int i = 0; i < count; ++i) w.gamma(i * state_dim + c, c) = solved(i) / total;
    }
    w.fused_cov = symmetrized(w.gamma.transpose() * xi * w.gamma);
    return w;
}

FusionWeights fusion_weights(FusionMode mode, const DynMat& xi, int state_dim) {
    switch (mode) {
        case FusionMode::Matrix: return matrix_weights(xi, state_dim);
        case FusionMode::Vector: return vector_weights(xi, state_dim);
        case FusionMode::None: break;
    }
    throw ValidationError("fusion disabled");
}

Vec fuse(const std::vector<LocalEstimate>& locals, const FusionWeights& weights) {
    require_dims(static_cast<int>(locals.size()) == weights.count(), "locals vs fusion weights");
    Vec out = Vec::Zero(weights.state_dim);
    for (int i = 0; i < weights.count(); ++i) {
        require_dims(locals[static_cast<std::size_t>(i)].state.size() == weights.state_dim, "local state size");
        out.noalias() += weights.block(i).transpose() * locals[static_cast<std::size_t>(i)].state;
    }
    return out;
}

}  // namespace ftdkf
