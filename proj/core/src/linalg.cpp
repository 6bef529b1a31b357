#include "auglasso/linalg.hpp"

#include <stdexcept>
#include <string>

namespace auglasso {

EigenRange symmetric_eigen_range(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error(
            "symmetric eigendecomposition failed (dim " +
            std::to_string(m.rows()) + ", norm " + std::to_string(m.norm()) + ")");
    }
    const auto& ev = solver.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

bool is_psd(const Eigen::MatrixXd& m, EigenRange* range_out) {
    if (m.rows() != m.cols()) return false;
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale)) {
        return false;
    }
    const EigenRange range = symmetric_eigen_range(m);
    if (range_out != nullptr) *range_out = range;
    return range.min_eigenvalue >= -1e-8 * std::max(range.max_eigenvalue, 0.0);
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error(
            "symmetric eigendecomposition failed (dim " +
            std::to_string(m.rows()) + ", norm " + std::to_string(m.norm()) + ")");
    }
    Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * roots.asDiagonal() *
           solver.eigenvectors().transpose();
}

double scaled_spectral_norm_squared(const Eigen::MatrixXd& x) {
    const double n = static_cast<double>(x.rows());
    // Work on the smaller Gram matrix; its top eigenvalue is s1(X)^2.
    Eigen::MatrixXd gram;
    if (x.cols() <= x.rows()) {
        gram = x.transpose() * x;
    } else {
        gram = x * x.transpose();
    }
    const EigenRange range = symmetric_eigen_range(gram);
    return std::max(range.max_eigenvalue, 0.0) / n;
}

}  // namespace auglasso
