#pragma once

#include <Eigen/Dense>

namespace auglasso {

struct EigenRange {
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
};

/// Eigenvalue range of a symmetric matrix (throws on solver failure).
EigenRange symmetric_eigen_range(const Eigen::MatrixXd& m);

/// True when min eigenvalue >= -1e-8 * max eigenvalue (and the matrix is
/// symmetric up to round-off); range_out receives the eigenvalue range.
bool is_psd(const Eigen::MatrixXd& m, EigenRange* range_out = nullptr);

/// Symmetric square root via eigendecomposition; negative eigenvalues are
/// clamped to zero, so PSD-singular inputs are accepted.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m);

/// Largest singular value of X/sqrt(n), squared — the gradient Lipschitz
/// constant of the Huber smooth part.
double scaled_spectral_norm_squared(const Eigen::MatrixXd& x);

}  // namespace auglasso
