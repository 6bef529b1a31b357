#pragma once

#include <Eigen/Dense>
#include <optional>

#include "auglasso/solver.hpp"

namespace auglasso {

struct NoiseModel {
    double sigma = 1.0;   // noise std dev, > 0
    double delta = 0.1;   // tolerance level, in (0, 1)

    NoiseModel() = default;
    NoiseModel(double sigma, double delta);
};

/// lambda_s = 3 sigma sqrt(log(p/delta)/n), lambda_o = sigma sqrt(8 log(n/delta)/n).
PenaltyPair lambda_theorem3(int n, int p, const NoiseModel& noise);

/// lambda_s = lambda_o = sqrt((8/n)(log(p/s) + log(n/o))). Rejects o = 0
/// (the rule is undefined there; use lambda_theorem3 instead). The fully
/// degenerate case p == s and n == o returns the zero pair with a warning.
PenaltyPair lambda_experiment(int n, int p, int s, int o);

/// lambda_o = 2 sigma sqrt(2 log(3n/delta)/n);
/// lambda_s = 2 sigma rho sqrt(2 log(3p/delta)/n) (1 + sqrt(2 log(3p/delta)/n)),
/// with rho = rho(Sigma) when Sigma is supplied, else the empirical
/// column-norm proxy max_j ||X_j||_2 / sqrt(n).
/// Requires n >= 2 log(3p/delta).
PenaltyPair lambda_empirical(const Eigen::MatrixXd& X,
                             const std::optional<Eigen::MatrixXd>& sigma,
                             const NoiseModel& noise);

/// Lower bound on the common penalty level:
/// lambda_min sqrt(n) = max( sqrt(8 log(n/delta)),
///                           max_j ||X_j/sqrt(n)||_2 * sqrt(8 log(p/delta)) ).
double lambda_bound_theorem1(const Eigen::MatrixXd& X, double delta);

}  // namespace auglasso
