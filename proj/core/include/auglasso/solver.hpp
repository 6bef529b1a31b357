#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "auglasso/model.hpp"

namespace auglasso {

/// Penalty levels (lambda_s for beta, lambda_o for theta). Construction
/// rejects negative or non-finite values; zero is representable so that
/// degenerate tuning-rule outputs can be reported, but gamma() and the
/// solvers require strictly positive penalties (valid() == true).
struct PenaltyPair {
    double lambda_s = 0.0;
    double lambda_o = 0.0;

    PenaltyPair() = default;
    PenaltyPair(double lambda_s, double lambda_o);

    bool valid() const { return lambda_s > 0.0 && lambda_o > 0.0; }
    double gamma() const;  // lambda_s / lambda_o
};

enum class Algorithm { coordinate_descent, proximal_gradient };

struct SolverConfig {
    Algorithm algorithm = Algorithm::coordinate_descent;
    int max_sweeps = 10000;
    double kkt_tol = 1e-8;
    double objective_tol = 1e-12;   // relative decrease stall threshold
    bool record_trace = false;      // keep per-sweep objectives in FitResult
};

struct FitResult {
    Eigen::VectorXd beta_hat;
    Eigen::VectorXd theta_hat;
    double objective = 0.0;
    double kkt_residual = 0.0;
    int sweeps_used = 0;
    bool converged = false;

    // Diagnostics (not part of the serialized record)
    std::vector<double> objective_trace;
    std::vector<int> zero_columns;
};

/// Optional warm start for a fit; missing parts default to zero vectors.
struct WarmStart {
    std::optional<Eigen::VectorXd> beta;
    std::optional<Eigen::VectorXd> theta;
};

/// Huber function: u^2/2 for |u| <= 1, |u| - 1/2 otherwise.
double huber(double u);

/// sign(x) * max(|x| - t, 0), t >= 0.
double soft_threshold(double x, double t);

/// (1/2n)||y - X beta - sqrt(n) theta||^2 + lambda_s||beta||_1 + lambda_o||theta||_1
double objective_augmented(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& beta,
                           const Eigen::VectorXd& theta,
                           const PenaltyPair& penalties);

/// lambda_o^2 sum_i huber((y_i - x_i' beta)/(lambda_o sqrt(n))) + lambda_s||beta||_1
double objective_huber(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta,
                       const PenaltyPair& penalties);

/// Exact per-coordinate minimizer of the augmented objective at fixed beta:
/// theta_i = soft_threshold((y_i - x_i' beta)/sqrt(n), lambda_o).
Eigen::VectorXd profile_theta(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta, double lambda_o);

/// Max KKT violation of the augmented problem at (beta, theta); zero iff
/// the pair is a global minimizer.
double kkt_residual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta, const Eigen::VectorXd& theta,
                    const PenaltyPair& penalties);

/// Cyclic coordinate descent over the p+n coordinates of (beta, theta):
/// beta coordinates first, then the exact closed-form theta pass, so theta
/// is optimal given beta at every sweep boundary. Exhausting max_sweeps
/// yields converged == false, not an error. Zero design columns keep
/// their coefficient pinned at 0 (reported in FitResult::zero_columns).
FitResult fit_cd(const Dataset& data, const PenaltyPair& penalties,
                 const SolverConfig& config = {},
                 const WarmStart& warm = {});

/// Accelerated proximal gradient (with adaptive restart) on the Huber
/// composite form; step 1/L with L = s1(X/sqrt(n))^2. theta_hat is
/// reported via profile_theta, and convergence uses the same KKT
/// certificate as fit_cd.
FitResult fit_prox(const Dataset& data, const PenaltyPair& penalties,
                   const SolverConfig& config = {},
                   const WarmStart& warm = {});

/// Dispatch on config.algorithm.
FitResult fit(const Dataset& data, const PenaltyPair& penalties,
              const SolverConfig& config = {}, const WarmStart& warm = {});

}  // namespace auglasso
