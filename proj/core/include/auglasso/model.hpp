#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "auglasso/rng.hpp"

namespace auglasso {

/// Population covariance of the design rows. Built-in kinds have unit
/// diagonal; explicit matrices are validated to be symmetric PSD
/// (min eigenvalue >= -1e-8 * max eigenvalue).
struct CovarianceModel {
    enum class Kind { identity, ar1, equicorrelated, explicit_matrix };

    Kind kind = Kind::identity;
    double rho = 0.0;          // ar1: (-1,1); equicorrelated: [0,1)
    Eigen::MatrixXd matrix;    // explicit_matrix only

    static CovarianceModel identity();
    static CovarianceModel ar1(double rho);
    static CovarianceModel equicorrelated(double rho);
    static CovarianceModel explicit_matrix(Eigen::MatrixXd sigma);
};

/// Realizes the p x p covariance matrix for the model.
/// ar1: Sigma_ij = rho^|i-j|; equicorrelated: rho + (1-rho)*1{i=j}.
Eigen::MatrixXd make_covariance(const CovarianceModel& model, int p);

/// rho(Sigma) = max_j sqrt(Sigma_jj).
double rho_sigma(const Eigen::MatrixXd& sigma);

/// How corrupted labels are produced.
///   fixed_shift:     y_i = y0_i + sqrt(n)*magnitude  (theta*_i = magnitude)
///   sign_flip_shift: shift sign matches -sign(y0_i)
struct ContaminationSpec {
    enum class Mechanism { fixed_shift, sign_flip_shift };
    enum class IndexRule { first_o, random };

    int o = 0;
    Mechanism mechanism = Mechanism::fixed_shift;
    double magnitude = 0.0;
    IndexRule index_rule = IndexRule::first_o;
};

struct GroundTruth {
    Eigen::VectorXd beta_star;        // p, zero outside support_S
    std::vector<int> support_S;
    Eigen::VectorXd theta_star;       // n, = (y - y0)/sqrt(n), zero outside support_O
    std::vector<int> support_O;
    Eigen::VectorXd xi;               // clean noise
    double sigma = 0.0;
};

struct Dataset {
    Eigen::MatrixXd X;                // n x p
    Eigen::VectorXd y;                // n
    std::optional<GroundTruth> truth;
    std::optional<double> sigma_hint;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
};

/// n rows iid N(0, Sigma), realized as G * Sigma^{1/2} with G standard
/// normal filled row-major from the stream. Deterministic given the seed.
Eigen::MatrixXd sample_design(int n, const Eigen::MatrixXd& sigma, Rng& rng);

/// First s entries equal to amplitude, the rest zero.
Eigen::VectorXd make_beta(int p, int s, double amplitude);

/// Generates y0 = X beta* + xi, xi iid N(0, sigma^2), then corrupts o
/// entries per the contamination spec. Draw order: X (row-major), xi,
/// then contamination indices when index_rule == random.
Dataset generate(int n, int p, const CovarianceModel& cov,
                 const Eigen::VectorXd& beta_star, double sigma,
                 const ContaminationSpec& contamination, Rng& rng);

}  // namespace auglasso
