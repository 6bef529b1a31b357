#include "auglasso/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "auglasso/linalg.hpp"

namespace auglasso {

CovarianceModel CovarianceModel::identity() {
    return CovarianceModel{Kind::identity, 0.0, {}};
}

CovarianceModel CovarianceModel::ar1(double rho) {
    if (!(rho > -1.0 && rho < 1.0)) {
        throw std::invalid_argument("ar1 correlation must be in (-1, 1), got " +
                                    std::to_string(rho));
    }
    return CovarianceModel{Kind::ar1, rho, {}};
}

CovarianceModel CovarianceModel::equicorrelated(double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw std::invalid_argument(
            "equicorrelated correlation must be in [0, 1), got " +
            std::to_string(rho));
    }
    return CovarianceModel{Kind::equicorrelated, rho, {}};
}

CovarianceModel CovarianceModel::explicit_matrix(Eigen::MatrixXd sigma) {
    return CovarianceModel{Kind::explicit_matrix, 0.0, std::move(sigma)};
}

Eigen::MatrixXd make_covariance(const CovarianceModel& model, int p) {
    if (p < 1) throw std::invalid_argument("dimension p must be >= 1");
    switch (model.kind) {
        case CovarianceModel::Kind::identity:
            return Eigen::MatrixXd::Identity(p, p);
        case CovarianceModel::Kind::ar1: {
            Eigen::MatrixXd sigma(p, p);
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j)
                    sigma(i, j) = std::pow(model.rho, std::abs(i - j));
            return sigma;
        }
        case CovarianceModel::Kind::equicorrelated: {
            Eigen::MatrixXd sigma =
                Eigen::MatrixXd::Constant(p, p, model.rho);
            sigma.diagonal().setOnes();
            return sigma;
        }
        case CovarianceModel::Kind::explicit_matrix: {
            const Eigen::MatrixXd& sigma = model.matrix;
            if (sigma.rows() != p || sigma.cols() != p) {
                throw std::invalid_argument(
                    "explicit covariance must be " + std::to_string(p) + "x" +
                    std::to_string(p));
            }
            EigenRange range;
            if (!is_psd(sigma, &range)) {
                throw std::invalid_argument(
                    "explicit covariance is not PSD: min eigenvalue " +
                    std::to_string(range.min_eigenvalue) + " vs max " +
                    std::to_string(range.max_eigenvalue));
            }
            return sigma;
        }
    }
    throw std::logic_error("unreachable covariance kind");
}

double rho_sigma(const Eigen::MatrixXd& sigma) {
    return std::sqrt(sigma.diagonal().maxCoeff());
}

Eigen::MatrixXd sample_design(int n, const Eigen::MatrixXd& sigma, Rng& rng) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    EigenRange range;
    if (!is_psd(sigma, &range)) {
        throw std::invalid_argument(
            "design covariance is not PSD: min eigenvalue " +
            std::to_string(range.min_eigenvalue) + " vs max " +
            std::to_string(range.max_eigenvalue));
    }
    const int p = static_cast<int>(sigma.rows());
    Eigen::MatrixXd g(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
    if (sigma.isIdentity(0.0)) return g;
    return g * symmetric_sqrt(sigma);
}

Eigen::VectorXd make_beta(int p, int s, double amplitude) {
    if (s < 0 || s > p) {
        throw std::invalid_argument("sparsity s must satisfy 0 <= s <= p");
    }
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta.head(s).setConstant(amplitude);
    return beta;
}

namespace {

std::vector<int> pick_indices(int n, const ContaminationSpec& spec, Rng& rng) {
    std::vector<int> indices;
    indices.reserve(spec.o);
    if (spec.index_rule == ContaminationSpec::IndexRule::first_o) {
        for (int i = 0; i < spec.o; ++i) indices.push_back(i);
        return indices;
    }
    // Partial Fisher-Yates over [0, n): o distinct draws in stream order.
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < spec.o; ++i) {
        const auto j =
            i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
        indices.push_back(pool[i]);
    }
    std::sort(indices.begin(), indices.end());
    return indices;
}

}  // namespace

Dataset generate(int n, int p, const CovarianceModel& cov,
                 const Eigen::VectorXd& beta_star, double sigma,
                 const ContaminationSpec& contamination, Rng& rng) {
    if (beta_star.size() != p) {
        throw std::invalid_argument("beta_star must have length p");
    }
    if (sigma < 0.0) throw std::invalid_argument("noise level must be >= 0");
    if (contamination.o < 0 || contamination.o > n) {
        throw std::invalid_argument("outlier count o must satisfy 0 <= o <= n");
    }
    if (contamination.o > 0 && contamination.magnitude == 0.0) {
        throw std::invalid_argument(
            "contamination magnitude must be nonzero when o > 0 "
            "(otherwise no entries would differ)");
    }

    const Eigen::MatrixXd sigma_mat = make_covariance(cov, p);
    Dataset ds;
    ds.X = sample_design(n, sigma_mat, rng);

    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = sigma * rng.normal();

    const Eigen::VectorXd y_clean = ds.X * beta_star + xi;
    ds.y = y_clean;

    const double root_n = std::sqrt(static_cast<double>(n));
    GroundTruth truth;
    truth.beta_star = beta_star;
    for (int j = 0; j < p; ++j)
        if (beta_star[j] != 0.0) truth.support_S.push_back(j);
    truth.xi = xi;
    truth.sigma = sigma;
    truth.theta_star = Eigen::VectorXd::Zero(n);
    truth.support_O = pick_indices(n, contamination, rng);

    for (int i : truth.support_O) {
        double shift = root_n * contamination.magnitude;
        if (contamination.mechanism ==
            ContaminationSpec::Mechanism::sign_flip_shift) {
            // sign(0) treated as +1 so that exactly o entries change
            const double s = y_clean[i] >= 0.0 ? 1.0 : -1.0;
            shift = -s * root_n * contamination.magnitude;
        }
        ds.y[i] = y_clean[i] + shift;
        truth.theta_star[i] = (ds.y[i] - y_clean[i]) / root_n;
    }

    ds.truth = std::move(truth);
    ds.sigma_hint = sigma;
    return ds;
}

}  // namespace auglasso
