#include "auglasso/tuning.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

#include "auglasso/model.hpp"

namespace auglasso {

NoiseModel::NoiseModel(double sigma_in, double delta_in)
    : sigma(sigma_in), delta(delta_in) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("delta must be in (0, 1)");
    }
}

PenaltyPair lambda_theorem3(int n, int p, const NoiseModel& noise) {
    if (n < 1 || p < 1) throw std::invalid_argument("need n >= 1 and p >= 1");
    const double nd = static_cast<double>(n);
    if (p / noise.delta <= 1.0 || n / noise.delta <= 1.0) {
        throw std::invalid_argument(
            "lambda_theorem3 needs p/delta > 1 and n/delta > 1 "
            "(logs must be positive)");
    }
    const double ls = 3.0 * noise.sigma * std::sqrt(std::log(p / noise.delta) / nd);
    const double lo = noise.sigma * std::sqrt(8.0 * std::log(n / noise.delta) / nd);
    return PenaltyPair(ls, lo);
}

PenaltyPair lambda_experiment(int n, int p, int s, int o) {
    if (s < 1 || s > p) throw std::invalid_argument("need 1 <= s <= p");
    if (o > n) throw std::invalid_argument("need o <= n");
    if (o < 1) {
        throw std::invalid_argument(
            "lambda_experiment is undefined at o = 0 (log(n/o)); "
            "use lambda_theorem3 for outlier-free cells");
    }
    const double value = std::sqrt(
        (8.0 / n) * (std::log(static_cast<double>(p) / s) +
                     std::log(static_cast<double>(n) / o)));
    if (value == 0.0) {
        std::cerr << "warning: lambda_experiment degenerate (p == s and n == o); "
                     "returning zero penalties\n";
    }
    return PenaltyPair(value, value);
}

PenaltyPair lambda_empirical(const Eigen::MatrixXd& X,
                             const std::optional<Eigen::MatrixXd>& sigma,
                             const NoiseModel& noise) {
    const double nd = static_cast<double>(X.rows());
    const double pd = static_cast<double>(X.cols());
    const double log_p_term = std::log(3.0 * pd / noise.delta);
    if (nd < 2.0 * log_p_term) {
        throw std::invalid_argument(
            "lambda_empirical requires n >= 2 log(3p/delta) = " +
            std::to_string(2.0 * log_p_term));
    }
    double rho;
    if (sigma.has_value()) {
        rho = rho_sigma(*sigma);
    } else {
        rho = std::sqrt(X.colwise().squaredNorm().maxCoeff() / nd);
    }
    const double q = std::sqrt(2.0 * log_p_term / nd);
    const double lo =
        2.0 * noise.sigma * std::sqrt(2.0 * std::log(3.0 * nd / noise.delta) / nd);
    const double ls = 2.0 * noise.sigma * rho * q * (1.0 + q);
    return PenaltyPair(ls, lo);
}

double lambda_bound_theorem1(const Eigen::MatrixXd& X, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("delta must be in (0, 1)");
    }
    const double nd = static_cast<double>(X.rows());
    const double pd = static_cast<double>(X.cols());
    const double max_col = std::sqrt(X.colwise().squaredNorm().maxCoeff() / nd);
    const double n_branch = std::sqrt(8.0 * std::log(nd / delta));
    const double p_branch = max_col * std::sqrt(8.0 * std::log(pd / delta));
    return std::max(n_branch, p_branch) / std::sqrt(nd);
}

}  // namespace auglasso
