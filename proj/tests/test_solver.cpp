#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "auglasso/io.hpp"
#include "auglasso/solver.hpp"
#include "test_util.hpp"

using namespace auglasso;
using testutil::approx_rel;

TEST_CASE("huber branches") {
    CHECK(huber(0.0) == 0.0);
    CHECK(huber(1.0) == 0.5);   // branch-equality point
    CHECK(huber(-1.0) == 0.5);
    CHECK(huber(3.0) == 2.5);
    CHECK(huber(-3.0) == 2.5);

    Rng rng(2);
    for (int k = 0; k < 200; ++k) {
        const double u = 4.0 * rng.normal();
        CHECK(huber(u) == huber(-u));
        CHECK(huber(u) >= 0.0);
        CHECK(huber(u) <= 0.5 * u * u + 1e-15);
    }
}

TEST_CASE("soft_threshold") {
    CHECK(soft_threshold(2.0, 0.5) == 1.5);
    CHECK(soft_threshold(-0.3, 0.5) == 0.0);
    CHECK(soft_threshold(-2.0, 0.5) == -1.5);
    Rng rng(3);
    for (int k = 0; k < 100; ++k) {
        const double x = 3.0 * rng.normal();
        CHECK(soft_threshold(x, 0.0) == x);
    }
}

TEST_CASE("objective_augmented hand cases") {
    Eigen::MatrixXd X(2, 2);
    X << 1.0, 2.0, -1.0, 0.5;
    Eigen::VectorXd y(2);
    y << 2.0, 0.0;
    const Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
    // (1/4) * ||y||^2 = 1
    CHECK(objective_augmented(X, y, zero2, zero2, PenaltyPair(1.0, 1.0)) == 1.0);

    // zero-residual dataset at beta*, theta = 0
    Rng rng(5);
    ContaminationSpec none;
    const Eigen::VectorXd beta = make_beta(4, 2, 3.0);
    const Dataset ds = generate(10, 4, CovarianceModel::identity(), beta, 0.0,
                                none, rng);
    const double obj = objective_augmented(ds.X, ds.y, beta,
                                           Eigen::VectorXd::Zero(10),
                                           PenaltyPair(1.0, 1.0));
    CHECK(obj == doctest::Approx(beta.lpNorm<1>()).epsilon(1e-12));

    CHECK_THROWS_AS(objective_augmented(X, y, Eigen::VectorXd::Zero(3), zero2,
                                        PenaltyPair(1.0, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("objective_augmented matches loop recomputation") {
    Rng rng(7);
    for (int k = 0; k < 20; ++k) {
        const Eigen::MatrixXd X = testutil::random_matrix(8, 5, rng);
        const Eigen::VectorXd y = testutil::random_vector(8, rng, 2.0);
        const Eigen::VectorXd beta = testutil::random_vector(5, rng);
        const Eigen::VectorXd theta = testutil::random_vector(8, rng);
        const PenaltyPair pen(0.2 + rng.uniform01(), 0.1 + rng.uniform01());
        const double got = objective_augmented(X, y, beta, theta, pen);
        const double want = testutil::objective_augmented_reference(
            X, y, beta, theta, pen.lambda_s, pen.lambda_o);
        CHECK(approx_rel(got, want, 1e-12));
    }
}

TEST_CASE("objective_huber hand cases") {
    // zero residuals
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3, 2);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd beta(2);
    beta << 1.0, -2.0;
    CHECK(objective_huber(X, y, beta, PenaltyPair(0.7, 1.0)) ==
          doctest::Approx(0.7 * 3.0).epsilon(1e-14));

    // n=1, y=3, X=0, beta=0: 1^2 * huber(3/1) = 2.5
    Eigen::MatrixXd X1 = Eigen::MatrixXd::Zero(1, 1);
    Eigen::VectorXd y1(1);
    y1 << 3.0;
    CHECK(objective_huber(X1, y1, Eigen::VectorXd::Zero(1), PenaltyPair(1.0, 1.0)) ==
          doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("profiling identity: huber equals min over theta") {
    Rng rng(11);
    for (int k = 0; k < 30; ++k) {
        const int n = 2 + static_cast<int>(rng.uniform_below(8));
        const int p = 1 + static_cast<int>(rng.uniform_below(5));
        const Eigen::MatrixXd X = testutil::random_matrix(n, p, rng);
        const Eigen::VectorXd y = testutil::random_vector(n, rng, 2.0);
        const Eigen::VectorXd beta = testutil::random_vector(p, rng);
        const PenaltyPair pen(0.05 + rng.uniform01(), 0.05 + rng.uniform01());

        const double hub = objective_huber(X, y, beta, pen);
        const Eigen::VectorXd theta = profile_theta(X, y, beta, pen.lambda_o);
        const double aug = objective_augmented(X, y, beta, theta, pen);
        CHECK(approx_rel(hub, aug, 1e-10));

        const double grid = testutil::objective_huber_grid_oracle(
            X, y, beta, pen.lambda_s, pen.lambda_o);
        CHECK(std::abs(hub - grid) <= 1e-6 * (1.0 + std::abs(hub)));
    }
}

TEST_CASE("profile_theta closed form and optimality probes") {
    // zero residual -> zero theta
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3, 1);
    CHECK(profile_theta(X, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(1), 1.0)
              .cwiseAbs()
              .maxCoeff() == 0.0);

    // n=4, lambda_o=1, r1=4: soft(4/2, 1) = 1
    Eigen::MatrixXd X4 = Eigen::MatrixXd::Zero(4, 1);
    Eigen::VectorXd y4 = Eigen::VectorXd::Zero(4);
    y4[0] = 4.0;
    const Eigen::VectorXd th = profile_theta(X4, y4, Eigen::VectorXd::Zero(1), 1.0);
    CHECK(th[0] == doctest::Approx(1.0).epsilon(1e-14));

    // random probes never beat the profile
    Rng rng(13);
    const Eigen::MatrixXd Xr = testutil::random_matrix(6, 3, rng);
    const Eigen::VectorXd yr = testutil::random_vector(6, rng, 3.0);
    const Eigen::VectorXd beta = testutil::random_vector(3, rng);
    const PenaltyPair pen(0.4, 0.3);
    const Eigen::VectorXd best = profile_theta(Xr, yr, beta, pen.lambda_o);
    const double opt = objective_augmented(Xr, yr, beta, best, pen);
    for (int k = 0; k < 1000; ++k) {
        const Eigen::VectorXd probe = testutil::random_vector(6, rng, 2.0);
        CHECK(opt <= objective_augmented(Xr, yr, beta, probe, pen) + 1e-12);
    }
}

TEST_CASE("fit_cd: zero response gives the zero solution") {
    Dataset ds;
    ds.X = Eigen::MatrixXd::Random(12, 4);
    ds.y = Eigen::VectorXd::Zero(12);
    const FitResult fit = fit_cd(ds, PenaltyPair(0.1, 0.1));
    CHECK(fit.converged);
    CHECK(fit.beta_hat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(fit.theta_hat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(fit.objective == 0.0);
}

TEST_CASE("fit_cd: noiseless recovery against least squares on support") {
    Rng rng(17);
    ContaminationSpec none;
    const Eigen::VectorXd beta = make_beta(10, 3, 2.0);
    const Dataset ds = generate(200, 10, CovarianceModel::identity(), beta, 0.0,
                                none, rng);
    SolverConfig config;
    config.kkt_tol = 1e-10;
    config.max_sweeps = 300000;  // tiny penalties converge slowly
    const FitResult fit = fit_cd(ds, PenaltyPair(1e-6, 1e-6), config);
    CHECK(fit.converged);
    CHECK((fit.beta_hat - beta).cwiseAbs().maxCoeff() <= 1e-3);

    // independent oracle: exact least squares on the true support
    const Eigen::MatrixXd Xs = ds.X.leftCols(3);
    const Eigen::VectorXd ls = Xs.colPivHouseholderQr().solve(ds.y);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(fit.beta_hat[j] - ls[j]) <= 1e-3);
    }
    for (int j = 3; j < 10; ++j) {
        CHECK(std::abs(fit.beta_hat[j]) <= 1e-3);
    }
}

TEST_CASE("fit_cd: monotone descent and KKT certificate") {
    Rng rng(19);
    const Dataset ds = testutil::random_instance(40, 12, rng);
    SolverConfig config;
    config.record_trace = true;
    const FitResult fit = fit_cd(ds, PenaltyPair(0.3, 0.25), config);
    CHECK(fit.converged);
    CHECK(fit.kkt_residual <= config.kkt_tol);
    REQUIRE(fit.objective_trace.size() >= 2);
    for (std::size_t k = 1; k < fit.objective_trace.size(); ++k) {
        CHECK(fit.objective_trace[k] <=
              fit.objective_trace[k - 1] +
                  1e-12 * (1.0 + std::abs(fit.objective_trace[k - 1])));
    }
    CHECK(approx_rel(fit.objective,
                     objective_augmented(ds.X, ds.y, fit.beta_hat, fit.theta_hat,
                                         PenaltyPair(0.3, 0.25)),
                     1e-10));
}

TEST_CASE("fit_cd: zero column is pinned and reported") {
    Dataset ds;
    Rng rng(23);
    ds.X = testutil::random_matrix(20, 4, rng);
    ds.X.col(2).setZero();
    ds.y = testutil::random_vector(20, rng, 2.0);
    const FitResult fit = fit_cd(ds, PenaltyPair(0.05, 0.5));
    CHECK(fit.beta_hat[2] == 0.0);
    REQUIRE(fit.zero_columns.size() == 1);
    CHECK(fit.zero_columns[0] == 2);
    CHECK(fit.converged);
}

TEST_CASE("fit_cd: exhausted sweeps reports converged=false, no throw") {
    Rng rng(29);
    const Dataset ds = testutil::random_instance(50, 10, rng);
    SolverConfig config;
    config.max_sweeps = 1;
    config.kkt_tol = 1e-14;
    const FitResult fit = fit_cd(ds, PenaltyPair(0.01, 0.01), config);
    CHECK_FALSE(fit.converged);
    CHECK(fit.sweeps_used == 1);
}

TEST_CASE("kkt_residual hand case and perturbation oracle") {
    // n=1, p=1, X=1, y=0, beta=0, theta=0: g=0, h=0
    Eigen::MatrixXd X(1, 1);
    X << 1.0;
    CHECK(kkt_residual(X, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1),
                       Eigen::VectorXd::Zero(1), PenaltyPair(1.0, 1.0)) == 0.0);

    Rng rng(31);
    for (int k = 0; k < 10; ++k) {
        const Dataset ds = testutil::random_instance(40, 8, rng);
        const PenaltyPair pen(0.2, 0.2);
        const FitResult fit = fit_cd(ds, pen);
        REQUIRE(fit.converged);
        CHECK(fit.kkt_residual <= 1e-8);

        // perturb the largest-magnitude coordinate of (beta, theta)
        Eigen::Index jb, jt;
        const double mb = fit.beta_hat.cwiseAbs().maxCoeff(&jb);
        const double mt = fit.theta_hat.cwiseAbs().maxCoeff(&jt);
        for (double delta : {0.1, -0.1}) {
            Eigen::VectorXd beta = fit.beta_hat;
            Eigen::VectorXd theta = fit.theta_hat;
            if (mb >= mt) {
                beta[jb] += delta;
            } else {
                theta[jt] += delta;
            }
            CHECK(kkt_residual(ds.X, ds.y, beta, theta, pen) > 1e-4);
        }
    }
}

TEST_CASE("fit_prox: zero response and cross-solver agreement") {
    Dataset zero;
    zero.X = Eigen::MatrixXd::Random(10, 3);
    zero.y = Eigen::VectorXd::Zero(10);
    CHECK(fit_prox(zero, PenaltyPair(0.1, 0.1)).beta_hat.cwiseAbs().maxCoeff() ==
          0.0);

    Rng rng(37);
    SolverConfig tight;
    tight.kkt_tol = 1e-11;
    tight.max_sweeps = 200000;
    tight.objective_tol = 0.0;
    for (int k = 0; k < 10; ++k) {
        const Dataset ds = testutil::random_instance(40, 15, rng);
        const PenaltyPair pen(0.05 + 0.95 * rng.uniform01(),
                              0.05 + 0.95 * rng.uniform01());
        const FitResult cd = fit_cd(ds, pen, tight);
        const FitResult px = fit_prox(ds, pen, tight);
        REQUIRE(cd.converged);
        REQUIRE(px.converged);
        CHECK((cd.beta_hat - px.beta_hat).cwiseAbs().maxCoeff() <= 1e-6);

        // mutual optimality in the profiled objective
        const double hub_cd = objective_huber(ds.X, ds.y, cd.beta_hat, pen);
        const double hub_px = objective_huber(ds.X, ds.y, px.beta_hat, pen);
        CHECK(hub_px <= hub_cd + 1e-9);
        CHECK(hub_cd <= hub_px + 1e-9);
    }
}

TEST_CASE("fit dispatches on config.algorithm") {
    Rng rng(41);
    const Dataset ds = testutil::random_instance(30, 6, rng);
    SolverConfig config;
    config.algorithm = Algorithm::proximal_gradient;
    const FitResult via_fit = fit(ds, PenaltyPair(0.3, 0.3), config);
    const FitResult direct = fit_prox(ds, PenaltyPair(0.3, 0.3), config);
    CHECK(via_fit.beta_hat == direct.beta_hat);
}

TEST_CASE("objective_augmented is jointly convex (probe)") {
    Rng rng(43);
    const Eigen::MatrixXd X = testutil::random_matrix(10, 5, rng);
    const Eigen::VectorXd y = testutil::random_vector(10, rng, 2.0);
    const PenaltyPair pen(0.4, 0.3);
    for (int k = 0; k < 200; ++k) {
        const Eigen::VectorXd b1 = testutil::random_vector(5, rng);
        const Eigen::VectorXd t1 = testutil::random_vector(10, rng);
        const Eigen::VectorXd b2 = testutil::random_vector(5, rng);
        const Eigen::VectorXd t2 = testutil::random_vector(10, rng);
        const double t = rng.uniform01();
        const double mix = objective_augmented(
            X, y, t * b1 + (1 - t) * b2, t * t1 + (1 - t) * t2, pen);
        const double bound = t * objective_augmented(X, y, b1, t1, pen) +
                             (1 - t) * objective_augmented(X, y, b2, t2, pen);
        CHECK(mix <= bound + 1e-10);
    }
}

TEST_CASE("huber smooth part: finite differences match the analytic gradient") {
    Rng rng(47);
    const int n = 12, p = 6;
    const Eigen::MatrixXd X = testutil::random_matrix(n, p, rng);
    const Eigen::VectorXd y = testutil::random_vector(n, rng, 3.0);
    const PenaltyPair pen(0.3, 0.4);
    const double clip = pen.lambda_o * std::sqrt(static_cast<double>(n));

    auto smooth = [&](const Eigen::VectorXd& beta) {
        return objective_huber(X, y, beta, pen) - pen.lambda_s * beta.lpNorm<1>();
    };

    for (int k = 0; k < 100; ++k) {
        const Eigen::VectorXd beta = testutil::random_vector(p, rng);
        Eigen::VectorXd r = y - X * beta;
        for (int i = 0; i < n; ++i) r[i] = std::clamp(r[i], -clip, clip);
        const Eigen::VectorXd analytic = -(X.transpose() * r) / n;

        Eigen::VectorXd fd(p);
        for (int j = 0; j < p; ++j) {
            const double h = 1e-6 * (1.0 + std::abs(beta[j]));
            Eigen::VectorXd hi = beta, lo = beta;
            hi[j] += h;
            lo[j] -= h;
            fd[j] = (smooth(hi) - smooth(lo)) / (2.0 * h);
        }
        const double scale = 1.0 + analytic.cwiseAbs().maxCoeff();
        CHECK((fd - analytic).cwiseAbs().maxCoeff() <= 1e-5 * scale);
    }
}

TEST_CASE("PenaltyPair invariants") {
    CHECK_THROWS_AS(PenaltyPair(-0.1, 0.2), std::invalid_argument);
    CHECK(PenaltyPair(0.4, 0.2).gamma() == doctest::Approx(2.0));
    const PenaltyPair zero(0.0, 0.0);
    CHECK_FALSE(zero.valid());
    CHECK_THROWS_AS(zero.gamma(), std::domain_error);

    Rng rng(53);
    Dataset ds = testutil::random_instance(10, 3, rng);
    CHECK_THROWS_AS(fit_cd(ds, zero), std::invalid_argument);
}

TEST_CASE("FitResult JSON round trip") {
    Rng rng(59);
    const Dataset ds = testutil::random_instance(15, 4, rng);
    const FitResult fit = fit_cd(ds, PenaltyPair(0.2, 0.2));
    const FitResult back = fit_result_from_json(fit_result_to_json(fit));
    CHECK(back.beta_hat == fit.beta_hat);
    CHECK(back.theta_hat == fit.theta_hat);
    CHECK(back.objective == fit.objective);
    CHECK(back.kkt_residual == fit.kkt_residual);
    CHECK(back.sweeps_used == fit.sweeps_used);
    CHECK(back.converged == fit.converged);
}
