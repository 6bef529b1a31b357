#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "auglasso/rng.hpp"

namespace auglasso {

/// Transfer principle constants: ||Xv/sqrt(n)|| >= a1 ||S^{1/2}v|| - a2 ||v||_1.
struct TpConstants {
    double a1 = 0.0;
    double a2 = 0.0;
    bool clamped = false;  // set when the Theorem 2 formula left (0,1)
};

/// Incoherence constants:
/// |u' X v / sqrt(n)| <= b1 ||S^{1/2}v|| ||u||_2 + b2 ||v||_1 ||u||_2 + b3 ||S^{1/2}v|| ||u||_1.
struct IpConstants {
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
};

/// Augmented transfer constants:
/// ||Xv/sqrt(n) + u|| >= c1 ||[S^{1/2}v; u]|| - c2 ||v||_1 - c3 ||u||_1.
struct AtpConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    bool vacuous = false;  // c1 <= 0: the inequality holds trivially
};

struct Theorem2Constants {
    TpConstants tp;
    IpConstants ip;
    AtpConstants atp;
};

/// Explicit high-probability constants for a Gaussian design with unit
/// diagonal covariance; requires n >= 100 and delta in (0, 1/7).
Theorem2Constants theorem2_constants(int n, int p, double delta);

/// Which ATP combination constants to use: the supplement lemma's
/// (c2 = a2 + b2/alpha, c3 = b3/alpha) or the main-text variant with a
/// factor of two on the incoherence terms.
enum class CombineRule { supplement, main_text };

/// TP + IP => ATP with c1 = sqrt(a1^2 - b1 - alpha^2); requires
/// 0 < alpha < sqrt(a1^2 - b1).
AtpConstants combine_atp(const TpConstants& tp, const IpConstants& ip,
                         double alpha, CombineRule rule = CombineRule::supplement);

enum class Property { TP, IP, ATP, RE };

struct CertReport {
    Property property = Property::TP;
    std::string constants;        // human-readable constants used
    long n_samples = 0;
    long n_violations = 0;        // sampled points with slack < 0
    double min_slack = 0.0;
    Eigen::VectorXd worst_v;
    Eigen::VectorXd worst_u;      // empty for TP

    /// Associative merge for sharded sampling: counts add, min_slack and
    /// the worst witness take the minimum side.
    void merge(const CertReport& other);
};

/// Directed-sampling mixture. check_* draws N test points as: coordinate
/// basis vectors (when enabled, up to N/4), k-sparse Gaussian vectors for
/// k cycling through sparse_ks, and dense Gaussians for the remainder;
/// the adversarial stage then runs projected (sub)gradient refinement
/// from the worst sampled points. Reports say "no violation found", never
/// "certified": the quantifiers range over all of R^{p+n}.
struct SamplerSpec {
    std::vector<int> sparse_ks = {1, 2, 5};
    bool include_basis = true;
    int adversarial_starts = 10;
    int adversarial_steps = 50;
};

// Pointwise slacks (negative = violation); exposed for tests and tooling.
double tp_slack(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma_half,
                const TpConstants& consts, const Eigen::VectorXd& v);
double ip_slack(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma_half,
                const IpConstants& consts, const Eigen::VectorXd& v,
                const Eigen::VectorXd& u);
double atp_slack(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma_half,
                 const AtpConstants& consts, const Eigen::VectorXd& v,
                 const Eigen::VectorXd& u);

CertReport check_tp(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma,
                    const TpConstants& consts, const SamplerSpec& sampler,
                    int n_samples, Rng& rng);
CertReport check_ip(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma,
                    const IpConstants& consts, const SamplerSpec& sampler,
                    int n_samples, Rng& rng);
CertReport check_atp(const Eigen::MatrixXd& X, const Eigen::MatrixXd& sigma,
                     const AtpConstants& consts, const SamplerSpec& sampler,
                     int n_samples, Rng& rng);

/// Sampled upper bound on the RE(s, c0) constant of Sigma: minimum of
/// ||Sigma^{1/2} v||_2 / ||v_J||_2 over random cone vectors (|J| = s,
/// v_J Gaussian, off-support mass at t*c0*||v_J||_1 for t in {0, 0.5, 1}).
/// A heuristic upper bound, not a certificate.
double re_estimate(const Eigen::MatrixXd& sigma, int s, double c0,
                   int n_samples, Rng& rng);

struct WidthEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
};

/// Monte Carlo estimate of E ||Sigma^{1/2} xi||_inf over standard
/// Gaussian xi — the Gaussian width of Sigma^{1/2} B_1^p.
WidthEstimate gaussian_width_b1(const Eigen::MatrixXd& sigma, int n_samples,
                                Rng& rng);

struct WidthBound {
    double value = 0.0;
    bool vacuous = false;  // p == 1: log 1 = 0 makes the bound empty
};

/// max_j sqrt(Sigma_jj) * sqrt(2 log p).
WidthBound width_bound(const Eigen::MatrixXd& sigma);

struct ConditionReport {
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // lhs / rhs (0 when rhs is infinite)
};

/// Evaluates s/kappa^2 + o <= c1^2 / (400 (c2 v c3 v 5 b2/c1)^2).
ConditionReport theorem1_condition(int s, int o, double kappa,
                                   const AtpConstants& atp, double b2);

/// (24 lambda / c1^2) max(2 c2/c1, b3/c1^2) (s/kappa^2 + 7o)
///   + 5 lambda sqrt(s) / (6 c1^2 kappa).
double theorem1_bound(double lambda, int s, int o, double kappa,
                      const AtpConstants& atp, double b3);

}  // namespace auglasso
