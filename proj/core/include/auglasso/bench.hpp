#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "auglasso/model.hpp"
#include "auglasso/solver.hpp"

namespace auglasso {

struct LambdaRule {
    enum class Kind { theorem3, experiment, empirical, fixed };
    Kind kind = Kind::experiment;
    double delta = 0.1;       // theorem3/empirical; also the o = 0 fallback
    double lambda_s = 0.0;    // fixed
    double lambda_o = 0.0;    // fixed
};

struct ExperimentConfig {
    int n = 1000;
    int p = 100;
    std::vector<int> s_values = {5, 15, 25};
    std::vector<int> o_values;            // default: 0, 5, ..., floor(n/4)
    double sigma = 1.0;
    double amplitude = 10.0;
    CovarianceModel covariance = CovarianceModel::identity();
    LambdaRule lambda_rule;
    int repetitions = 20;
    std::uint64_t master_seed = 20200527;
    SolverConfig solver;

    ContaminationSpec::Mechanism mechanism =
        ContaminationSpec::Mechanism::sign_flip_shift;
    ContaminationSpec::IndexRule index_rule =
        ContaminationSpec::IndexRule::first_o;
    std::optional<double> outlier_magnitude;  // defaults to amplitude

    std::vector<int> resolved_o_values() const;
    void validate() const;
};

struct TrialRecord {
    int n = 0, p = 0, s = 0, o = 0;
    double eps = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    double lambda_s = 0.0, lambda_o = 0.0;
    double err_mahalanobis = 0.0;
    double err_l2 = 0.0;
    double err_l1 = 0.0;
    double theta_err_l2 = 0.0;
    double support_f1 = 0.0;  // diagnostic only, never an acceptance metric
    double kkt_residual = 0.0;
    int sweeps = 0;
    bool converged = false;
    double runtime_ms = 0.0;
};

/// True when every field except runtime_ms matches bit-for-bit (runtime
/// is the one execution-dependent field).
bool same_results(const TrialRecord& a, const TrialRecord& b);

/// Resolves the penalty pair for a cell. For the experiment rule at o = 0
/// (where the formula is undefined) the theorem3 rule with rule.delta is
/// substituted; *substituted is set when the caller asks.
PenaltyPair resolve_penalties(const LambdaRule& rule, int n, int p, int s,
                              int o, double sigma,
                              bool* substituted = nullptr);

/// One Monte Carlo replication of cell (s, o). The trial seed is the pure
/// function derive_seed(master_seed, {s, o, rep}), so any execution order
/// produces identical records. sigma_half, when given, must equal the
/// symmetric square root of the cell covariance (metric evaluation only).
TrialRecord run_trial(const ExperimentConfig& config, int s, int o, int rep,
                      const Eigen::MatrixXd* sigma_half = nullptr);

/// Cartesian product of cells x repetitions; trials are embarrassingly
/// parallel and records come back in deterministic (s, o, rep) order
/// regardless of the thread count. Progress goes to *progress when set.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config,
                                        int threads = 1,
                                        std::ostream* progress = nullptr);

struct CellSummary {
    int s = 0, o = 0;
    double eps = 0.0;
    int count = 0;
    int n_converged = 0;
    double mean_l2 = 0.0, std_l2 = 0.0, sqrt_mse_l2 = 0.0;
    double mean_mahalanobis = 0.0, std_mahalanobis = 0.0,
           sqrt_mse_mahalanobis = 0.0;
};

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool degenerate = false;  // zero variance in y: r2 = 1 by convention
};

/// Ordinary least squares of sqrt-MSE (l2 error) against eps for a fixed
/// sparsity; needs at least 3 eps points.
LineFit linear_fit_sqrt_mse(const std::vector<CellSummary>& summary, int s);

/// CSV columns, exactly:
/// n,p,s,o,eps,rep,seed,lambda_s,lambda_o,err_mahalanobis,err_l2,err_l1,
/// theta_err_l2,support_f1,kkt_residual,sweeps,converged,runtime_ms
void emit_csv(const std::vector<TrialRecord>& records, const std::string& path);
std::vector<TrialRecord> parse_csv(const std::string& path);

void emit_summary_json(const std::vector<CellSummary>& summary,
                       const std::string& path,
                       const std::vector<std::string>& notes = {});
void emit_linefits_json(const std::vector<std::pair<int, LineFit>>& fits,
                        const std::string& path);

/// Parses the bench config-file format (JSON mirroring ExperimentConfig;
/// see the repository README for the field list). Unknown fields are
/// rejected; eps_values may be given instead of o_values.
ExperimentConfig experiment_config_from_json(const std::string& text);

}  // namespace auglasso
