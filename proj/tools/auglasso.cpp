// auglasso CLI: gen / fit / certify / bench subcommands.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "auglasso/bench.hpp"
#include "auglasso/cert.hpp"
#include "auglasso/io.hpp"
#include "auglasso/model.hpp"
#include "auglasso/solver.hpp"
#include "auglasso/tuning.hpp"

using namespace auglasso;

namespace {

// "identity" | "ar1:<rho>" | "equi:<rho>" | "csv:<path>"
CovarianceModel parse_cov_spec(const std::string& spec) {
    if (spec == "identity") return CovarianceModel::identity();
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string tail =
        colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "ar1") return CovarianceModel::ar1(std::stod(tail));
    if (head == "equi") return CovarianceModel::equicorrelated(std::stod(tail));
    if (head == "csv") {
        return CovarianceModel::explicit_matrix(read_matrix_csv(tail));
    }
    throw CLI::ValidationError("--sigma/--cov",
                               "expected identity|ar1:<rho>|equi:<rho>|csv:<path>");
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(std::stod(field));
    return out;
}

void write_or_print(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
    out << text << '\n';
}

int run_gen(int n, int p, int s, double amplitude, double sigma,
            const std::string& cov_spec, int outliers,
            const std::string& mechanism, double magnitude,
            const std::string& index_rule, std::uint64_t seed,
            const std::string& out_prefix) {
    ContaminationSpec spec;
    spec.o = outliers;
    spec.magnitude = magnitude;
    if (mechanism == "fixed") {
        spec.mechanism = ContaminationSpec::Mechanism::fixed_shift;
    } else if (mechanism == "signflip") {
        spec.mechanism = ContaminationSpec::Mechanism::sign_flip_shift;
    } else {
        throw CLI::ValidationError("--mechanism", "expected fixed|signflip");
    }
    if (index_rule == "first") {
        spec.index_rule = ContaminationSpec::IndexRule::first_o;
    } else if (index_rule == "random") {
        spec.index_rule = ContaminationSpec::IndexRule::random;
    } else {
        throw CLI::ValidationError("--index-rule", "expected first|random");
    }

    Rng rng(seed);
    const Dataset ds = generate(n, p, parse_cov_spec(cov_spec),
                                make_beta(p, s, amplitude), sigma, spec, rng);
    save_dataset(ds, out_prefix + ".csv", out_prefix + ".json", seed);
    std::cerr << "wrote " << out_prefix << ".csv and " << out_prefix
              << ".json (n=" << n << ", p=" << p << ", s=" << s
              << ", o=" << outliers << ")\n";
    return 0;
}

PenaltyPair resolve_cli_lambda(const std::string& rule, const Dataset& ds,
                               double delta, std::optional<double> sigma_flag,
                               std::optional<int> s_flag,
                               std::optional<int> o_flag) {
    const int n = static_cast<int>(ds.n());
    const int p = static_cast<int>(ds.p());
    auto sigma = [&]() {
        if (sigma_flag.has_value()) return *sigma_flag;
        if (ds.sigma_hint.has_value()) return *ds.sigma_hint;
        throw CLI::ValidationError("--lambda-rule",
                                   "noise level unknown: pass --sigma or a sidecar");
    };
    if (rule == "theorem3") {
        return lambda_theorem3(n, p, NoiseModel(sigma(), delta));
    }
    if (rule == "empirical") {
        return lambda_empirical(ds.X, std::nullopt, NoiseModel(sigma(), delta));
    }
    if (rule == "experiment") {
        int s = s_flag.value_or(
            ds.truth.has_value() ? static_cast<int>(ds.truth->support_S.size()) : -1);
        int o = o_flag.value_or(
            ds.truth.has_value() ? static_cast<int>(ds.truth->support_O.size()) : -1);
        if (s < 0 || o < 0) {
            throw CLI::ValidationError(
                "--lambda-rule", "experiment rule needs --s and --o (or a sidecar)");
        }
        return lambda_experiment(n, p, s, o);
    }
    if (rule.rfind("fixed:", 0) == 0) {
        const std::vector<double> values = parse_values(rule.substr(6));
        if (values.size() != 2) {
            throw CLI::ValidationError("--lambda-rule",
                                       "expected fixed:<lambda_s>,<lambda_o>");
        }
        return PenaltyPair(values[0], values[1]);
    }
    throw CLI::ValidationError(
        "--lambda-rule", "expected theorem3|experiment|empirical|fixed:<values>");
}

int run_fit(const std::string& data_path, const std::string& sidecar,
            const std::string& rule, double delta,
            std::optional<double> sigma_flag, std::optional<int> s_flag,
            std::optional<int> o_flag, const std::string& algorithm,
            double kkt_tol, int max_sweeps, const std::string& out_path) {
    std::optional<std::string> side;
    if (!sidecar.empty()) {
        side = sidecar;
    } else {
        // try <data>.json next to <data>.csv
        std::filesystem::path guess(data_path);
        guess.replace_extension(".json");
        if (std::filesystem::exists(guess)) side = guess.string();
    }
    const Dataset ds = load_dataset(data_path, side);
    const PenaltyPair pen =
        resolve_cli_lambda(rule, ds, delta, sigma_flag, s_flag, o_flag);

    SolverConfig config;
    config.kkt_tol = kkt_tol;
    config.max_sweeps = max_sweeps;
    if (algorithm == "cd") {
        config.algorithm = Algorithm::coordinate_descent;
    } else if (algorithm == "prox") {
        config.algorithm = Algorithm::proximal_gradient;
    } else {
        throw CLI::ValidationError("--algorithm", "expected cd|prox");
    }

    const FitResult result = fit(ds, pen, config);
    std::cerr << "lambda_s=" << pen.lambda_s << " lambda_o=" << pen.lambda_o
              << " objective=" << result.objective
              << " kkt=" << result.kkt_residual << " sweeps="
              << result.sweeps_used << (result.converged ? "" : " (NOT converged)")
              << '\n';
    write_or_print(fit_result_to_json(result), out_path);
    return result.converged ? 0 : 3;
}

int run_certify(const std::string& matrix_path, const std::string& sigma_spec,
                const std::string& property, const std::string& constants,
                int samples, std::uint64_t seed, int re_s, double re_c0,
                const std::string& out_path) {
    const Eigen::MatrixXd X = read_matrix_csv(matrix_path);
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const Eigen::MatrixXd sigma = make_covariance(parse_cov_spec(sigma_spec), p);

    Theorem2Constants consts{};
    bool have_theorem2 = false;
    std::vector<double> explicit_values;
    if (constants.rfind("theorem2:", 0) == 0) {
        consts = theorem2_constants(n, p, std::stod(constants.substr(9)));
        have_theorem2 = true;
    } else if (constants.rfind("explicit:", 0) == 0) {
        explicit_values = parse_values(constants.substr(9));
    } else if (property != "re") {
        throw CLI::ValidationError("--constants",
                                   "expected theorem2:<delta>|explicit:<values>");
    }

    auto tp_consts = [&]() -> TpConstants {
        if (have_theorem2) return consts.tp;
        if (explicit_values.size() == 2 || explicit_values.size() == 8) {
            return TpConstants{explicit_values[0], explicit_values[1]};
        }
        throw CLI::ValidationError("--constants", "tp needs explicit:a1,a2");
    };
    auto ip_consts = [&]() -> IpConstants {
        if (have_theorem2) return consts.ip;
        if (explicit_values.size() == 3) {
            return IpConstants{explicit_values[0], explicit_values[1],
                               explicit_values[2]};
        }
        if (explicit_values.size() == 8) {
            return IpConstants{explicit_values[2], explicit_values[3],
                               explicit_values[4]};
        }
        throw CLI::ValidationError("--constants", "ip needs explicit:b1,b2,b3");
    };
    auto atp_consts = [&]() -> AtpConstants {
        if (have_theorem2) return consts.atp;
        if (explicit_values.size() == 3) {
            return AtpConstants{explicit_values[0], explicit_values[1],
                                explicit_values[2]};
        }
        if (explicit_values.size() == 8) {
            return AtpConstants{explicit_values[5], explicit_values[6],
                                explicit_values[7]};
        }
        throw CLI::ValidationError("--constants", "atp needs explicit:c1,c2,c3");
    };

    const SamplerSpec sampler;
    std::ostringstream out;
    bool any_violation = false;
    auto emit = [&](const CertReport& report) {
        if (out.tellp() > 0) out << '\n';
        out << cert_report_to_json(report);
        any_violation |= report.n_violations > 0;
    };

    Rng rng(seed);
    if (property == "tp" || property == "all") {
        emit(check_tp(X, sigma, tp_consts(), sampler, samples, rng));
    }
    if (property == "ip" || property == "all") {
        emit(check_ip(X, sigma, ip_consts(), sampler, samples, rng));
    }
    if (property == "atp" || property == "all") {
        emit(check_atp(X, sigma, atp_consts(), sampler, samples, rng));
    }
    if (property == "re" || property == "all") {
        const double kappa = re_estimate(sigma, re_s, re_c0, samples, rng);
        std::ostringstream re;
        re << "{\n  \"property\": \"re\",\n  \"s\": " << re_s
           << ",\n  \"c0\": " << re_c0 << ",\n  \"n_samples\": " << samples
           << ",\n  \"kappa_upper_bound\": " << format_double(kappa) << "\n}";
        if (out.tellp() > 0) out << '\n';
        out << re.str();
    }
    if (out.tellp() == 0) {
        throw CLI::ValidationError("--property", "expected tp|ip|atp|re|all");
    }
    write_or_print(out.str(), out_path);
    return any_violation ? 4 : 0;
}

int run_bench(const std::string& config_path, const std::string& out_dir,
              int reps_override, int threads) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config: " + config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    ExperimentConfig config = experiment_config_from_json(buffer.str());
    if (reps_override > 0) config.repetitions = reps_override;
    config.validate();

    std::filesystem::create_directories(out_dir);
    const std::vector<TrialRecord> records =
        run_experiment(config, threads, &std::cerr);
    const std::vector<CellSummary> summary = summarize(records);

    std::vector<std::string> notes;
    if (config.lambda_rule.kind == LambdaRule::Kind::experiment) {
        for (int o : config.resolved_o_values()) {
            if (o == 0) {
                notes.push_back(
                    "o=0 cells tuned by the theorem3 rule (delta=" +
                    std::to_string(config.lambda_rule.delta) +
                    "); the experiment rule is undefined at o=0");
                break;
            }
        }
    }

    const std::filesystem::path dir(out_dir);
    emit_csv(records, (dir / "records.csv").string());
    emit_summary_json(summary, (dir / "summary.json").string(), notes);

    std::vector<std::pair<int, LineFit>> fits;
    for (int s : config.s_values) {
        try {
            fits.emplace_back(s, linear_fit_sqrt_mse(summary, s));
        } catch (const std::invalid_argument&) {
            // fewer than 3 eps points: no line for this sparsity
        }
    }
    emit_linefits_json(fits, (dir / "linefits.json").string());
    std::cerr << "wrote records.csv, summary.json, linefits.json to "
              << out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"augmented-Lasso robust sparse regression toolkit"};
    app.require_subcommand(1);

    // gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    int n = 1000, p = 100, s = 5, outliers = 0;
    double amplitude = 10.0, sigma = 1.0, magnitude = 10.0;
    std::string cov_spec = "identity", mechanism = "signflip",
                index_rule = "first", out_prefix = "dataset";
    std::uint64_t seed = 1;
    gen->add_option("--n", n, "observations");
    gen->add_option("--p", p, "dimension");
    gen->add_option("--s", s, "sparsity of beta*");
    gen->add_option("--amplitude", amplitude, "value of active beta* entries");
    gen->add_option("--sigma", sigma, "noise standard deviation");
    gen->add_option("--cov", cov_spec, "identity|ar1:<rho>|equi:<rho>|csv:<path>");
    gen->add_option("--outliers", outliers, "number of corrupted labels");
    gen->add_option("--mechanism", mechanism, "fixed|signflip");
    gen->add_option("--magnitude", magnitude, "contamination size (theta scale)");
    gen->add_option("--index-rule", index_rule, "first|random");
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--out", out_prefix, "output prefix (csv + json sidecar)");

    // fit ---------------------------------------------------------------
    auto* fitcmd = app.add_subcommand("fit", "fit the augmented Lasso");
    std::string data_path, sidecar, lambda_rule = "theorem3",
                algorithm = "cd", fit_out;
    double delta = 0.1, kkt_tol = 1e-8;
    int max_sweeps = 10000;
    std::optional<double> sigma_flag;
    std::optional<int> s_flag, o_flag;
    fitcmd->add_option("--data", data_path, "dataset CSV (x1..xp,y)")->required();
    fitcmd->add_option("--sidecar", sidecar, "JSON sidecar (default: <data>.json)");
    fitcmd->add_option("--lambda-rule", lambda_rule,
                       "theorem3|experiment|empirical|fixed:<ls>,<lo>");
    fitcmd->add_option("--delta", delta, "tolerance level for tuning rules");
    fitcmd->add_option("--sigma", sigma_flag, "noise level override");
    fitcmd->add_option("--s", s_flag, "sparsity (experiment rule)");
    fitcmd->add_option("--o", o_flag, "outlier count (experiment rule)");
    fitcmd->add_option("--algorithm", algorithm, "cd|prox");
    fitcmd->add_option("--kkt-tol", kkt_tol, "KKT convergence tolerance");
    fitcmd->add_option("--max-sweeps", max_sweeps, "sweep budget");
    fitcmd->add_option("--out", fit_out, "result JSON path (default stdout)");

    // certify -------------------------------------------------------------
    auto* certify = app.add_subcommand("certify", "check TP/IP/ATP/RE on a matrix");
    std::string matrix_path, sigma_spec = "identity", property = "all",
                constants, cert_out;
    int samples = 512, re_s = 5;
    double re_c0 = 5.0;
    std::uint64_t cert_seed = 1;
    certify->add_option("--matrix", matrix_path, "design matrix CSV")->required();
    certify->add_option("--sigma", sigma_spec, "identity|ar1:<rho>|equi:<rho>|csv:<path>");
    certify->add_option("--property", property, "tp|ip|atp|re|all");
    certify->add_option("--constants", constants, "theorem2:<delta>|explicit:<values>");
    certify->add_option("--samples", samples, "sampled test points");
    certify->add_option("--seed", cert_seed, "RNG seed");
    certify->add_option("--re-s", re_s, "RE sparsity");
    certify->add_option("--re-c0", re_c0, "RE cone constant");
    certify->add_option("--out", cert_out, "report path (default stdout)");

    // bench ---------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "run a Monte Carlo experiment grid");
    std::string config_path, bench_out = "bench_out";
    int reps_override = 0, threads = 1;
    bench->add_option("--config", config_path, "experiment config JSON")->required();
    bench->add_option("--out", bench_out, "output directory");
    bench->add_option("--reps", reps_override, "override repetitions");
    bench->add_option("--threads", threads, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return run_gen(n, p, s, amplitude, sigma, cov_spec, outliers,
                           mechanism, magnitude, index_rule, seed, out_prefix);
        }
        if (fitcmd->parsed()) {
            return run_fit(data_path, sidecar, lambda_rule, delta, sigma_flag,
                           s_flag, o_flag, algorithm, kkt_tol, max_sweeps,
                           fit_out);
        }
        if (certify->parsed()) {
            return run_certify(matrix_path, sigma_spec, property, constants,
                               samples, cert_seed, re_s, re_c0, cert_out);
        }
        if (bench->parsed()) {
            return run_bench(config_path, bench_out, reps_override, threads);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
