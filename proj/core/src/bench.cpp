#include "auglasso/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "auglasso/io.hpp"
#include "auglasso/linalg.hpp"
#include "auglasso/tuning.hpp"

namespace auglasso {

using nlohmann::json;

std::vector<int> ExperimentConfig::resolved_o_values() const {
    if (!o_values.empty()) return o_values;
    std::vector<int> out;
    for (int o = 0; o <= n / 4; o += 5) out.push_back(o);
    return out;
}

void ExperimentConfig::validate() const {
    if (n < 1 || p < 1) throw std::invalid_argument("need n >= 1 and p >= 1");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (s_values.empty()) throw std::invalid_argument("s_values must be nonempty");
    for (int s : s_values) {
        if (s < 0 || s > p) throw std::invalid_argument("s_values must lie in [0, p]");
    }
    for (int o : resolved_o_values()) {
        if (o < 0 || o > n) throw std::invalid_argument("o_values must lie in [0, n]");
        if (o == n && lambda_rule.kind == LambdaRule::Kind::experiment) {
            throw std::invalid_argument(
                "experiment lambda rule is degenerate at o = n (log(n/o) = 0)");
        }
    }
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
}

bool same_results(const TrialRecord& a, const TrialRecord& b) {
    return a.n == b.n && a.p == b.p && a.s == b.s && a.o == b.o &&
           a.eps == b.eps && a.rep == b.rep && a.seed == b.seed &&
           a.lambda_s == b.lambda_s && a.lambda_o == b.lambda_o &&
           a.err_mahalanobis == b.err_mahalanobis && a.err_l2 == b.err_l2 &&
           a.err_l1 == b.err_l1 && a.theta_err_l2 == b.theta_err_l2 &&
           a.support_f1 == b.support_f1 && a.kkt_residual == b.kkt_residual &&
           a.sweeps == b.sweeps && a.converged == b.converged;
}

PenaltyPair resolve_penalties(const LambdaRule& rule, int n, int p, int s,
                              int o, double sigma, bool* substituted) {
    if (substituted != nullptr) *substituted = false;
    switch (rule.kind) {
        case LambdaRule::Kind::fixed:
            return PenaltyPair(rule.lambda_s, rule.lambda_o);
        case LambdaRule::Kind::theorem3:
            return lambda_theorem3(n, p, NoiseModel(sigma, rule.delta));
        case LambdaRule::Kind::experiment:
            if (o == 0) {
                if (substituted != nullptr) *substituted = true;
                return lambda_theorem3(n, p, NoiseModel(sigma, rule.delta));
            }
            return lambda_experiment(n, p, s, o);
        case LambdaRule::Kind::empirical:
            throw std::invalid_argument(
                "empirical rule needs the realized design; resolved in run_trial");
    }
    throw std::logic_error("unreachable lambda rule");
}

namespace {

double support_f1_score(const Eigen::VectorXd& beta_hat,
                        const std::vector<int>& support) {
    long tp = 0, fp = 0;
    std::vector<bool> in_support(beta_hat.size(), false);
    for (int j : support) in_support[j] = true;
    for (Eigen::Index j = 0; j < beta_hat.size(); ++j) {
        if (beta_hat[j] != 0.0) {
            if (in_support[j]) ++tp; else ++fp;
        }
    }
    const long fn = static_cast<long>(support.size()) - tp;
    if (tp + fp + fn == 0) return 1.0;  // both supports empty
    return 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& config, int s, int o, int rep,
                      const Eigen::MatrixXd* sigma_half) {
    const auto start = std::chrono::steady_clock::now();

    TrialRecord rec;
    rec.n = config.n;
    rec.p = config.p;
    rec.s = s;
    rec.o = o;
    rec.eps = static_cast<double>(o) / config.n;
    rec.rep = rep;
    rec.seed = derive_seed(config.master_seed,
                           {static_cast<std::uint64_t>(s),
                            static_cast<std::uint64_t>(o),
                            static_cast<std::uint64_t>(rep)});

    Rng rng(rec.seed);
    ContaminationSpec spec;
    spec.o = o;
    spec.mechanism = config.mechanism;
    spec.index_rule = config.index_rule;
    spec.magnitude = config.outlier_magnitude.value_or(config.amplitude);

    const Eigen::VectorXd beta_star = make_beta(config.p, s, config.amplitude);
    Dataset ds = generate(config.n, config.p, config.covariance, beta_star,
                          config.sigma, spec, rng);

    PenaltyPair penalties;
    if (config.lambda_rule.kind == LambdaRule::Kind::empirical) {
        penalties = lambda_empirical(
            ds.X, std::nullopt, NoiseModel(config.sigma, config.lambda_rule.delta));
    } else {
        penalties = resolve_penalties(config.lambda_rule, config.n, config.p, s,
                                      o, config.sigma);
    }
    rec.lambda_s = penalties.lambda_s;
    rec.lambda_o = penalties.lambda_o;

    const FitResult fit = fit_cd(ds, penalties, config.solver);
    rec.kkt_residual = fit.kkt_residual;
    rec.sweeps = fit.sweeps_used;
    rec.converged = fit.converged;

    const GroundTruth& truth = *ds.truth;
    const Eigen::VectorXd delta_beta = fit.beta_hat - truth.beta_star;
    rec.err_l2 = delta_beta.norm();
    rec.err_l1 = delta_beta.lpNorm<1>();
    rec.theta_err_l2 = (fit.theta_hat - truth.theta_star).norm();
    rec.support_f1 = support_f1_score(fit.beta_hat, truth.support_S);
    if (sigma_half != nullptr) {
        rec.err_mahalanobis = (*sigma_half * delta_beta).norm();
    } else {
        const Eigen::MatrixXd sigma = make_covariance(config.covariance, config.p);
        rec.err_mahalanobis = sigma.isIdentity(0.0)
                                  ? rec.err_l2
                                  : (symmetric_sqrt(sigma) * delta_beta).norm();
    }

    rec.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return rec;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config,
                                        int threads, std::ostream* progress) {
    config.validate();
    const std::vector<int> o_values = config.resolved_o_values();
    const std::size_t n_cells = config.s_values.size() * o_values.size();
    const std::size_t total = n_cells * config.repetitions;

    const Eigen::MatrixXd sigma = make_covariance(config.covariance, config.p);
    const Eigen::MatrixXd sigma_half =
        sigma.isIdentity(0.0) ? sigma : symmetric_sqrt(sigma);

    std::vector<TrialRecord> records(total);
    std::mutex progress_mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= total) return;
            const std::size_t cell = idx / config.repetitions;
            const int rep = static_cast<int>(idx % config.repetitions);
            const int s = config.s_values[cell / o_values.size()];
            const int o = o_values[cell % o_values.size()];
            records[idx] = run_trial(config, s, o, rep, &sigma_half);
            if (progress != nullptr && rep == config.repetitions - 1) {
                std::lock_guard<std::mutex> lock(progress_mutex);
                (*progress) << "cell s=" << s << " o=" << o << " done ("
                            << idx + 1 << "/" << total << " trials)\n";
            }
        }
    };

    threads = std::max(threads, 1);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return records;
}

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("summarize needs a nonempty record set");
    }
    std::map<std::pair<int, int>, std::vector<const TrialRecord*>> cells;
    for (const TrialRecord& rec : records) {
        cells[{rec.s, rec.o}].push_back(&rec);
    }
    std::vector<CellSummary> out;
    out.reserve(cells.size());
    for (const auto& [key, cell] : cells) {
        CellSummary sum;
        sum.s = key.first;
        sum.o = key.second;
        sum.eps = cell.front()->eps;
        sum.count = static_cast<int>(cell.size());
        double l2 = 0, l2_sq = 0, mh = 0, mh_sq = 0;
        for (const TrialRecord* rec : cell) {
            l2 += rec->err_l2;
            l2_sq += rec->err_l2 * rec->err_l2;
            mh += rec->err_mahalanobis;
            mh_sq += rec->err_mahalanobis * rec->err_mahalanobis;
            if (rec->converged) ++sum.n_converged;
        }
        const double count = sum.count;
        sum.mean_l2 = l2 / count;
        sum.mean_mahalanobis = mh / count;
        sum.sqrt_mse_l2 = std::sqrt(l2_sq / count);
        sum.sqrt_mse_mahalanobis = std::sqrt(mh_sq / count);
        if (sum.count > 1) {
            sum.std_l2 = std::sqrt(std::max(
                0.0, (l2_sq - count * sum.mean_l2 * sum.mean_l2) / (count - 1)));
            sum.std_mahalanobis = std::sqrt(std::max(
                0.0, (mh_sq - count * sum.mean_mahalanobis * sum.mean_mahalanobis) /
                         (count - 1)));
        }
        out.push_back(sum);
    }
    return out;
}

LineFit linear_fit_sqrt_mse(const std::vector<CellSummary>& summary, int s) {
    std::vector<std::pair<double, double>> points;
    for (const CellSummary& cell : summary) {
        if (cell.s == s) points.emplace_back(cell.eps, cell.sqrt_mse_l2);
    }
    if (points.size() < 3) {
        throw std::invalid_argument(
            "linear_fit_sqrt_mse needs at least 3 eps points for s = " +
            std::to_string(s));
    }
    const double count = static_cast<double>(points.size());
    double mean_x = 0, mean_y = 0;
    for (const auto& [x, y] : points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= count;
    mean_y /= count;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("all eps points coincide; cannot fit a line");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    if (syy == 0.0) {
        fit.r2 = 1.0;  // constant response: perfect (flat) fit by convention
        fit.degenerate = true;
    } else {
        double ss_res = 0;
        for (const auto& [x, y] : points) {
            const double e = y - (fit.intercept + fit.slope * x);
            ss_res += e * e;
        }
        fit.r2 = 1.0 - ss_res / syy;
    }
    return fit;
}

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "n,p,s,o,eps,rep,seed,lambda_s,lambda_o,err_mahalanobis,err_l2,"
           "err_l1,theta_err_l2,support_f1,kkt_residual,sweeps,converged,"
           "runtime_ms\n";
    for (const TrialRecord& r : records) {
        out << r.n << ',' << r.p << ',' << r.s << ',' << r.o << ','
            << format_double(r.eps) << ',' << r.rep << ',' << r.seed << ','
            << format_double(r.lambda_s) << ',' << format_double(r.lambda_o)
            << ',' << format_double(r.err_mahalanobis) << ','
            << format_double(r.err_l2) << ',' << format_double(r.err_l1) << ','
            << format_double(r.theta_err_l2) << ','
            << format_double(r.support_f1) << ','
            << format_double(r.kkt_residual) << ',' << r.sweeps << ','
            << (r.converged ? 1 : 0) << ',' << format_double(r.runtime_ms)
            << '\n';
    }
}

std::vector<TrialRecord> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("missing CSV header: " + path);
    }
    std::vector<TrialRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t end = line.find(',', start);
            if (end == std::string::npos) end = line.size();
            fields.push_back(line.substr(start, end - start));
            if (end == line.size()) break;
            start = end + 1;
        }
        if (fields.size() != 18) {
            throw std::runtime_error("expected 18 CSV fields, got " +
                                     std::to_string(fields.size()));
        }
        TrialRecord r;
        r.n = std::stoi(fields[0]);
        r.p = std::stoi(fields[1]);
        r.s = std::stoi(fields[2]);
        r.o = std::stoi(fields[3]);
        r.eps = std::strtod(fields[4].c_str(), nullptr);
        r.rep = std::stoi(fields[5]);
        r.seed = std::strtoull(fields[6].c_str(), nullptr, 10);
        r.lambda_s = std::strtod(fields[7].c_str(), nullptr);
        r.lambda_o = std::strtod(fields[8].c_str(), nullptr);
        r.err_mahalanobis = std::strtod(fields[9].c_str(), nullptr);
        r.err_l2 = std::strtod(fields[10].c_str(), nullptr);
        r.err_l1 = std::strtod(fields[11].c_str(), nullptr);
        r.theta_err_l2 = std::strtod(fields[12].c_str(), nullptr);
        r.support_f1 = std::strtod(fields[13].c_str(), nullptr);
        r.kkt_residual = std::strtod(fields[14].c_str(), nullptr);
        r.sweeps = std::stoi(fields[15]);
        r.converged = fields[16] == "1";
        r.runtime_ms = std::strtod(fields[17].c_str(), nullptr);
        records.push_back(r);
    }
    return records;
}

void emit_summary_json(const std::vector<CellSummary>& summary,
                       const std::string& path,
                       const std::vector<std::string>& notes) {
    json j;
    j["cells"] = json::array();
    for (const CellSummary& cell : summary) {
        json c;
        c["s"] = cell.s;
        c["o"] = cell.o;
        c["eps"] = cell.eps;
        c["count"] = cell.count;
        c["n_converged"] = cell.n_converged;
        c["mean_l2"] = cell.mean_l2;
        c["std_l2"] = cell.std_l2;
        c["sqrt_mse_l2"] = cell.sqrt_mse_l2;
        c["mean_mahalanobis"] = cell.mean_mahalanobis;
        c["std_mahalanobis"] = cell.std_mahalanobis;
        c["sqrt_mse_mahalanobis"] = cell.sqrt_mse_mahalanobis;
        j["cells"].push_back(c);
    }
    if (!notes.empty()) j["meta"]["notes"] = notes;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    const json j = json::parse(text);
    static const std::set<std::string> known = {
        "n", "p", "s_values", "o_values", "eps_values", "sigma", "amplitude",
        "covariance", "lambda_rule", "repetitions", "master_seed", "solver",
        "mechanism", "index_rule", "outlier_magnitude"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw std::invalid_argument("unknown bench config field: " + key);
        }
    }

    ExperimentConfig config;
    config.n = j.value("n", config.n);
    config.p = j.value("p", config.p);
    if (j.contains("s_values")) config.s_values = j["s_values"].get<std::vector<int>>();
    if (j.contains("o_values") && j.contains("eps_values")) {
        throw std::invalid_argument("give o_values or eps_values, not both");
    }
    if (j.contains("o_values")) {
        config.o_values = j["o_values"].get<std::vector<int>>();
    } else if (j.contains("eps_values")) {
        for (double eps : j["eps_values"].get<std::vector<double>>()) {
            config.o_values.push_back(
                static_cast<int>(std::lround(eps * config.n)));
        }
    }
    config.sigma = j.value("sigma", config.sigma);
    config.amplitude = j.value("amplitude", config.amplitude);
    config.repetitions = j.value("repetitions", config.repetitions);
    config.master_seed = j.value("master_seed", config.master_seed);
    if (j.contains("outlier_magnitude")) {
        config.outlier_magnitude = j["outlier_magnitude"].get<double>();
    }

    if (j.contains("covariance")) {
        const json& cov = j["covariance"];
        const std::string kind = cov.at("kind").get<std::string>();
        if (kind == "identity") {
            config.covariance = CovarianceModel::identity();
        } else if (kind == "ar1") {
            config.covariance = CovarianceModel::ar1(cov.at("rho").get<double>());
        } else if (kind == "equicorrelated") {
            config.covariance =
                CovarianceModel::equicorrelated(cov.at("rho").get<double>());
        } else if (kind == "explicit") {
            config.covariance = CovarianceModel::explicit_matrix(
                read_matrix_csv(cov.at("path").get<std::string>()));
        } else {
            throw std::invalid_argument("unknown covariance kind: " + kind);
        }
    }

    if (j.contains("lambda_rule")) {
        const json& rule = j["lambda_rule"];
        const std::string name = rule.at("rule").get<std::string>();
        if (name == "theorem3") {
            config.lambda_rule.kind = LambdaRule::Kind::theorem3;
        } else if (name == "experiment") {
            config.lambda_rule.kind = LambdaRule::Kind::experiment;
        } else if (name == "empirical") {
            config.lambda_rule.kind = LambdaRule::Kind::empirical;
        } else if (name == "fixed") {
            config.lambda_rule.kind = LambdaRule::Kind::fixed;
            config.lambda_rule.lambda_s = rule.at("lambda_s").get<double>();
            config.lambda_rule.lambda_o = rule.at("lambda_o").get<double>();
        } else {
            throw std::invalid_argument("unknown lambda rule: " + name);
        }
        config.lambda_rule.delta = rule.value("delta", config.lambda_rule.delta);
    }

    if (j.contains("mechanism")) {
        const std::string mech = j["mechanism"].get<std::string>();
        if (mech == "fixed_shift") {
            config.mechanism = ContaminationSpec::Mechanism::fixed_shift;
        } else if (mech == "sign_flip_shift") {
            config.mechanism = ContaminationSpec::Mechanism::sign_flip_shift;
        } else {
            throw std::invalid_argument("unknown mechanism: " + mech);
        }
    }
    if (j.contains("index_rule")) {
        const std::string rule = j["index_rule"].get<std::string>();
        if (rule == "first_o") {
            config.index_rule = ContaminationSpec::IndexRule::first_o;
        } else if (rule == "random") {
            config.index_rule = ContaminationSpec::IndexRule::random;
        } else {
            throw std::invalid_argument("unknown index rule: " + rule);
        }
    }

    if (j.contains("solver")) {
        const json& solver = j["solver"];
        if (solver.contains("algorithm")) {
            const std::string algo = solver["algorithm"].get<std::string>();
            if (algo == "cd") {
                config.solver.algorithm = Algorithm::coordinate_descent;
            } else if (algo == "prox") {
                config.solver.algorithm = Algorithm::proximal_gradient;
            } else {
                throw std::invalid_argument("unknown algorithm: " + algo);
            }
        }
        config.solver.max_sweeps = solver.value("max_sweeps", config.solver.max_sweeps);
        config.solver.kkt_tol = solver.value("kkt_tol", config.solver.kkt_tol);
        config.solver.objective_tol =
            solver.value("objective_tol", config.solver.objective_tol);
    }
    return config;
}

void emit_linefits_json(const std::vector<std::pair<int, LineFit>>& fits,
                        const std::string& path) {
    json j = json::array();
    for (const auto& [s, fit] : fits) {
        json f;
        f["s"] = s;
        f["slope"] = fit.slope;
        f["intercept"] = fit.intercept;
        f["r2"] = fit.r2;
        f["degenerate"] = fit.degenerate;
        j.push_back(f);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace auglasso
