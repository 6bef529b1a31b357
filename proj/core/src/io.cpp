#include "auglasso/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace auglasso {

using nlohmann::json;

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

std::vector<double> split_numeric(const std::string& line) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t end = line.find(',', start);
        if (end == std::string::npos) end = line.size();
        const std::string field = line.substr(start, end - start);
        if (!field.empty()) {
            char* tail = nullptr;
            const double value = std::strtod(field.c_str(), &tail);
            if (tail == field.c_str()) {
                throw std::runtime_error("non-numeric CSV field: " + field);
            }
            out.push_back(value);
        }
        if (end == line.size()) break;
        start = end + 1;
    }
    return out;
}

bool starts_numeric(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos) return false;
    const char c = line[pos];
    return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.';
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& csv_path,
                  const std::string& sidecar_path,
                  std::optional<std::uint64_t> seed) {
    auto out = open_out(csv_path);
    const auto n = ds.n();
    const auto p = ds.p();
    for (Eigen::Index j = 0; j < p; ++j) out << 'x' << (j + 1) << ',';
    out << "y\n";
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            out << format_double(ds.X(i, j)) << ',';
        }
        out << format_double(ds.y[i]) << '\n';
    }

    json side;
    side["n"] = n;
    side["p"] = p;
    if (seed.has_value()) side["seed"] = *seed;
    if (ds.sigma_hint.has_value()) side["sigma"] = *ds.sigma_hint;
    if (ds.truth.has_value()) {
        const GroundTruth& t = *ds.truth;
        side["s"] = t.support_S.size();
        side["o"] = t.support_O.size();
        side["sigma"] = t.sigma;
        side["beta_star"] = vector_to_json(t.beta_star);
        side["theta_star"] = vector_to_json(t.theta_star);
        side["support_S"] = t.support_S;
        side["support_O"] = t.support_O;
        side["xi"] = vector_to_json(t.xi);
    }
    auto sout = open_out(sidecar_path);
    sout << side.dump(2) << '\n';
}

Dataset load_dataset(const std::string& csv_path,
                     const std::optional<std::string>& sidecar_path) {
    auto in = open_in(csv_path);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && !starts_numeric(line)) {
            first = false;
            continue;  // header
        }
        first = false;
        rows.push_back(split_numeric(line));
    }
    if (rows.empty()) throw std::runtime_error("empty dataset CSV: " + csv_path);
    const std::size_t width = rows.front().size();
    if (width < 2) throw std::runtime_error("dataset CSV needs x columns and y");

    Dataset ds;
    ds.X.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(width - 1));
    ds.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width) {
            throw std::runtime_error("ragged dataset CSV row " + std::to_string(i));
        }
        for (std::size_t j = 0; j + 1 < width; ++j) {
            ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
        }
        ds.y[static_cast<Eigen::Index>(i)] = rows[i][width - 1];
    }

    if (sidecar_path.has_value()) {
        auto sin = open_in(*sidecar_path);
        json side = json::parse(sin);
        if (side.contains("sigma")) ds.sigma_hint = side["sigma"].get<double>();
        if (side.contains("beta_star")) {
            GroundTruth t;
            t.beta_star = vector_from_json(side["beta_star"]);
            t.theta_star = vector_from_json(side["theta_star"]);
            t.support_S = side["support_S"].get<std::vector<int>>();
            t.support_O = side["support_O"].get<std::vector<int>>();
            if (side.contains("xi")) t.xi = vector_from_json(side["xi"]);
            t.sigma = side.value("sigma", 0.0);
            ds.truth = std::move(t);
        }
    }
    return ds;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    auto out = open_out(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && !starts_numeric(line)) {
            first = false;
            continue;
        }
        first = false;
        rows.push_back(split_numeric(line));
    }
    if (rows.empty()) throw std::runtime_error("empty matrix CSV: " + path);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) {
            throw std::runtime_error("ragged matrix CSV row " + std::to_string(i));
        }
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
        }
    }
    return m;
}

std::string fit_result_to_json(const FitResult& result) {
    json j;
    j["beta_hat"] = vector_to_json(result.beta_hat);
    j["theta_hat"] = vector_to_json(result.theta_hat);
    j["objective"] = result.objective;
    j["kkt_residual"] = result.kkt_residual;
    j["sweeps_used"] = result.sweeps_used;
    j["converged"] = result.converged;
    return j.dump(2);
}

FitResult fit_result_from_json(const std::string& text) {
    json j = json::parse(text);
    FitResult result;
    result.beta_hat = vector_from_json(j.at("beta_hat"));
    result.theta_hat = vector_from_json(j.at("theta_hat"));
    result.objective = j.at("objective").get<double>();
    result.kkt_residual = j.at("kkt_residual").get<double>();
    result.sweeps_used = j.at("sweeps_used").get<int>();
    result.converged = j.at("converged").get<bool>();
    return result;
}

std::string cert_report_to_json(const CertReport& report) {
    static const char* names[] = {"tp", "ip", "atp", "re"};
    json j;
    j["property"] = names[static_cast<int>(report.property)];
    j["constants"] = report.constants;
    j["n_samples"] = report.n_samples;
    j["n_violations"] = report.n_violations;
    j["min_slack"] = report.min_slack;
    j["worst_witness"]["v"] = vector_to_json(report.worst_v);
    if (report.worst_u.size() > 0) {
        j["worst_witness"]["u"] = vector_to_json(report.worst_u);
    }
    return j.dump(2);
}

}  // namespace auglasso
