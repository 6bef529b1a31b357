#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "auglasso/cert.hpp"
#include "auglasso/model.hpp"
#include "auglasso/solver.hpp"

namespace auglasso {

/// Dataset CSV: header x1..xp,y then one row per observation, full
/// precision. The JSON sidecar carries truth/metadata: n, p, s, o, sigma,
/// seed, beta_star, theta_star and the supports (0-based indices).
void save_dataset(const Dataset& ds, const std::string& csv_path,
                  const std::string& sidecar_path,
                  std::optional<std::uint64_t> seed = std::nullopt);

Dataset load_dataset(const std::string& csv_path,
                     const std::optional<std::string>& sidecar_path = std::nullopt);

/// Plain numeric CSV (no header); read_matrix_csv skips one leading
/// header line when the first field is not numeric.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// {beta_hat, theta_hat, objective, kkt_residual, sweeps_used, converged}
std::string fit_result_to_json(const FitResult& result);
FitResult fit_result_from_json(const std::string& text);

std::string cert_report_to_json(const CertReport& report);

/// Full-precision decimal rendering that round-trips through strtod.
std::string format_double(double x);

}  // namespace auglasso
