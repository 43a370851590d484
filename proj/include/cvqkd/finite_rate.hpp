#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cvqkd {

/// Base of the (log eps)^2 factor in the dispersion.
enum class LogMode {
  Natural,  ///< "as-written": (ln eps)^2
  Bits      ///< (log2 eps)^2 = (log2 e)^2 (ln eps)^2
};

std::string to_string(LogMode mode);
LogMode parse_log_mode(const std::string& s);

/// A = (gamma / 2) (gamma + 2) / (gamma + 1)^2 (log eps)^2.
double dispersion(double gamma, double eps_EC, LogMode mode = LogMode::Natural);

struct FiniteRatePoint {
  double gamma = 0.0;
  double n = 0.0;
  double eps_EC = 0.0;
  LogMode log_mode = LogMode::Natural;
  double A = 0.0;
  double C_fin = 0.0;
  double beta_fin = 0.0;
  bool negative = false;      ///< C_fin < 0
  bool out_of_range = false;  ///< beta_fin outside [0, 1]
};

/// Normal approximation C(gamma) - (sqrt(n A) Q^{-1}(eps) + 0.5 log2 n) / n.
double c_finite(double gamma, double n, double eps_EC, LogMode mode = LogMode::Natural);

/// C_fin / I_AB, unclamped, with range flags. Throws if I_AB <= 0 or n < 1.
FiniteRatePoint beta_finite(double gamma, double n, double eps_EC, double I_AB,
                            LogMode mode = LogMode::Natural);

struct RealizedBeta {
  double beta_direct = 0.0;     ///< (H(M(Y)) - m + sum R_j) / I_AB
  double beta_syndrome = 0.0;   ///< (H(M(Y)) - R_s) / I_AB
  double R_s = 0.0;             ///< m - sum R_j
  std::optional<bool> slepian_wolf_ok;  ///< R_s >= H(M(Y)|X), when supplied
  bool nonpositive = false;
};

/// Realized efficiency from code rates, computed both ways. Rates must lie
/// in [0, 1); throws std::invalid_argument otherwise or when I_AB <= 0.
RealizedBeta beta_realized(double H_MY, int m, const std::vector<double>& rates, double I_AB,
                           std::optional<double> H_MY_given_X = std::nullopt);

}  // namespace cvqkd
