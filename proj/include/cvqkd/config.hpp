#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace cvqkd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical and protocol parameters. Noise terms are in shot-noise units.
struct ProtocolConfig {
  double V_A = 5.0;       ///< modulation variance
  double T = 0.9;         ///< channel transmissivity
  double xi_ch = 0.0186;  ///< channel excess noise
  double xi_d = 0.0133;   ///< detector noise
  double eta_d = 1.0;     ///< detection efficiency
  std::int64_t N_o = 1'000'000'000;
  std::int64_t N_e = 500'000'000;
  int m = 5;              ///< bits per quadrature
  double c_h = 3.2e-9;    ///< seconds per decoder arithmetic operation
  double post_select_threshold = 0.0;

  /// Reconciled quadrature count N = 2 N_o - 2 N_e.
  [[nodiscard]] double reconciled_count() const {
    return 2.0 * static_cast<double>(N_o) - 2.0 * static_cast<double>(N_e);
  }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

struct EpsilonBudget {
  double eps_EC = 2.5e-10;
  double eps_s = 1.25e-10;
  double eps_PA = 2.5e-10;
  double eps_PE = 2.5e-10;

  /// Total failure probability eps_EC + 2 eps_s + eps_PA + eps_PE.
  [[nodiscard]] double total() const { return eps_EC + 2.0 * eps_s + eps_PA + eps_PE; }

  void validate() const;

  /// Budget with eps_EC = 2 eps_s = eps_PA = eps_PE = e.
  static EpsilonBudget uniform(double e) { return {e, e / 2.0, e, e}; }
};

/// Everything a config file can carry.
struct RunConfig {
  ProtocolConfig protocol;
  EpsilonBudget eps;
  double beta_target = 0.95;  ///< target efficiency for the estimation abort test
  std::int64_t N_R = 10'000;  ///< sub-block length used by `run`
};

/// The "standard CV-QKD settings": N = 1e9, m = 5, every eps part 2.5e-10,
/// V_A = 5, T = 0.9, xi_ch = 0.0186, xi_d = 0.0133, N_e = N_o / 2.
RunConfig standard_settings();

/// Second reference point: N = 1e10, eps parts 2.5e-7, V_A = 4, T = 0.92,
/// xi_ch = 0.0180, xi_d = 0.0128.
RunConfig green_settings();

/// Parses "key = value" lines; '#' starts a comment. Keys match field names
/// (V_A, T, xi_ch, xi_d, eta_d, N_o, N_e, m, c_h, post_select_threshold,
/// eps_EC, eps_s, eps_PA, eps_PE, beta_target, N_R). Unset keys keep the
/// standard-settings defaults. Unknown keys are an error.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Serializes in the same key = value format; parse_config round-trips it.
std::string to_config_text(const RunConfig& cfg);

}  // namespace cvqkd
