#include "cvqkd/finite_rate.hpp"

#include <cmath>
#include <stdexcept>

#include "cvqkd/channel.hpp"
#include "cvqkd/numeric.hpp"

namespace cvqkd {

std::string to_string(LogMode mode) { return mode == LogMode::Natural ? "as-written" : "standard"; }

LogMode parse_log_mode(const std::string& s) {
  if (s == "as-written" || s == "natural") return LogMode::Natural;
  if (s == "standard" || s == "bits") return LogMode::Bits;
  throw std::invalid_argument("unknown log mode: " + s);
}

double dispersion(double gamma, double eps_EC, LogMode mode) {
  if (gamma < 0.0) throw std::domain_error("dispersion: gamma must be >= 0");
  if (!(eps_EC > 0.0 && eps_EC < 0.5)) throw std::domain_error("dispersion: eps_EC must lie in (0, 1/2)");
  const double l = mode == LogMode::Natural ? std::log(eps_EC) : std::log2(eps_EC);
  return 0.5 * gamma * (gamma + 2.0) / ((gamma + 1.0) * (gamma + 1.0)) * l * l;
}

double c_finite(double gamma, double n, double eps_EC, LogMode mode) {
  if (!(n >= 1.0)) throw std::domain_error("c_finite: n must be >= 1");
  // eps = 1/2 sits on the dispersion's domain edge but is the median point
  // of the approximation, where Q^{-1} = 0 removes the dispersion term.
  const double penalty_sqrt =
      eps_EC == 0.5 ? 0.0 : std::sqrt(n * dispersion(gamma, eps_EC, mode)) * q_inv(eps_EC);
  return mutual_information(gamma) - (penalty_sqrt + 0.5 * std::log2(n)) / n;
}

FiniteRatePoint beta_finite(double gamma, double n, double eps_EC, double I_AB, LogMode mode) {
  if (!(I_AB > 0.0)) throw std::domain_error("beta_finite: I_AB must be > 0");
  FiniteRatePoint p;
  p.gamma = gamma;
  p.n = n;
  p.eps_EC = eps_EC;
  p.log_mode = mode;
  p.A = eps_EC == 0.5 ? 0.0 : dispersion(gamma, eps_EC, mode);
  p.C_fin = c_finite(gamma, n, eps_EC, mode);
  p.beta_fin = p.C_fin / I_AB;
  p.negative = p.C_fin < 0.0;
  p.out_of_range = p.beta_fin < 0.0 || p.beta_fin > 1.0;
  return p;
}

RealizedBeta beta_realized(double H_MY, int m, const std::vector<double>& rates, double I_AB,
                           std::optional<double> H_MY_given_X) {
  if (!(I_AB > 0.0)) throw std::invalid_argument("beta_realized: I_AB must be > 0");
  if (static_cast<int>(rates.size()) != m) throw std::invalid_argument("beta_realized: need m rates");
  double sum = 0.0;
  for (double r : rates) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("beta_realized: rates must lie in [0, 1)");
    sum += r;
  }
  RealizedBeta b;
  b.R_s = 0.0;
  for (double r : rates) b.R_s += 1.0 - r;
  b.beta_direct = (H_MY - m + sum) / I_AB;
  b.beta_syndrome = (H_MY - b.R_s) / I_AB;
  if (H_MY_given_X) b.slepian_wolf_ok = b.R_s >= *H_MY_given_X;
  b.nonpositive = b.beta_direct <= 0.0;
  return b;
}

}  // namespace cvqkd
