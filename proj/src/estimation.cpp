#include "cvqkd/estimation.hpp"

#include <cmath>
#include <stdexcept>

#include "cvqkd/numeric.hpp"

namespace cvqkd {

ParamEstimate confidence_bounds(double t_hat, double sigma_hat_sq, double N_e, double eps_PE,
                                const ProtocolConfig& cfg) {
  if (!(N_e > 0.0)) throw std::invalid_argument("confidence_bounds: N_e must be positive");
  ParamEstimate e;
  e.t_hat = t_hat;
  e.sigma_hat_sq = sigma_hat_sq;
  e.N_e = N_e;
  e.tau = q_inv(eps_PE / 2.0);
  e.T_hat = t_hat * t_hat;

  const double t_dev = e.tau * std::sqrt(sigma_hat_sq / (N_e * cfg.V_A));
  const double lo = t_hat - t_dev;
  e.T_L = lo > 0.0 ? lo * lo : 0.0;
  if (lo <= 0.0) e.warnings.emplace_back("T_L clamped to 0");
  e.T_U = (t_hat + t_dev) * (t_hat + t_dev);
  if (e.T_U > 1.0) {
    e.T_U = 1.0;
    e.warnings.emplace_back("T_U clamped to 1");
  }

  // Both limits subtract the vacuum and detector contributions; the printed
  // lower limit adds them, which would put xi_L above xi_U.
  const double s_dev = e.tau * sigma_hat_sq * std::sqrt(2.0) / std::sqrt(N_e);
  const double t2 = t_hat * t_hat;
  e.xi_hat = (sigma_hat_sq - 1.0 - cfg.xi_d) / t2;
  e.xi_L = (sigma_hat_sq - s_dev - 1.0 - cfg.xi_d) / t2;
  e.xi_U = (sigma_hat_sq + s_dev - 1.0 - cfg.xi_d) / t2;
  if (e.xi_L < 0.0) {
    e.xi_L = 0.0;
    e.warnings.emplace_back("xi_L clamped to 0");
  }
  if (e.xi_U < 0.0) {
    e.xi_U = 0.0;
    e.warnings.emplace_back("xi_U clamped to 0");
  }
  return e;
}

ParamEstimate estimate_params(std::span<const double> x_sub, std::span<const double> y_sub,
                              double eps_PE, const ProtocolConfig& cfg) {
  if (x_sub.size() != y_sub.size()) {
    throw std::invalid_argument("estimate_params: x and y sizes differ");
  }
  if (x_sub.size() < 2) throw std::invalid_argument("estimate_params: need >= 2 samples");
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x_sub.size(); ++i) {
    sxx += x_sub[i] * x_sub[i];
    sxy += x_sub[i] * y_sub[i];
  }
  if (sxx == 0.0) throw std::invalid_argument("estimate_params: sum of x^2 is zero");
  const double t_hat = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x_sub.size(); ++i) {
    const double r = y_sub[i] - t_hat * x_sub[i];
    ss += r * r;
  }
  const double sigma_hat_sq = ss / static_cast<double>(x_sub.size());
  // 2 N_e quadratures come from N_e signals.
  const double n_e = static_cast<double>(x_sub.size()) / 2.0;
  return confidence_bounds(t_hat, sigma_hat_sq, n_e, eps_PE, cfg);
}

}  // namespace cvqkd
