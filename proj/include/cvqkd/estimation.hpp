#pragma once

#include <span>
#include <string>
#include <vector>

#include "cvqkd/config.hpp"

namespace cvqkd {

/// Channel estimates and their eps_PE confidence intervals.
struct ParamEstimate {
  double t_hat = 0.0;         ///< amplitude estimator, expectation sqrt(eta_d T)
  double sigma_hat_sq = 0.0;  ///< residual variance, expectation eta_d T xi_ch + 1 + xi_d
  double T_hat = 0.0;         ///< t_hat^2
  double xi_hat = 0.0;        ///< (sigma_hat_sq - 1 - xi_d) / t_hat^2
  double T_L = 0.0, T_U = 0.0;
  double xi_L = 0.0, xi_U = 0.0;
  double tau = 0.0;           ///< Q^{-1}(eps_PE / 2)
  double N_e = 0.0;           ///< signal count used in the interval widths
  std::vector<std::string> warnings;
};

/// Confidence limits from estimator values. Shared by estimate_params and the
/// worst-case Holevo bound, which centers the estimators at their expectations.
/// Nonphysical limits are clamped (T_U <= 1, T_L >= 0, xi_L >= 0) and noted.
ParamEstimate confidence_bounds(double t_hat, double sigma_hat_sq, double N_e, double eps_PE,
                                const ProtocolConfig& cfg);

/// Least-squares estimators on an estimation subset of 2 N_e quadrature pairs.
/// Throws std::invalid_argument when sizes differ, fewer than 2 samples are
/// given, or sum x^2 = 0.
ParamEstimate estimate_params(std::span<const double> x_sub, std::span<const double> y_sub,
                              double eps_PE, const ProtocolConfig& cfg);

}  // namespace cvqkd
