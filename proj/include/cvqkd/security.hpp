#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cvqkd/config.hpp"
#include "cvqkd/estimation.hpp"

namespace cvqkd {

/// sqrt((v1 + sqrt(v1^2 - 4 v2)) / 2). A negative discriminant within 1e-9
/// (relative to v1^2) is treated as zero; beyond that std::domain_error.
double f1(double v1, double v2);
/// sqrt((v1 - sqrt(v1^2 - 4 v2)) / 2), same domain rule as f1.
double f2(double v1, double v2);

/// (z + 1) log2(z + 1) - z log2 z, Z(0) = 0.
double von_neumann_Z(double z);

struct SymplecticSpectrum {
  double Psi1 = 0, Psi2 = 0, Theta1 = 0, Theta2 = 0;
  double chi_ch = 0, chi_d = 0, chi = 0;
  double psi1 = 0, psi2 = 0;                  ///< before Bob's detection
  double theta1 = 0, theta2 = 0, theta3 = 1;  ///< after Bob's detection
  double chi_E = 0, chi_E_given_B = 0;
  bool physical = true;  ///< all eigenvalues >= 1 - 1e-9
};

struct HolevoResult {
  double chi_EB = 0.0;  ///< bits per quadrature use
  SymplecticSpectrum spectrum;
};

/// Holevo bound for a Gaussian collective attack with heterodyne detection.
/// Throws std::domain_error when T <= 0 or eta_d is outside (0, 1].
HolevoResult holevo_asymptotic(double V_A, double T, double xi_ch, double xi_d, double eta_d = 1.0);

struct WorstCaseHolevo {
  double S_BE = 0.0;
  ParamEstimate bounds;  ///< T_L, xi_U and friends at the expected estimator values
  HolevoResult holevo;   ///< evaluated at (T_L, xi_U)
};

/// Holevo bound at the eps_PE confidence limits (T_L, xi_U) with the
/// estimators set to their expectations.
WorstCaseHolevo holevo_worst_case(const ProtocolConfig& cfg, double eps_PE, double N_e);

/// Finite-size AEP penalty, logs base 2:
/// (m+1)^2 + 4(m+1) sqrt(log2(2/eps_s^2)) + 2 log2(2/(eps^2 eps_s)) + 4 eps_s m / (eps sqrt N).
double delta_aep(int m, double eps, double eps_s, double N);

struct KeyRateReport {
  // Inputs
  double V_A = 0, T = 0, xi_ch = 0, xi_d = 0, eta_d = 0;
  double N_o = 0, N_e = 0, N = 0;
  int m = 0;
  double eps_EC = 0, eps_s = 0, eps_PA = 0, eps_PE = 0, eps = 0;
  double beta = 0;      ///< efficiency used for K
  double C_fin = 0;     ///< replaces beta I_AB in K_Finite
  double beta_fin = 0;
  // Outputs
  double gamma = 0;
  double I_AB = 0;
  double chi_BE = 0;    ///< asymptotic, at the true channel
  double S_BE = 0;      ///< worst case used in the rates
  double Delta_AEP = 0;
  double K = 0;         ///< bits per pulse
  double K_Finite = 0;  ///< bits per pulse
  double delta_t = 0;   ///< seconds
  double K_prime = 0;   ///< bits per second
  bool no_key = false;  ///< K_Finite <= 0 (or K <= 0)
};

/// K = [N (beta I_AB - S_BE) - sqrt(N) Delta_AEP - 2 log2(1/(2 eps_PA))] / N_o,
/// K_Finite with C_fin in place of beta I_AB, K' = N_o K_Finite / delta_t.
/// With N = 0 the key rates are the constant term over N_o.
KeyRateReport key_rates(const ProtocolConfig& cfg, const EpsilonBudget& eps, double beta,
                        double C_fin, double S_BE, double delta_t);

/// Header and row use the same fixed column order.
std::string key_rate_csv_header();
std::string key_rate_csv_row(const KeyRateReport& r);

}  // namespace cvqkd
