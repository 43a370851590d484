#include "cvqkd/security.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cvqkd/channel.hpp"

namespace cvqkd {

namespace {

double discriminant_root(double v1, double v2) {
  const double d = v1 * v1 - 4.0 * v2;
  if (d >= 0.0) return std::sqrt(d);
  if (d >= -1e-9 * std::max(1.0, v1 * v1)) return 0.0;
  throw std::domain_error("f1/f2: negative discriminant");
}

double entropy_term(double nu) {
  // Eigenvalues a hair below one (rounding) contribute nothing.
  return von_neumann_Z(std::max(0.0, (nu - 1.0) / 2.0));
}

}  // namespace

double f1(double v1, double v2) { return std::sqrt((v1 + discriminant_root(v1, v2)) / 2.0); }

double f2(double v1, double v2) {
  return std::sqrt(std::max(0.0, (v1 - discriminant_root(v1, v2)) / 2.0));
}

double von_neumann_Z(double z) {
  if (z < 0.0) throw std::domain_error("von_neumann_Z: z must be >= 0");
  if (z == 0.0) return 0.0;
  return (z + 1.0) * std::log2(z + 1.0) - z * std::log2(z);
}

HolevoResult holevo_asymptotic(double V_A, double T, double xi_ch, double xi_d, double eta_d) {
  if (!(T > 0.0)) throw std::domain_error("holevo_asymptotic: T must be > 0");
  if (!(eta_d > 0.0 && eta_d <= 1.0)) throw std::domain_error("holevo_asymptotic: eta_d must lie in (0, 1]");
  HolevoResult r;
  auto& s = r.spectrum;
  const double V = V_A + 1.0;
  s.chi_ch = (1.0 - T) / T + xi_ch;
  // Printed as "chi_d = (2 - eta_d)/eta_d + 2 chi_d/eta_d"; the right-hand
  // chi_d is read as the detector noise xi_d.
  s.chi_d = (2.0 - eta_d) / eta_d + 2.0 * xi_d / eta_d;
  s.chi = s.chi_ch + s.chi_d / T;

  // Two-mode entangling-cloner state before detection.
  s.Psi1 = V * V * (1.0 - 2.0 * T) + 2.0 * T + T * T * std::pow(V + s.chi_ch, 2);
  s.Psi2 = T * T * std::pow(V * s.chi_ch + 1.0, 2);
  s.psi1 = f1(s.Psi1, s.Psi2);
  s.psi2 = f2(s.Psi1, s.Psi2);

  // Conditional state after heterodyne detection with trusted noise chi_d.
  const double sqrtPsi2 = std::sqrt(s.Psi2);
  const double denom = T * T * std::pow(V + s.chi, 2);
  s.Theta1 = (s.Psi1 * s.chi_d * s.chi_d + s.Psi2 + 1.0 +
              2.0 * s.chi_d * (T * (V + s.chi_ch) + V * sqrtPsi2) + 2.0 * T * (V_A * V_A + 2.0 * V_A)) /
             denom;
  s.Theta2 = std::pow((V + s.chi_d * sqrtPsi2) / (T * (V + s.chi)), 2);
  s.theta1 = f1(s.Theta1, s.Theta2);
  s.theta2 = f2(s.Theta1, s.Theta2);
  s.theta3 = 1.0;

  constexpr double kTol = 1e-9;
  s.physical = s.psi1 >= 1.0 - kTol && s.psi2 >= 1.0 - kTol && s.theta1 >= 1.0 - kTol &&
               s.theta2 >= 1.0 - kTol;
  s.chi_E = entropy_term(s.psi1) + entropy_term(s.psi2);
  s.chi_E_given_B = entropy_term(s.theta1) + entropy_term(s.theta2) + entropy_term(s.theta3);
  r.chi_EB = s.chi_E - s.chi_E_given_B;
  return r;
}

WorstCaseHolevo holevo_worst_case(const ProtocolConfig& cfg, double eps_PE, double N_e) {
  if (!(N_e >= 1.0)) throw std::domain_error("holevo_worst_case: N_e must be >= 1");
  WorstCaseHolevo w;
  const double t_hat = std::sqrt(cfg.eta_d * cfg.T);
  const double sigma_sq = cfg.T * cfg.eta_d * cfg.xi_ch + 1.0 + cfg.xi_d;
  w.bounds = confidence_bounds(t_hat, sigma_sq, N_e, eps_PE, cfg);
  w.holevo = holevo_asymptotic(cfg.V_A, w.bounds.T_L, w.bounds.xi_U, cfg.xi_d, cfg.eta_d);
  w.S_BE = w.holevo.chi_EB;
  return w;
}

double delta_aep(int m, double eps, double eps_s, double N) {
  if (m < 1 || !(eps > 0.0) || !(eps_s > 0.0) || !(N >= 1.0)) {
    throw std::domain_error("delta_aep: arguments must be positive");
  }
  const double mp = m + 1.0;
  return mp * mp + 4.0 * mp * std::sqrt(std::log2(2.0 / (eps_s * eps_s))) +
         2.0 * std::log2(2.0 / (eps * eps * eps_s)) + 4.0 * eps_s * m / (eps * std::sqrt(N));
}

KeyRateReport key_rates(const ProtocolConfig& cfg, const EpsilonBudget& eps, double beta,
                        double C_fin, double S_BE, double delta_t) {
  KeyRateReport r;
  r.V_A = cfg.V_A;
  r.T = cfg.T;
  r.xi_ch = cfg.xi_ch;
  r.xi_d = cfg.xi_d;
  r.eta_d = cfg.eta_d;
  r.N_o = static_cast<double>(cfg.N_o);
  r.N_e = static_cast<double>(cfg.N_e);
  r.N = std::max(0.0, cfg.reconciled_count());
  r.m = cfg.m;
  r.eps_EC = eps.eps_EC;
  r.eps_s = eps.eps_s;
  r.eps_PA = eps.eps_PA;
  r.eps_PE = eps.eps_PE;
  r.eps = eps.total();
  r.beta = beta;
  r.C_fin = C_fin;
  r.gamma = snr(cfg).gamma;
  r.I_AB = mutual_information(r.gamma);
  r.beta_fin = r.I_AB > 0.0 ? C_fin / r.I_AB : 0.0;
  r.chi_BE = cfg.T > 0.0 ? holevo_asymptotic(cfg.V_A, cfg.T, cfg.xi_ch, cfg.xi_d, cfg.eta_d).chi_EB
                         : std::numeric_limits<double>::quiet_NaN();
  r.S_BE = S_BE;
  const double pa = 2.0 * std::log2(1.0 / (2.0 * eps.eps_PA));
  // The 1/sqrt(N) term of Delta_AEP is multiplied by sqrt(N); at N = 0 the
  // product is its limit 4 eps_s m / eps.
  if (r.N >= 1.0) {
    r.Delta_AEP = delta_aep(cfg.m, r.eps, eps.eps_s, r.N);
  } else {
    r.Delta_AEP = std::numeric_limits<double>::infinity();
  }
  const double aep = r.N >= 1.0 ? std::sqrt(r.N) * r.Delta_AEP : 4.0 * eps.eps_s * cfg.m / r.eps;
  r.K = (r.N * (beta * r.I_AB - S_BE) - aep - pa) / r.N_o;
  r.K_Finite = (r.N * (C_fin - S_BE) - aep - pa) / r.N_o;
  r.delta_t = delta_t;
  r.K_prime = delta_t > 0.0 ? r.N_o * r.K_Finite / delta_t : std::numeric_limits<double>::quiet_NaN();
  r.no_key = r.K_Finite <= 0.0 || r.K <= 0.0;
  return r;
}

std::string key_rate_csv_header() {
  return "V_A,T,xi_ch,xi_d,eta_d,N_o,N_e,N,m,eps_EC,eps_s,eps_PA,eps_PE,eps,beta,C_fin,beta_fin,"
         "gamma,I_AB,chi_BE,S_BE,Delta_AEP,K,K_Finite,delta_t,K_prime,no_key";
}

std::string key_rate_csv_row(const KeyRateReport& r) {
  std::ostringstream o;
  o.precision(12);
  o << r.V_A << ',' << r.T << ',' << r.xi_ch << ',' << r.xi_d << ',' << r.eta_d << ',' << r.N_o << ','
    << r.N_e << ',' << r.N << ',' << r.m << ',' << r.eps_EC << ',' << r.eps_s << ',' << r.eps_PA << ','
    << r.eps_PE << ',' << r.eps << ',' << r.beta << ',' << r.C_fin << ',' << r.beta_fin << ','
    << r.gamma << ',' << r.I_AB << ',' << r.chi_BE << ',' << r.S_BE << ',' << r.Delta_AEP << ','
    << r.K << ',' << r.K_Finite << ',' << r.delta_t << ',' << r.K_prime << ',' << (r.no_key ? 1 : 0);
  return o.str();
}

}  // namespace cvqkd
