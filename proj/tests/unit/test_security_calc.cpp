#include <doctest.h>

#include <cmath>
#include <random>

#include "cvqkd/channel.hpp"
#include "cvqkd/config.hpp"
#include "cvqkd/security.hpp"
#include "holevo_oracle.hpp"

using namespace cvqkd;
using oracle::holevo_oracle;

namespace {

double delta_aep_oracle(int m, double eps, double eps_s, double N) {
  const double ln2 = std::log(2.0);
  return std::pow(m + 1, 2) + 4 * (m + 1) * std::sqrt((std::log(2.0) - 2 * std::log(eps_s)) / ln2) +
         2 * (std::log(2.0) - 2 * std::log(eps) - std::log(eps_s)) / ln2 + 4 * eps_s * m / (eps * std::sqrt(N));
}

}  // namespace

TEST_CASE("F1, F2 and Z") {
  CHECK(f1(2, 1) == doctest::Approx(1.0));
  CHECK(f2(2, 1) == doctest::Approx(1.0));
  CHECK(f1(5, 4) == doctest::Approx(2.0));
  CHECK(f2(5, 4) == doctest::Approx(1.0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double v1 = 1.0 + 50.0 * u(rng);
    const double v2 = u(rng) * v1 * v1 / 4.0;
    CHECK(f1(v1, v2) * f1(v1, v2) * f2(v1, v2) * f2(v1, v2) == doctest::Approx(v2).epsilon(1e-9));
    CHECK(f1(v1, v2) >= f2(v1, v2));
  }
  // Within tolerance of a degenerate discriminant, accepted; beyond, rejected.
  CHECK(f1(2.0, 1.0 + 1e-12) == doctest::Approx(1.0));
  CHECK_THROWS_AS(f1(2.0, 1.1), std::domain_error);

  CHECK(von_neumann_Z(0.0) == 0.0);
  CHECK(von_neumann_Z(1.0) == doctest::Approx(2.0));
  CHECK(von_neumann_Z(2.0) > von_neumann_Z(1.0));
  CHECK(von_neumann_Z(1e-300) >= 0.0);
}

TEST_CASE("Holevo bound against a covariance-matrix oracle") {
  const ProtocolConfig std_cfg;
  const auto std_h = holevo_asymptotic(std_cfg.V_A, std_cfg.T, std_cfg.xi_ch, std_cfg.xi_d);
  // The mixing ratio must exceed 2 / (chi_d + 1) ~ 0.987 here.
  CHECK(std::fabs(std_h.chi_EB - holevo_oracle(5, 0.9, 0.0186, 0.0133, 1.0, 0.99)) < 1e-9);
  CHECK(std::fabs(std_h.chi_EB - holevo_oracle(5, 0.9, 0.0186, 0.0133, 1.0, 0.995)) < 1e-9);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double V_A = 1 + 33 * u(rng), T = 0.02 + 0.98 * u(rng), xi = 0.05 * u(rng);
    const double xi_d = 0.05 * u(rng), eta = 0.5 + 0.5 * u(rng);
    const double ref = holevo_asymptotic(V_A, T, xi, xi_d, eta).chi_EB;
    const double chi_d = (2 - eta) / eta + 2 * xi_d / eta;
    const double lo = 2.0 / (chi_d + 1.0);
    // Any admissible mixing ratio gives the same conditional state entropy.
    for (double f : {0.3, 0.8}) worst = std::max(worst, std::fabs(ref - holevo_oracle(V_A, T, xi, xi_d, eta, lo + (1 - lo) * f)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("Holevo limits, monotonicity and physicality") {
  CHECK(std::fabs(holevo_asymptotic(5.0, 1.0 - 1e-9, 1e-12, 0.0133).chi_EB) < 1e-6);
  CHECK_THROWS_AS(holevo_asymptotic(5.0, 0.0, 0.01, 0.01), std::domain_error);
  CHECK_THROWS_AS(holevo_asymptotic(5.0, 0.9, 0.01, 0.01, 1.5), std::domain_error);

  double prev = -1.0;
  for (double xi = 0.0; xi <= 0.05 + 1e-12; xi += 0.0025) {
    const double c = holevo_asymptotic(5.0, 0.9, xi, 0.0133).chi_EB;
    CHECK(c > prev);
    prev = c;
  }

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double V_A = 1 + 33 * u(rng), T = 1e-3 + (1 - 1e-3) * u(rng), xi = 0.05 * u(rng), xi_d = 0.05 * u(rng);
    const auto h = holevo_asymptotic(V_A, T, xi, xi_d);
    const auto& s = h.spectrum;
    CHECK(s.physical);
    for (double nu : {s.psi1, s.psi2, s.theta1, s.theta2}) CHECK(nu >= 1.0 - 1e-9);
    CHECK(s.theta3 == 1.0);
    CHECK(s.chi_E >= s.chi_E_given_B);
    CHECK(s.chi_E_given_B >= 0.0);
    CHECK(h.chi_EB == doctest::Approx(s.chi_E - s.chi_E_given_B));
  }
}

TEST_CASE("worst-case Holevo bound") {
  const auto cfg = standard_settings();
  const auto& p = cfg.protocol;
  const double chi = holevo_asymptotic(p.V_A, p.T, p.xi_ch, p.xi_d).chi_EB;
  CHECK(holevo_worst_case(p, cfg.eps.eps_PE, 1e30).S_BE == doctest::Approx(chi).epsilon(1e-9));
  double prev = 1e300;
  for (double ne = 1e6; ne <= 1e10 * 1.0001; ne *= std::sqrt(10.0)) {
    const auto w = holevo_worst_case(p, cfg.eps.eps_PE, ne);
    CHECK(w.S_BE <= prev);
    CHECK(w.S_BE >= chi);
    CHECK(w.bounds.T_L <= p.T);
    CHECK(w.bounds.xi_U >= p.xi_ch);
    prev = w.S_BE;
  }
  const auto w = holevo_worst_case(p, cfg.eps.eps_PE, 5e8);
  CHECK(w.S_BE == doctest::Approx(holevo_asymptotic(p.V_A, w.bounds.T_L, w.bounds.xi_U, p.xi_d).chi_EB));
}

TEST_CASE("AEP penalty") {
  const auto eps = standard_settings().eps;
  const double d = delta_aep(5, eps.total(), eps.eps_s, 1e9);
  CHECK(d == doctest::Approx(delta_aep_oracle(5, eps.total(), eps.eps_s, 1e9)).epsilon(1e-12));
  CHECK(d > 0.0);
  for (int m = 1; m < 10; ++m) CHECK(delta_aep(m + 1, 1e-9, 1e-10, 1e6) > delta_aep(m, 1e-9, 1e-10, 1e6));
  CHECK_THROWS(delta_aep(5, 0.0, 1e-10, 1e6));
}

TEST_CASE("key rates") {
  const auto cfg = standard_settings();
  const auto& p = cfg.protocol;
  const double iab = mutual_information(snr(p).gamma);
  const double S = holevo_worst_case(p, cfg.eps.eps_PE, static_cast<double>(p.N_e)).S_BE;

  const auto r = key_rates(p, cfg.eps, 0.95, 0.93 * iab, S, 2.0);
  const double N = p.reconciled_count();
  const double pa = 2.0 * std::log2(1.0 / (2.0 * cfg.eps.eps_PA));
  const double aep = delta_aep_oracle(p.m, cfg.eps.total(), cfg.eps.eps_s, N);
  CHECK(r.K == doctest::Approx((N * (0.95 * iab - S) - std::sqrt(N) * aep - pa) / p.N_o).epsilon(1e-12));
  CHECK(r.K_Finite == doctest::Approx((N * (0.93 * iab - S) - std::sqrt(N) * aep - pa) / p.N_o).epsilon(1e-12));
  CHECK(r.K_prime == doctest::Approx(p.N_o * r.K_Finite / 2.0));
  CHECK(r.K_Finite <= r.K);

  // Finite differences on a grid: strictly decreasing in S_BE, increasing in beta.
  for (double beta : {0.9, 0.95, 0.99}) {
    for (double s = 0.3; s < 0.8; s += 0.05) {
      const double k = key_rates(p, cfg.eps, beta, 0.0, s, 1.0).K;
      CHECK(key_rates(p, cfg.eps, beta, 0.0, s + 1e-6, 1.0).K < k);
      CHECK(key_rates(p, cfg.eps, beta + 1e-6, 0.0, s, 1.0).K > k);
    }
  }

  // Zero margin leaves only the finite-size penalties.
  const auto zero = key_rates(p, cfg.eps, 1.0, 0.0, iab, 1.0);
  CHECK(zero.K < 0.0);
  CHECK(zero.no_key);
  CHECK(zero.K == doctest::Approx(-(std::sqrt(N) * aep + pa) / p.N_o));

  ProtocolConfig all_pe = p;
  all_pe.N_e = all_pe.N_o;
  CHECK(key_rates(all_pe, cfg.eps, 0.95, 0.9 * iab, S, 1.0).K <= 0.0);

  const auto header = key_rate_csv_header();
  const auto row = key_rate_csv_row(r);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(header.rfind("V_A,", 0) == 0);
}

TEST_CASE("K versus N_e has an interior window") {
  const auto cfg = standard_settings();
  for (double n_o : {1e9, 1e10}) {
    auto k_at = [&](double n_e) {
      ProtocolConfig p = cfg.protocol;
      p.N_o = static_cast<std::int64_t>(n_o);
      p.N_e = static_cast<std::int64_t>(n_e);
      const double S = holevo_worst_case(p, cfg.eps.eps_PE, n_e).S_BE;
      return key_rates(p, cfg.eps, cfg.beta_target, 0.0, S, 1.0).K;
    };
    // With the interval formulas as given the lower cutoff sits near
    // N_e = 4e5 for both N_o.
    CHECK(k_at(1e5) <= 0.0);
    CHECK(k_at(1e7) > 0.0);
    CHECK(k_at(n_o / 2.0) > 0.0);
    CHECK(k_at(n_o) <= 0.0);
  }
}
