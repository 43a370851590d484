#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cvqkd/channel.hpp"
#include "cvqkd/config.hpp"
#include "cvqkd/estimation.hpp"
#include "cvqkd/numeric.hpp"

using namespace cvqkd;

namespace {

double sample_var(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Independent Gaussian tail straight from erfc.
double tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("snr examples") {
  ProtocolConfig p;
  p.V_A = 5.0;
  p.T = 0.9;
  p.xi_ch = 0.0186;
  p.xi_d = 0.0133;
  const double hand = (0.5 * 5.0 * 0.9) / (1.0 + 0.5 * (0.0186 + 0.0133));
  CHECK(snr(p).gamma == doctest::Approx(hand).epsilon(1e-14));
  CHECK(snr(p).gamma == doctest::Approx(2.2147).epsilon(1e-4));
  CHECK(snr(p).noise_power == doctest::Approx(1.0 / hand));

  p.T = 0.0;
  CHECK(snr(p).gamma == 0.0);
  CHECK(std::isinf(snr(p).noise_power));

  p.V_A = 2.0;
  p.T = 1.0;
  p.xi_ch = p.xi_d = 0.0;
  CHECK(snr(p).gamma == doctest::Approx(1.0));
}

TEST_CASE("snr monotonicity on random grids") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    ProtocolConfig p;
    p.V_A = 1.0 + 33.0 * u(rng);
    p.T = 0.05 + 0.9 * u(rng);
    p.xi_ch = 0.05 * u(rng);
    p.xi_d = 0.05 * u(rng);
    const double g = snr(p).gamma;
    auto bumped = [&](auto f) {
      ProtocolConfig q = p;
      f(q);
      return snr(q).gamma;
    };
    CHECK(bumped([](ProtocolConfig& q) { q.T += 0.01; }) > g);
    CHECK(bumped([](ProtocolConfig& q) { q.V_A += 0.1; }) > g);
    CHECK(bumped([](ProtocolConfig& q) { q.xi_ch += 0.001; }) < g);
    CHECK(bumped([](ProtocolConfig& q) { q.xi_d += 0.001; }) < g);
  }
}

TEST_CASE("mutual information examples") {
  CHECK(mutual_information(1.0) == doctest::Approx(0.5));
  CHECK(mutual_information(3.0) == doctest::Approx(1.0));
  CHECK(mutual_information(2.2147) == doctest::Approx(0.5 * std::log2(3.2147)));
  CHECK(mutual_information(2.2147) == doctest::Approx(0.8424).epsilon(1e-4));
}

TEST_CASE("quadrature generation") {
  ProtocolConfig p;
  const auto a = generate_quadratures(p, 1000, 5);
  const auto b = generate_quadratures(p, 1000, 5);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(generate_quadratures(p, 1000, 6).x != a.x);
  CHECK_THROWS(generate_quadratures(p, 0, 5));

  const std::size_t n = 1'000'000;
  const auto q = generate_quadratures(p, n, 42);
  // Sample variance of N(0, v) has standard deviation v sqrt(2 / (n - 1)).
  const double sd_x = p.V_A * std::sqrt(2.0 / (n - 1));
  CHECK(std::fabs(sample_var(q.x) - p.V_A) < 5.0 * sd_x);
  std::vector<double> noise(n);
  for (std::size_t i = 0; i < n; ++i) noise[i] = q.y[i] - q.x[i];
  const double nv = 1.0 / snr(p).gamma;
  CHECK(nv == doctest::Approx(0.4515).epsilon(1e-3));
  CHECK(std::fabs(sample_var(noise) - nv) < 5.0 * nv * std::sqrt(2.0 / (n - 1)));
}

TEST_CASE("generation does not depend on chunk scheduling") {
  ProtocolConfig p;
  const auto big = generate_quadratures(p, kQuadratureChunk + 100, 9);
  const auto small = generate_quadratures(p, 100, 9);
  for (std::size_t i = 0; i < 100; ++i) CHECK(big.x[i] == small.x[i]);
}

TEST_CASE("post-selection") {
  ProtocolConfig p;
  const auto q = generate_quadratures(p, 400'000, 3);
  CHECK(post_select(q.y, 0.0).size() == q.y.size());
  CHECK(post_select(q.y, std::numeric_limits<double>::infinity()).empty());
  const double sy = std::sqrt(p.V_A + 1.0 / snr(p).gamma);
  const double frac = static_cast<double>(post_select(q.y, sy).size()) / q.y.size();
  const double expect = 2.0 * tail(1.0);
  CHECK(expect == doctest::Approx(0.3173).epsilon(1e-3));
  CHECK(std::fabs(frac - expect) < 5.0 * std::sqrt(expect * (1 - expect) / q.y.size()));
  const auto kept = post_select(q.y, 1.0);
  for (std::size_t i = 1; i < kept.size(); ++i) CHECK(kept[i] > kept[i - 1]);
}

TEST_CASE("estimation: tau and exact fit") {
  ProtocolConfig p;
  const auto e = confidence_bounds(0.9, 1.1, 1e6, 2.5e-10, p);
  // Inverting the tail gives 6.327; a quoted 6.44 would correspond to Q = 6e-11.
  CHECK(e.tau == doctest::Approx(6.327).epsilon(1e-3));
  CHECK(tail(e.tau) == doctest::Approx(1.25e-10).epsilon(1e-9));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, std::sqrt(p.V_A));
  std::vector<double> x(2000), y(2000);
  const double t = 0.93;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = g(rng);
    y[i] = t * x[i];
  }
  const auto fit = estimate_params(x, y, 1e-3, p);
  CHECK(fit.sigma_hat_sq == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(fit.T_L <= t * t + 1e-12);
  CHECK(fit.T_U >= t * t - 1e-12);
  CHECK_THROWS_AS(estimate_params(std::vector<double>(4, 0.0), std::vector<double>(4, 1.0), 1e-3, p),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_params(x, std::vector<double>(3, 0.0), 1e-3, p), std::invalid_argument);
}

TEST_CASE("estimation: interval width shrinks as 1/sqrt(N_e)") {
  ProtocolConfig p;
  double w1 = 0.0, w4 = 0.0;
  const int trials = 20;
  for (int k = 0; k < trials; ++k) {
    const auto q1 = generate_physical_quadratures(p, 2 * 5000, derive_seed(7, k));
    const auto q4 = generate_physical_quadratures(p, 2 * 20000, derive_seed(8, k));
    const auto e1 = estimate_params(q1.x, q1.y, 1e-3, p);
    const auto e4 = estimate_params(q4.x, q4.y, 1e-3, p);
    w1 += e1.T_U - e1.T_L;
    w4 += e4.T_U - e4.T_L;
    CHECK(e1.T_L <= e1.T_hat);
    CHECK(e1.T_hat <= e1.T_U);
    CHECK(e1.xi_L <= e1.xi_U);
  }
  CHECK(w1 / w4 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("estimation: deterministic and covers the true T") {
  ProtocolConfig p;
  const auto q = generate_physical_quadratures(p, 4000, 17);
  const auto a = estimate_params(q.x, q.y, 0.05, p);
  const auto b = estimate_params(q.x, q.y, 0.05, p);
  CHECK(a.T_L == b.T_L);
  CHECK(a.xi_U == b.xi_U);

  const int trials = 1000;
  int covered = 0;
  for (int k = 0; k < trials; ++k) {
    const auto d = generate_physical_quadratures(p, 2000, derive_seed(99, k));
    const auto e = estimate_params(d.x, d.y, 0.05, p);
    if (e.T_L <= p.T && p.T <= e.T_U) ++covered;
  }
  CHECK(covered >= static_cast<int>(std::ceil((1.0 - 0.05) * trials)));
}

TEST_CASE("config validation and round trip") {
  auto cfg = standard_settings();
  CHECK(cfg.protocol.reconciled_count() == doctest::Approx(1e9));
  CHECK(cfg.eps.total() == doctest::Approx(1e-9));
  CHECK(green_settings().protocol.reconciled_count() == doctest::Approx(1e10));

  cfg.protocol.V_A = 7.25;
  cfg.N_R = 12345;
  std::istringstream in(to_config_text(cfg));
  const auto back = parse_config(in);
  CHECK(back.protocol.V_A == 7.25);
  CHECK(back.N_R == 12345);
  CHECK(to_config_text(back) == to_config_text(cfg));

  std::istringstream unknown("V_A = 5\nbogus = 1\n");
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  std::istringstream bad_t("T = 1.5\n");
  CHECK_THROWS_AS(parse_config(bad_t), ConfigError);
  std::istringstream bad_ne("N_o = 10\nN_e = 10\n");
  CHECK_THROWS_AS(parse_config(bad_ne), ConfigError);
  std::istringstream comment("# standard\nV_A = 4 # inline\n");
  CHECK(parse_config(comment).protocol.V_A == 4.0);
}
