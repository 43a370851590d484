#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cvqkd/bp_decoder.hpp"
#include "cvqkd/complexity.hpp"
#include "phi_oracle.hpp"

using namespace cvqkd;
using oracle::phi_oracle;
using oracle::phi_oracle_inv;

namespace {

// Regular (dv, dc) Gaussian-approximation DE on message means; returns the
// first iteration whose decision BER is <= eps, or -1.
int regular_de_oracle(double gamma, int dv, int dc, double eps, int cap) {
  const double m0 = 2.0 * gamma;
  double mu = 0.0;
  for (int k = 1; k <= cap; ++k) {
    const double vmean = m0 + (dv - 1) * mu;
    const double t = vmean > 300.0 ? 0.0 : phi_oracle(vmean);
    const double w = 1.0 - std::pow(1.0 - t, dc - 1);
    mu = w <= 0.0 ? 1e6 : phi_oracle_inv(w);
    const double ber = 0.5 * std::erfc(std::sqrt((m0 + dv * mu) / 2.0) / std::sqrt(2.0));
    if (ber <= eps) return k;
  }
  return -1;
}

}  // namespace

TEST_CASE("phi examples and domain") {
  CHECK(phi(0.0) == 1.0);
  CHECK(phi_approx(0.0) == 1.0);
  CHECK(phi_inv(1.0) == 0.0);
  CHECK(phi_approx(1.0) == doctest::Approx(std::exp(-0.4309)).epsilon(1e-12));
  CHECK(phi_approx(1.0) == doctest::Approx(0.6499).epsilon(1e-4));
  CHECK_THROWS_AS(phi(-1.0), std::domain_error);
  CHECK_THROWS_AS(phi_inv(0.0), std::domain_error);
  CHECK_THROWS_AS(phi_inv(1.5), std::domain_error);
  for (double v : {0.05, 0.3, 1.0, 4.0, 12.0, 30.0}) {
    CHECK(phi(v) == doctest::Approx(phi_oracle(v)).epsilon(1e-8));
  }
}

TEST_CASE("phi properties") {
  double prev = phi(0.0);
  for (double v = 0.01; v < 40.0; v *= 1.1) {
    const double p = phi(v);
    CHECK(p < prev);
    prev = p;
    CHECK(phi_inv_exact(p) == doctest::Approx(v).epsilon(1e-6));
  }
  for (double v = 0.05; v <= 20.0; v *= 1.05) {
    CHECK(std::fabs(phi_inv(phi_approx(v)) - v) <= 1e-6 * v);
  }
  double worst = 0.0;
  for (double v = 0.1; v <= 10.0; v += 0.01) {
    worst = std::max(worst, std::fabs(phi_approx(v) - phi(v)) / phi(v));
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("density evolution") {
  const auto d36 = DegreeDistribution::regular(3, 6);
  SUBCASE("immediate threshold") {
    const auto r = density_evolution(50.0, d36, 1e-6);
    CHECK(r.iterations == 1);
    CHECK(r.trace.q.size() == 2);
  }
  SUBCASE("below the (3,6) threshold the cap is reached") {
    // The Gaussian-approximation threshold of (3,6) sits near gamma = 1.31.
    for (double g : {0.8, 1.0, 1.2}) {
      CHECK(regular_de_oracle(g, 3, 6, 1e-6, 100) == -1);
      const auto r = density_evolution(g, d36, 1e-6, 300);
      CHECK_FALSE(r.iterations.has_value());
      CHECK(r.trace.q.size() == 301);
    }
  }
  SUBCASE("above threshold: exact and approximate phi agree") {
    for (double g : {1.5, 2.0, 3.0}) {
      const auto a = density_evolution(g, d36, 1e-6, kDeMaxIter, DeMode::Standard, PhiKind::Approx);
      const auto e = density_evolution(g, d36, 1e-6, kDeMaxIter, DeMode::Standard, PhiKind::Exact);
      REQUIRE(a.iterations.has_value());
      REQUIRE(e.iterations.has_value());
      CHECK(std::abs(*a.iterations - *e.iterations) <= 2);
      CHECK(std::abs(*e.iterations - regular_de_oracle(g, 3, 6, 1e-6, 300)) <= 1);
    }
  }
  SUBCASE("D non-increasing in gamma") {
    int prev = kDeMaxIter + 1;
    for (double g = 1.35; g < 30.0; g *= 1.07) {
      const int d = density_evolution(g, d36, 1e-8).iterations.value_or(kDeMaxIter + 1);
      CHECK(d <= prev);
      prev = d;
    }
    const auto dd = DegreeDistribution::for_rate(0.3);
    prev = kDeMaxIter + 1;
    for (double g = 0.3; g < 30.0; g *= 1.1) {
      const int d = density_evolution(g, dd, 1e-8).iterations.value_or(kDeMaxIter + 1);
      CHECK(d <= prev);
      prev = d;
    }
  }
  SUBCASE("as-written recursion starts from q_0 = 0") {
    const auto r = density_evolution(3.0, d36, 1e-6, 50, DeMode::AsWritten);
    CHECK(r.trace.mode == DeMode::AsWritten);
    CHECK(r.trace.q.front() == 0.0);
    for (double q : r.trace.q) CHECK(std::isfinite(q));
  }
  CHECK_THROWS(density_evolution(0.0, d36, 1e-6));
  CHECK(parse_de_mode(to_string(DeMode::AsWritten)) == DeMode::AsWritten);
  CHECK(parse_de_mode("standard") == DeMode::Standard);
  CHECK_THROWS(parse_de_mode("layered"));
}

TEST_CASE("trace CSV") {
  DeTrace t;
  t.q = {0.5, 0.25};
  std::ostringstream o;
  write_de_trace_csv(o, t);
  CHECK(o.str() == "iteration,q\n0,0.5\n1,0.25\n");
}

TEST_CASE("operation counts and decoding time") {
  const auto d36 = DegreeDistribution::regular(3, 6);
  CHECK(edge_count(d36, 1e6) == doctest::Approx(3e6));
  CHECK(ops_per_iteration(d36, 1e6) == doctest::Approx(2.1e7));
  CHECK(ops_per_iteration(d36, 2e6) == 2.0 * ops_per_iteration(d36, 1e6));
  const auto d24 = DegreeDistribution::regular(2, 4);
  CHECK(edge_count(d24, 1000.0) == doctest::Approx(2000.0));
  CHECK(ops_per_iteration(d24, 1000.0) == doctest::Approx(14000.0));

  CHECK(decoding_time({{2.1e7, 10.0}}, 0.0) == 0.0);
  CHECK(decoding_time({{2.1e7, 10.0}}, 3.2e-9) == doctest::Approx(0.672));
  CHECK(decoding_time({{2.1e7, 10.0}, {1e6, 2.0}}, 1e-9) == doctest::Approx(0.212));

  CHECK(calibrate_ch(1.0, 1e9) == doctest::Approx(1e-9));
  CHECK(calibrate_ch(2.0, 1e9) == 2.0 * calibrate_ch(1.0, 1e9));
  CHECK_THROWS_AS(calibrate_ch(0.0, 1e9), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_ch(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("slice plan") {
  const auto plan = plan_slices(2.2147, 5, 2.5e-10);
  REQUIRE(plan.size() == 5);
  for (const auto& p : plan) {
    CHECK(p.capacity >= 0.0);
    CHECK(p.capacity <= 1.0);
    if (p.disclosed) {
      CHECK(p.capacity * 0.9 < 0.01);
      continue;
    }
    CHECK(p.rate == doctest::Approx(0.9 * p.capacity));
    CHECK(p.dd.design_rate() == doctest::Approx(p.rate).epsilon(1e-6));
    // The equivalent BSC has the slice's capacity.
    const double h2 = -p.crossover * std::log2(p.crossover) - (1 - p.crossover) * std::log2(1 - p.crossover);
    CHECK(1.0 - h2 == doctest::Approx(p.capacity).epsilon(1e-6));
  }
  CHECK(plan[0].capacity < plan[4].capacity);
  const double w = iteration_weight(plan);
  CHECK(w > 0.0);
}

TEST_CASE("measured iterations against DE") {
  // Frames stop at zero bit errors, which matches a DE target near 1/n.
  // The Gaussian approximation and per-frame fluctuations let the measured
  // mean land up to one iteration under the DE count.
  const auto d36 = DegreeDistribution::regular(3, 6);
  const std::uint32_t n = 10000;
  const auto code = construct_code(d36, n, 3);
  BpDecoder dec(code);
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  for (double g : {1.5, 2.0, 3.0}) {
    std::normal_distribution<double> noise(0.0, std::sqrt(1.0 / g));
    const int de = *density_evolution(g, d36, 1.0 / n).iterations;
    double sum = 0.0;
    int conv = 0;
    for (int f = 0; f < 20; ++f) {
      std::vector<Bit> x(n);
      std::vector<double> llr(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        x[i] = coin(rng) ? 1 : 0;
        llr[i] = 2.0 * g * ((x[i] ? -1.0 : 1.0) + noise(rng));
      }
      const auto r = dec.decode(llr, syndrome(code, x), 200);
      if (!r.converged) continue;
      ++conv;
      sum += r.iterations;
    }
    REQUIRE(conv > 15);
    CHECK(sum / conv >= de - 1.0);
  }
}
