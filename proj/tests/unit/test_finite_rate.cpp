#include <doctest.h>

#include <cmath>

#include "cvqkd/channel.hpp"
#include "cvqkd/finite_rate.hpp"
#include "cvqkd/quantizer.hpp"

using namespace cvqkd;

namespace {

constexpr double kGammaStd = 2.2147;
constexpr double kEpsStd = 2.5e-10;

// Q^{-1} by bisection on erfc.
double qinv_oracle(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double c_fin_oracle(double g, double n, double eps) {
  const double A = g / 2.0 * (g + 2.0) / ((g + 1.0) * (g + 1.0)) * std::log(eps) * std::log(eps);
  return 0.5 * std::log2(1.0 + g) - (std::sqrt(n * A) * qinv_oracle(eps) + 0.5 * std::log2(n)) / n;
}

}  // namespace

TEST_CASE("dispersion") {
  CHECK(dispersion(0.0, kEpsStd) == 0.0);
  const double ln = std::log(kEpsStd);
  const double hand = kGammaStd / 2.0 * (kGammaStd + 2.0) / std::pow(kGammaStd + 1.0, 2) * ln * ln;
  CHECK(dispersion(kGammaStd, kEpsStd) == doctest::Approx(hand).epsilon(1e-14));
  CHECK(dispersion(kGammaStd, kEpsStd) == doctest::Approx(220.8).epsilon(1e-3));
  // eps -> eps^2 doubles ln eps.
  CHECK(dispersion(kGammaStd, kEpsStd * kEpsStd) == doctest::Approx(4.0 * dispersion(kGammaStd, kEpsStd)));
  CHECK(dispersion(kGammaStd, kEpsStd, LogMode::Bits) ==
        doctest::Approx(dispersion(kGammaStd, kEpsStd) / (std::log(2.0) * std::log(2.0))));
  CHECK(parse_log_mode(to_string(LogMode::Bits)) == LogMode::Bits);
  CHECK(parse_log_mode("as-written") == LogMode::Natural);
  CHECK_THROWS(parse_log_mode("base10"));
}

TEST_CASE("finite capacity examples") {
  const double c = c_finite(kGammaStd, 3.6e7, kEpsStd);
  CHECK(c == doctest::Approx(c_fin_oracle(kGammaStd, 3.6e7, kEpsStd)).epsilon(1e-10));
  CHECK(c == doctest::Approx(0.827).epsilon(1e-3));
  const auto b = beta_finite(kGammaStd, 3.6e7, kEpsStd, mutual_information(kGammaStd));
  CHECK(b.beta_fin == doctest::Approx(0.982).epsilon(1e-3));
  CHECK(b.A == doctest::Approx(dispersion(kGammaStd, kEpsStd)));
  CHECK_FALSE(b.out_of_range);

  CHECK(mutual_information(kGammaStd) - c_finite(kGammaStd, 1e12, kEpsStd) < 1e-4);
  CHECK(mutual_information(kGammaStd) - c_finite(kGammaStd, 1e12, kEpsStd) > 0.0);
  // Median point: the dispersion term vanishes.
  const double n = 5000.0;
  CHECK(c_finite(kGammaStd, n, 0.5) ==
        doctest::Approx(mutual_information(kGammaStd) - 0.5 * std::log2(n) / n).epsilon(1e-12));

  const auto tiny = beta_finite(kGammaStd, 10.0, kEpsStd, mutual_information(kGammaStd));
  CHECK(tiny.C_fin < 0.0);
  CHECK(tiny.negative);
  CHECK(tiny.out_of_range);
  CHECK_THROWS(beta_finite(kGammaStd, 1e6, kEpsStd, 0.0));
}

TEST_CASE("finite capacity is increasing in n and bounded by C") {
  for (double g : {0.2, 1.0, kGammaStd, 10.0}) {
    for (LogMode mode : {LogMode::Natural, LogMode::Bits}) {
      double prev = -1e300;
      for (double n = 1e3; n <= 1e13; n *= 1.3) {
        const double c = c_finite(g, n, kEpsStd, mode);
        CHECK(c > prev);
        CHECK(c <= mutual_information(g));
        prev = c;
        const auto b = beta_finite(g, n, kEpsStd, mutual_information(g), mode);
        if (b.C_fin >= 0.0) {
          CHECK(b.beta_fin >= 0.0);
          CHECK(b.beta_fin <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("realized efficiency") {
  const double iab = 0.8;
  const auto ideal = beta_realized(5.0, 5, {0.1, 0.1, 0.2, 0.2, 0.2}, iab);
  CHECK(ideal.beta_direct == doctest::Approx(1.0));
  CHECK(ideal.R_s == doctest::Approx(4.2));

  const auto none = beta_realized(4.0, 5, {0, 0, 0, 0, 0}, iab);
  CHECK(none.beta_direct == doctest::Approx(-1.25));
  CHECK(none.nonpositive);

  CHECK_THROWS_AS(beta_realized(4.0, 5, {0.1, 0.1}, iab), std::invalid_argument);
  CHECK_THROWS_AS(beta_realized(4.0, 1, {1.0}, iab), std::invalid_argument);
  CHECK_THROWS_AS(beta_realized(4.0, 1, {0.5}, 0.0), std::invalid_argument);

  // Standard settings with rates 10% below the per-slice capacities.
  const GaussianChannel ch{1.0, 1.0 / kGammaStd};
  const auto d = build_quantizer(ch, 5);
  const auto h = slice_conditional_entropies(d.config, ch, true);
  std::vector<double> rates;
  for (double v : h) rates.push_back(0.9 * (1.0 - v));
  const double I = mutual_information(kGammaStd);
  const auto r = beta_realized(d.entropies.H_MY, 5, rates, I, d.entropies.H_MY_given_X);
  CHECK(r.beta_direct == doctest::Approx(r.beta_syndrome).epsilon(1e-14));
  REQUIRE(r.slepian_wolf_ok.has_value());
  CHECK(*r.slepian_wolf_ok);
  CHECK(r.beta_direct > 0.0);
  CHECK(r.beta_direct < 1.0);
  // Rates above capacity break the Slepian-Wolf bound.
  std::vector<double> greedy;
  for (double v : h) greedy.push_back(std::min(0.99, 1.1 * (1.0 - v)));
  CHECK_FALSE(*beta_realized(d.entropies.H_MY, 5, greedy, I, d.entropies.H_MY_given_X).slepian_wolf_ok);
}
