#include "cvqkd/quantizer.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cvqkd/numeric.hpp"

namespace cvqkd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// P(a <= Y < b) for Y ~ N(mu, sigma^2), computed from the nearer tail.
double interval_probability(double a, double b, double mu, double sigma) {
  const double za = (a - mu) / sigma;
  const double zb = (b - mu) / sigma;
  if (za >= 0.0) return std::max(0.0, q_func(za) - q_func(zb));
  if (zb <= 0.0) return std::max(0.0, q_func(-zb) - q_func(-za));
  return std::max(0.0, 1.0 - q_func(zb) - q_func(-za));
}

template <typename F>
double integrate_over_x(F&& f, double sx) {
  using boost::math::quadrature::gauss_kronrod;
  const double span = 12.0 * sx;
  double err = 0.0;
  // Split at zero so the integrand's symmetry point is a node boundary.
  const double left = gauss_kronrod<double, 31>::integrate(f, -span, 0.0, 20, 1e-11, &err);
  const double right = gauss_kronrod<double, 31>::integrate(f, 0.0, span, 20, 1e-11, &err);
  return left + right;
}

double normal_pdf(double x, double var) {
  return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * M_PI * var);
}

}  // namespace

double QuantizerConfig::lower_edge(std::uint32_t k) const {
  if (k == 0) return -kInf;
  return (static_cast<double>(k) - static_cast<double>(num_bins() / 2)) * delta;
}

double QuantizerConfig::upper_edge(std::uint32_t k) const {
  if (k + 1 >= num_bins()) return kInf;
  return (static_cast<double>(k + 1) - static_cast<double>(num_bins() / 2)) * delta;
}

std::uint32_t gray_decode(std::uint32_t g) {
  std::uint32_t k = g;
  for (std::uint32_t s = 1; s < 32; s <<= 1) k ^= k >> s;
  return k;
}

Quantized quantize(const QuantizerConfig& q, double y) {
  const auto bins = static_cast<std::int64_t>(q.num_bins());
  const double raw = std::floor(y / q.delta) + static_cast<double>(bins / 2);
  std::int64_t k = 0;
  if (std::isnan(raw)) {
    k = bins / 2;
  } else if (raw <= 0.0) {
    k = 0;
  } else if (raw >= static_cast<double>(bins - 1)) {
    k = bins - 1;
  } else {
    k = static_cast<std::int64_t>(raw);
  }
  const auto bin = static_cast<std::uint32_t>(k);
  return {bin, gray_encode(bin)};
}

void bin_probabilities(const QuantizerConfig& q, double noise_var, double x,
                       std::span<double> out) {
  const double sigma = std::sqrt(noise_var);
  const std::uint32_t n = q.num_bins();
  for (std::uint32_t k = 0; k < n; ++k) {
    out[k] = interval_probability(q.lower_edge(k), q.upper_edge(k), x, sigma);
  }
}

QuantizedEntropies quantized_entropies(const QuantizerConfig& q, const GaussianChannel& ch) {
  if (!(ch.signal_var > 0.0 && ch.noise_var > 0.0)) {
    throw std::domain_error("quantized_entropies: variances must be positive");
  }
  const std::uint32_t n = q.num_bins();
  const double sy = std::sqrt(ch.signal_var + ch.noise_var);
  double h = 0.0;
  for (std::uint32_t k = 0; k < n; ++k) {
    h += plogp(interval_probability(q.lower_edge(k), q.upper_edge(k), 0.0, sy));
  }
  std::vector<double> p(n);
  auto cond = [&](double x) {
    bin_probabilities(q, ch.noise_var, x, p);
    double hx = 0.0;
    for (double v : p) hx += plogp(v);
    return normal_pdf(x, ch.signal_var) * hx;
  };
  const double hc = integrate_over_x(cond, std::sqrt(ch.signal_var));
  return {h, std::min(hc, h)};
}

QuantizedEntropies quantized_entropies(const QuantizerConfig& q, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("quantized_entropies: gamma must be > 0");
  return quantized_entropies(q, GaussianChannel{1.0, 1.0 / gamma});
}

QuantizerDesign build_quantizer(const GaussianChannel& ch, int m) {
  if (m < 1 || m > 16) throw std::domain_error("build_quantizer: m must lie in [1, 16]");
  if (!(ch.signal_var > 0.0 && ch.noise_var > 0.0) || !std::isfinite(ch.snr())) {
    throw std::domain_error("build_quantizer: channel SNR must be positive and finite");
  }
  const double sy = std::sqrt(ch.signal_var + ch.noise_var);
  QuantizerDesign d;
  d.config.m = m;
  if (m == 1) {
    // The only interior boundary sits at zero for every delta.
    d.config.delta = sy;
    d.entropies = quantized_entropies(d.config, ch);
    d.evaluations = 1;
    return d;
  }
  auto neg_mi = [&](double delta) {
    QuantizerConfig q{m, delta};
    return -quantized_entropies(q, ch).mutual_information();
  };
  const auto r = golden_section_minimize(neg_mi, 0.01 * sy, 2.0 * sy, 1e-6 * sy);
  d.config.delta = r.x;
  d.entropies = quantized_entropies(d.config, ch);
  d.evaluations = r.evaluations;
  return d;
}

QuantizerDesign build_quantizer(double gamma, int m) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::domain_error("build_quantizer: gamma must be positive and finite");
  }
  return build_quantizer(GaussianChannel{1.0, 1.0 / gamma}, m);
}

std::vector<double> slice_conditional_entropies(const QuantizerConfig& q,
                                                const GaussianChannel& ch, bool conditioned) {
  const std::uint32_t n = q.num_bins();
  const int m = q.m;
  std::vector<double> p(n);
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  if (conditioned) {
    // H(l_<=j | X) for every prefix length, then chain-rule differences.
    std::vector<double> prefix(static_cast<std::size_t>(m) + 1, 0.0);
    for (int len = 1; len <= m; ++len) {
      const std::uint32_t mask = (len >= 32) ? ~0u : ((1u << len) - 1u);
      std::vector<double> agg(std::size_t{1} << len);
      auto f = [&](double x) {
        bin_probabilities(q, ch.noise_var, x, p);
        std::fill(agg.begin(), agg.end(), 0.0);
        for (std::uint32_t k = 0; k < n; ++k) agg[gray_encode(k) & mask] += p[k];
        double h = 0.0;
        for (double v : agg) h += plogp(v);
        return normal_pdf(x, ch.signal_var) * h;
      };
      prefix[static_cast<std::size_t>(len)] = integrate_over_x(f, std::sqrt(ch.signal_var));
    }
    for (int j = 0; j < m; ++j) {
      out[static_cast<std::size_t>(j)] =
          std::clamp(prefix[static_cast<std::size_t>(j) + 1] - prefix[static_cast<std::size_t>(j)],
                     0.0, 1.0);
    }
    return out;
  }
  for (int j = 0; j < m; ++j) {
    auto f = [&](double x) {
      bin_probabilities(q, ch.noise_var, x, p);
      double p1 = 0.0;
      for (std::uint32_t k = 0; k < n; ++k) {
        if ((gray_encode(k) >> j) & 1u) p1 += p[k];
      }
      return normal_pdf(x, ch.signal_var) * binary_entropy(p1);
    };
    out[static_cast<std::size_t>(j)] = integrate_over_x(f, std::sqrt(ch.signal_var));
  }
  return out;
}

double estimate_slice_ber(std::span<const std::uint32_t> alice_labels,
                          std::span<const std::uint32_t> bob_labels, int j) {
  if (alice_labels.size() != bob_labels.size()) {
    throw std::invalid_argument("estimate_slice_ber: column lengths differ");
  }
  if (alice_labels.empty()) throw std::invalid_argument("estimate_slice_ber: empty columns");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < alice_labels.size(); ++i) {
    diff += ((alice_labels[i] ^ bob_labels[i]) >> j) & 1u;
  }
  return static_cast<double>(diff) / static_cast<double>(alice_labels.size());
}

double slice_llr(const QuantizerConfig& q, double noise_var, double x, std::uint32_t lower_bits,
                 int j, bool conditioning) {
  const std::uint32_t n = q.num_bins();
  const std::uint32_t mask = conditioning ? ((1u << j) - 1u) : 0u;
  const std::uint32_t want = lower_bits & mask;
  const double sigma = std::sqrt(noise_var);
  double p0 = 0.0, p1 = 0.0;
  if (sigma == 0.0) {
    const auto hit = quantize(q, x);
    if ((hit.label & mask) == want) ((hit.label >> j) & 1u ? p1 : p0) = 1.0;
  } else {
    // Bins beyond 20 sigma carry < 1e-87 of the mass; fall back to every
    // bin when the window leaves either hypothesis negligible.
    constexpr double kWindow = 20.0;
    const double half = static_cast<double>(n / 2);
    auto bin_of = [&](double y) {
      const double k = std::floor(y / q.delta + half);
      return static_cast<std::uint32_t>(std::clamp(k, 0.0, static_cast<double>(n - 1)));
    };
    auto accumulate = [&](std::uint32_t lo, std::uint32_t hi) {
      p0 = p1 = 0.0;
      // Tail mass beyond each edge, from the side of x the edge lies on.
      double prev_tail = 0.0;
      bool prev_above = false;
      for (std::uint32_t k = lo; k <= hi; ++k) {
        if (k == lo) {
          const double a = q.lower_edge(k);
          const double za = (a - x) / sigma;
          prev_above = za >= 0.0;
          prev_tail = std::isinf(a) ? 0.0 : q_func(std::fabs(za));
        }
        const double b = q.upper_edge(k);
        const double zb = (b - x) / sigma;
        const bool above = zb >= 0.0 || std::isinf(b);
        const double tail = std::isinf(b) ? 0.0 : q_func(std::fabs(zb));
        const std::uint32_t label = gray_encode(k);
        if ((label & mask) == want) {
          double pk;
          if (prev_above) pk = prev_tail - tail;
          else if (!above || zb <= 0.0) pk = tail - prev_tail;
          else pk = 1.0 - tail - prev_tail;
          ((label >> j) & 1u ? p1 : p0) += std::max(0.0, pk);
        }
        prev_tail = tail;
        prev_above = above;
      }
    };
    accumulate(bin_of(x - kWindow * sigma), bin_of(x + kWindow * sigma));
    if (!(std::max(p0, p1) >= 1e-30 && p0 > 0.0 && p1 > 0.0)) accumulate(0, n - 1);
  }
  if (p1 <= 0.0 && p0 <= 0.0) return 0.0;
  if (p1 <= 0.0) return kLlrMax;
  if (p0 <= 0.0) return -kLlrMax;
  return std::clamp(std::log(p0 / p1), -kLlrMax, kLlrMax);
}

}  // namespace cvqkd
