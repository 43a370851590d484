#include "cvqkd/complexity.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "cvqkd/numeric.hpp"
#include "cvqkd/quantizer.hpp"

namespace cvqkd {

namespace {

constexpr double kPhiA = 0.4527;
constexpr double kPhiB = 0.86;
constexpr double kPhiC = 0.0218;
// Means beyond this are treated as error-free; phi there is below 1e-100.
constexpr double kMeanCap = 1e4;

double phi_of(PhiKind kind, double v) { return kind == PhiKind::Exact ? phi(v) : phi_approx(v); }

double phi_inv_of(PhiKind kind, double w) {
  if (w <= 0.0) return kMeanCap;
  if (w >= 1.0) return 0.0;
  return std::min(kMeanCap, kind == PhiKind::Exact ? phi_inv_exact(w) : phi_inv(w));
}

/// 1 - (1 - s)^e without cancellation for tiny s.
double one_minus_pow_complement(double s, double e) {
  if (s >= 1.0) return 1.0;
  return -std::expm1(e * std::log1p(-s));
}

double binary_entropy_inverse(double h) {
  if (h <= 0.0) return 0.0;
  if (h >= 1.0) return 0.5;
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
    const double mid = 0.5 * (lo + hi);
    (binary_entropy(mid) < h ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double phi(double v) {
  if (v < 0.0 || std::isnan(v)) throw std::domain_error("phi: v must be >= 0");
  if (v == 0.0) return 1.0;
  // 1 - tanh(u/2) = 2 / (1 + e^u) keeps the integrand positive, so small
  // results keep their relative precision.
  const double sd = std::sqrt(2.0 * v);
  auto f = [&](double u) {
    const double z = (u - v) / sd;
    const double w = u > 0.0 ? 2.0 * std::exp(-u) / (1.0 + std::exp(-u)) : 2.0 / (1.0 + std::exp(u));
    return w * std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
  };
  const double half = 40.0 * std::sqrt(v);
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  // Split at 0 where the weight bends.
  double total = 0.0;
  const double lo = v - half, hi = v + half;
  if (lo < 0.0 && hi > 0.0) {
    total = gauss_kronrod<double, 61>::integrate(f, lo, 0.0, 25, 1e-12, &err) +
            gauss_kronrod<double, 61>::integrate(f, 0.0, hi, 25, 1e-12, &err);
  } else {
    total = gauss_kronrod<double, 61>::integrate(f, lo, hi, 25, 1e-12, &err);
  }
  return std::clamp(total, 0.0, 1.0);
}

double phi_approx(double v) {
  if (v < 0.0 || std::isnan(v)) throw std::domain_error("phi_approx: v must be >= 0");
  if (v == 0.0) return 1.0;
  return std::exp(-kPhiA * std::pow(v, kPhiB) + kPhiC);
}

double phi_inv(double w) {
  if (!(w > 0.0 && w <= 1.0)) throw std::domain_error("phi_inv: w must lie in (0, 1]");
  if (w == 1.0) return 0.0;
  const double base = (std::log(w) - kPhiC) / -kPhiA;
  // The approximation exceeds 1 for tiny v (e^0.0218); clamp those to v = 0.
  if (base <= 0.0) return 0.0;
  // Printed exponent 1.1628 is 1/0.86 rounded; the exact reciprocal keeps
  // phi_inv a true inverse.
  return std::pow(base, 1.0 / 0.86);
}

double phi_inv_exact(double w) {
  if (!(w > 0.0 && w <= 1.0)) throw std::domain_error("phi_inv_exact: w must lie in (0, 1]");
  if (w == 1.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (phi(hi) > w) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMeanCap) return kMeanCap;
  }
  for (int i = 0; i < 100 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) > w ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string to_string(DeMode mode) { return mode == DeMode::AsWritten ? "as-written" : "standard"; }

DeMode parse_de_mode(const std::string& s) {
  if (s == "as-written") return DeMode::AsWritten;
  if (s == "standard") return DeMode::Standard;
  throw std::invalid_argument("unknown DE mode: " + s);
}

DeResult density_evolution(double gamma, const DegreeDistribution& dd, double eps_EC, int max_iter,
                           DeMode mode, PhiKind phi_kind) {
  if (!(gamma > 0.0)) throw std::domain_error("density_evolution: gamma must be > 0");
  if (max_iter < 1) throw std::invalid_argument("density_evolution: max_iter must be >= 1");
  DeResult r;
  r.trace.mode = mode;

  if (mode == DeMode::AsWritten) {
    // L = 1 - sum_a lambda_a phi(ln gamma + (a-1) q_{k-1});
    // q_k = sum_b rho_b phi^{-1}(1 - L^(b-1)); q_0 = 0. Arguments below zero
    // (gamma < 1) are clamped to the phi domain.
    double q = 0.0;
    r.trace.q.push_back(q);
    for (int k = 1; k <= max_iter; ++k) {
      double s = 0.0;
      for (auto [a, la] : dd.lambda) {
        s += la * phi_of(phi_kind, std::max(0.0, std::log(gamma) + (a - 1) * q));
      }
      const double L = 1.0 - s;
      double next = 0.0;
      for (auto [b, rb] : dd.rho) {
        next += rb * phi_inv_of(phi_kind, 1.0 - std::pow(std::max(L, 0.0), b - 1));
      }
      q = next;
      r.trace.q.push_back(q);
      if (q <= eps_EC) {
        r.iterations = k;
        break;
      }
    }
    return r;
  }

  const auto node_frac = dd.variable_node_fractions();
  const double m0 = 2.0 * gamma;
  auto ber = [&](double mu) {
    double p = 0.0;
    for (std::size_t i = 0; i < dd.lambda.size(); ++i) {
      const double mean = m0 + dd.lambda[i].first * mu;
      p += node_frac[i] * q_func(std::sqrt(mean / 2.0));
    }
    return p;
  };
  double mu = 0.0;  // check-to-variable message mean
  r.trace.q.push_back(ber(0.0));
  for (int k = 1; k <= max_iter; ++k) {
    double s = 0.0;
    for (auto [a, la] : dd.lambda) s += la * phi_of(phi_kind, std::min(kMeanCap, m0 + (a - 1) * mu));
    double next = 0.0;
    for (auto [b, rb] : dd.rho) next += rb * phi_inv_of(phi_kind, one_minus_pow_complement(s, b - 1));
    mu = next;
    const double q = ber(mu);
    r.trace.q.push_back(q);
    if (q <= eps_EC) {
      r.iterations = k;
      break;
    }
  }
  return r;
}

void write_de_trace_csv(std::ostream& out, const DeTrace& trace) {
  out << "iteration,q\n";
  out.precision(17);
  for (std::size_t k = 0; k < trace.q.size(); ++k) out << k << ',' << trace.q[k] << '\n';
}

double edge_count(const DegreeDistribution& dd, double n) { return n * dd.edge_factor(); }

double ops_per_iteration(const DegreeDistribution& dd, double n) { return 7.0 * edge_count(dd, n); }

double decoding_time(const std::vector<SliceCost>& costs, double c_h) {
  double total = 0.0;
  for (const auto& c : costs) total += c.ops_per_iter * c.iterations;
  return c_h * total;
}

double calibrate_ch(double measured_elapsed, double total_ops) {
  if (!(measured_elapsed > 0.0)) throw std::invalid_argument("calibrate_ch: elapsed must be > 0");
  if (!(total_ops > 0.0)) throw std::invalid_argument("calibrate_ch: total_ops must be > 0");
  return measured_elapsed / total_ops;
}

std::vector<SlicePlan> plan_slices(double gamma, int m, double eps_EC, const SlicePlanOptions& opts) {
  const GaussianChannel ch{1.0, 1.0 / gamma};
  const auto design = build_quantizer(ch, m);
  const auto h = slice_conditional_entropies(design.config, ch, opts.conditioning);
  std::vector<SlicePlan> plan(m);
  for (int j = 0; j < m; ++j) {
    auto& p = plan[j];
    p.capacity = std::clamp(1.0 - h[j], 0.0, 1.0);
    p.crossover = binary_entropy_inverse(h[j]);
    p.rate = opts.rate_margin * p.capacity;
    if (p.rate < 0.01) {
      p.disclosed = true;
      p.rate = 0.0;
      continue;
    }
    p.gamma_eq = p.crossover > 0.0 ? std::pow(q_inv(p.crossover), 2) : 1e4;
    p.dd = DegreeDistribution::for_rate(p.rate);
    p.de_iterations = density_evolution(p.gamma_eq, p.dd, eps_EC, opts.max_iter, opts.de_mode).iterations;
  }
  return plan;
}

double iteration_weight(const std::vector<SlicePlan>& plan, int max_iter) {
  double w = 0.0;
  for (const auto& p : plan) {
    if (p.disclosed) continue;
    w += p.dd.edge_factor() * static_cast<double>(p.de_iterations.value_or(max_iter));
  }
  return w;
}

}  // namespace cvqkd
