#include "cvqkd/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "cvqkd/channel.hpp"
#include "cvqkd/numeric.hpp"
#include "cvqkd/security.hpp"

namespace cvqkd {

double assemble_B1(double N, double S_BE, double Delta_AEP, double eps_PA) {
  return N * S_BE + std::sqrt(N) * Delta_AEP + 2.0 * std::log2(1.0 / (2.0 * eps_PA));
}

double assemble_B2(const std::vector<DegreeDistribution>& dds, const std::vector<double>& D, double c_h) {
  if (dds.size() != D.size()) throw std::invalid_argument("assemble_B2: one D per distribution");
  double s = 0.0;
  for (std::size_t j = 0; j < dds.size(); ++j) s += 7.0 * dds[j].edge_factor() * D[j] * c_h;
  return s;
}

RateModel build_rate_model(const RunConfig& cfg, const ModelOptions& opts) {
  const auto& p = cfg.protocol;
  p.validate();
  cfg.eps.validate();
  RateModel m;
  m.N = p.reconciled_count();
  m.N_o = static_cast<double>(p.N_o);
  m.gamma = snr(p).gamma;
  m.I_AB = mutual_information(m.gamma);
  m.eps_EC = cfg.eps.eps_EC;
  m.eps_PA = cfg.eps.eps_PA;
  m.log_mode = opts.log_mode;
  m.A = dispersion(m.gamma, m.eps_EC, m.log_mode);
  m.q_inv = q_inv(m.eps_EC);
  m.S_BE = holevo_worst_case(p, cfg.eps.eps_PE, static_cast<double>(p.N_e)).S_BE;
  m.Delta_AEP = delta_aep(p.m, cfg.eps.total(), cfg.eps.eps_s, m.N);
  m.B1 = assemble_B1(m.N, m.S_BE, m.Delta_AEP, m.eps_PA);
  if (opts.B2) {
    m.B2 = *opts.B2;
  } else {
    SlicePlanOptions so;
    so.de_mode = opts.de_mode;
    m.slices = plan_slices(m.gamma, p.m, m.eps_EC, so);
    m.B2 = 7.0 * p.c_h * iteration_weight(m.slices, so.max_iter);
  }
  return m;
}

double k_prime(const RateModel& model, double n_r) {
  const double c = c_finite(model.gamma, n_r, model.eps_EC, model.log_mode);
  return (model.N * c - model.B1) / (model.B2 * n_r);
}

CurvePoint evaluate_point(const RateModel& model, double n_r) {
  CurvePoint pt;
  pt.N_R = n_r;
  pt.C_fin = c_finite(model.gamma, n_r, model.eps_EC, model.log_mode);
  pt.beta_fin = model.I_AB > 0.0 ? pt.C_fin / model.I_AB : 0.0;
  pt.K_Finite = (model.N * pt.C_fin - model.B1) / model.N_o;
  pt.delta_t = model.B2 * n_r;
  pt.K_prime = model.N_o * pt.K_Finite / pt.delta_t;
  return pt;
}

double stationarity(const RateModel& model, double n_r) {
  const double N = model.N;
  const double n = n_r;
  return -N * model.I_AB / (n * n) - (N - 2.0 * N * std::log(n)) / (2.0 * n * n * n) +
         3.0 * N * std::sqrt(model.A) * model.q_inv / (2.0 * std::pow(n, 2.5)) + model.B1 / (n * n);
}

ConcavityTerms concavity_terms(const RateModel& model, double n_r) {
  const double N = model.N;
  ConcavityTerms t;
  t.lhs = 12.0 * N * std::log(n_r) - 10.0 * N + 15.0 * std::sqrt(model.A) * model.q_inv * N * std::sqrt(n_r);
  t.rhs = 8.0 * model.I_AB * N * n_r - 8.0 * model.B1 * n_r;
  return t;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_grid: need 0 < lo < hi, points >= 2");
  std::vector<double> g(points);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) g[i] = std::exp(a + (b - a) * i / (points - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<CurvePoint> k_prime_curve(const RateModel& model, const std::vector<double>& grid) {
  std::vector<CurvePoint> c;
  c.reserve(grid.size());
  for (double n : grid) c.push_back(evaluate_point(model, n));
  return c;
}

GainReport gain_report(const std::vector<CurvePoint>& curve) {
  if (curve.size() < 2) throw std::invalid_argument("gain_report: need at least two points");
  GainReport g;
  auto [mn, mx] = std::minmax_element(curve.begin(), curve.end(),
                                      [](const CurvePoint& a, const CurvePoint& b) { return a.K_prime < b.K_prime; });
  g.max_K = mx->K_prime;
  g.min_K = mn->K_prime;
  g.argmax = mx->N_R;
  g.argmin = mn->N_R;
  g.gain = g.max_K / g.min_K;
  g.min_nonpositive = g.min_K <= 0.0;
  return g;
}

OptimizationResult solve_optimal_nr(const RateModel& model, double lo, double hi) {
  if (hi <= 0.0) hi = model.N;
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("solve_optimal_nr: empty interval");
  OptimizationResult r;
  r.lo = lo;
  r.hi = hi;
  r.B1 = model.B1;
  r.B2 = model.B2;
  r.log_mode = model.log_mode;
  r.midpoint_derivative = std::fabs(stationarity(model, std::sqrt(lo * hi)));

  // Locate the first + to - sign change on a log scan; K' rises then falls.
  const auto scan = log_grid(lo, hi, 400);
  std::optional<std::pair<double, double>> bracket;
  double prev = stationarity(model, scan[0]);
  for (std::size_t i = 1; i < scan.size(); ++i) {
    const double cur = stationarity(model, scan[i]);
    if (prev > 0.0 && cur <= 0.0) {
      bracket = {scan[i - 1], scan[i]};
      break;
    }
    prev = cur;
  }

  if (bracket) {
    double a = bracket->first, b = bracket->second;
    double fa = stationarity(model, a), fb = stationarity(model, b);
    int it = 0;
    while ((b - a) > 1e-4 * b && it < 200) {
      const double mid = std::sqrt(a * b);
      const double fm = stationarity(model, mid);
      ++it;
      if (fm > 0.0) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
        fb = fm;
      }
    }
    // Secant polish, kept inside the bracket.
    double x0 = a, x1 = b, f0 = fa, f1 = fb;
    double x = 0.5 * (a + b);
    for (int k = 0; k < 60; ++k) {
      ++it;
      if (f1 == f0) break;
      x = x1 - f1 * (x1 - x0) / (f1 - f0);
      if (!(x > a && x < b)) x = 0.5 * (a + b);
      const double fx = stationarity(model, x);
      if (fx > 0.0) {
        a = x;
      } else {
        b = x;
      }
      const double step = std::fabs(x - x1);
      x0 = x1;
      f0 = f1;
      x1 = x;
      f1 = fx;
      if (step <= 1e-6 * x || fx == 0.0) break;
    }
    r.N_R_star = x;
    r.interior_root = true;
    r.iterations = it;
  } else {
    r.N_R_star = k_prime(model, lo) >= k_prime(model, hi) ? lo : hi;
    r.interior_root = false;
  }
  r.root_residual = std::fabs(stationarity(model, r.N_R_star));
  r.K_prime_max = k_prime(model, r.N_R_star);

  const auto curve = k_prime_curve(model, log_grid(lo, hi, 200));
  const auto g = gain_report(curve);
  r.grid_N_R = g.argmax;
  r.grid_K_prime = g.max_K;
  r.gain = g.gain;
  r.gain_min_nonpositive = g.min_nonpositive;
  r.concavity_at_star = concavity_terms(model, r.N_R_star);
  r.concavity_ok = r.concavity_at_star.holds();
  return r;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve,
                     const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "N_R,C_fin,beta_fin,K_Finite,delta_t,K_prime\n";
  out.precision(12);
  for (const auto& p : curve) {
    out << p.N_R << ',' << p.C_fin << ',' << p.beta_fin << ',' << p.K_Finite << ',' << p.delta_t << ','
        << p.K_prime << '\n';
  }
}

std::vector<std::pair<double, double>> second_differences(const RateModel& model, double lo, double hi,
                                                          int points) {
  std::vector<std::pair<double, double>> out;
  for (double n : log_grid(lo, hi, points)) {
    const double h = 1e-3 * n;
    const double lo_n = std::max(n - h, 1.0);
    out.emplace_back(n, k_prime(model, n + h) - 2.0 * k_prime(model, n) + k_prime(model, lo_n));
  }
  return out;
}

ConcavityReport concavity_check(const RunConfig& base, const ParameterBox& box, int samples,
                                std::uint64_t seed, LogMode log_mode) {
  if (samples < 1) throw std::invalid_argument("concavity_check: samples must be >= 1");
  ConcavityReport rep;
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // One stratified permutation per dimension.
  auto strata = [&] {
    std::vector<int> idx(samples);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
  };
  const auto sv = strata(), st = strata(), sx = strata();
  auto draw = [&](int stratum, double lo, double hi) { return lo + (hi - lo) * (stratum + u(rng)) / samples; };

  for (int i = 0; i < samples; ++i) {
    RunConfig cfg = base;
    cfg.protocol.V_A = draw(sv[i], box.V_A_lo, box.V_A_hi);
    cfg.protocol.T = draw(st[i], box.T_lo, box.T_hi);
    cfg.protocol.xi_ch = draw(sx[i], box.xi_lo, box.xi_hi);
    RateModel m;
    try {
      if (!(cfg.protocol.T > 0.0)) throw std::domain_error("T = 0");
      ModelOptions mo;
      mo.log_mode = log_mode;
      mo.B2 = 1.0;  // irrelevant to the sign of the second derivative
      m = build_rate_model(cfg, mo);
    } catch (const std::exception& e) {
      ++rep.skipped;
      if (rep.warnings.size() < 20) {
        rep.warnings.push_back("skipped V_A=" + std::to_string(cfg.protocol.V_A) + " T=" +
                               std::to_string(cfg.protocol.T) + ": " + e.what());
      }
      continue;
    }
    ++rep.evaluated;
    if (rep.witness) continue;
    for (double n : log_grid(1e5, m.N, 50)) {
      const auto t = concavity_terms(m, n);
      if (!t.holds()) {
        rep.ok = false;
        rep.witness = ConcavityWitness{cfg.protocol.V_A, cfg.protocol.T, cfg.protocol.xi_ch, n, t};
        break;
      }
    }
  }
  return rep;
}

}  // namespace cvqkd
