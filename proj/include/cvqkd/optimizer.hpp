#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvqkd/complexity.hpp"
#include "cvqkd/config.hpp"
#include "cvqkd/finite_rate.hpp"

namespace cvqkd {

/// The block-length-independent constants of K'(N_R).
struct RateModel {
  double N = 0, N_o = 0;
  double gamma = 0, I_AB = 0;
  double eps_EC = 0, eps_PA = 0;
  LogMode log_mode = LogMode::Natural;
  double A = 0;        ///< dispersion
  double q_inv = 0;    ///< Q^{-1}(eps_EC)
  double S_BE = 0;
  double Delta_AEP = 0;
  double B1 = 0;       ///< N S_BE + sqrt(N) Delta_AEP + 2 log2(1/(2 eps_PA))
  double B2 = 0;       ///< seconds per unit N_R: sum_j 7 edge_factor_j D_j c_h
  std::vector<SlicePlan> slices;  ///< empty when B2 was supplied directly
};

/// B1 from its parts; B2 = 7 c_h sum_j edge_factor_j D_j.
double assemble_B1(double N, double S_BE, double Delta_AEP, double eps_PA);
double assemble_B2(const std::vector<DegreeDistribution>& dds, const std::vector<double>& D, double c_h);

struct ModelOptions {
  LogMode log_mode = LogMode::Natural;
  DeMode de_mode = DeMode::Standard;
  /// When set, B2 is taken from here and no slice plan is built.
  std::optional<double> B2;
};

/// S_BE at the worst-case limits, Delta_AEP, dispersion, and the per-slice
/// cost plan for the configuration.
RateModel build_rate_model(const RunConfig& cfg, const ModelOptions& opts = {});

struct CurvePoint {
  double N_R = 0, C_fin = 0, beta_fin = 0, K_Finite = 0, delta_t = 0, K_prime = 0;
};

CurvePoint evaluate_point(const RateModel& model, double n_r);

/// (N C_fin - B1) / (B2 N_R).
double k_prime(const RateModel& model, double n_r);

/// B2 dK'/dN_R from the closed-form derivative (B2 cancels):
/// -N I/n^2 - (N - 2 N ln n)/(2 n^3) + 3 N sqrt(A) Q^{-1}/(2 n^{5/2}) + B1/n^2.
double stationarity(const RateModel& model, double n_r);

struct ConcavityTerms {
  double lhs = 0;  ///< 12 N ln n - 10 N + 15 sqrt(A) Q^{-1} N sqrt(n)
  double rhs = 0;  ///< 8 I N n - 8 B1 n
  [[nodiscard]] bool holds() const { return lhs > rhs; }
};
ConcavityTerms concavity_terms(const RateModel& model, double n_r);

struct OptimizationResult {
  double N_R_star = 0;
  double K_prime_max = 0;
  bool interior_root = false;  ///< false: monotone on the interval, best endpoint returned
  double root_residual = 0;    ///< |stationarity| at N_R_star
  double midpoint_derivative = 0;  ///< |stationarity| at the interval's log-midpoint
  int iterations = 0;
  double grid_N_R = 0;         ///< 200-point log-grid maximizer
  double grid_K_prime = 0;
  double lo = 1e5, hi = 0;
  double gain = 0;             ///< max K' / min K' over the grid
  bool gain_min_nonpositive = false;
  bool concavity_ok = false;   ///< inequality holds at N_R_star
  ConcavityTerms concavity_at_star;
  double B1 = 0, B2 = 0;
  LogMode log_mode = LogMode::Natural;
};

/// Bracketed root of the stationarity equation on [lo, hi] (default
/// [1e5, N]): bisection to 1e-4 then secant to 1e-6 relative, checked
/// against a 200-point log grid of K'.
OptimizationResult solve_optimal_nr(const RateModel& model, double lo = 1e5, double hi = 0);

struct GainReport {
  double gain = 0;
  double max_K = 0, min_K = 0;
  double argmax = 0, argmin = 0;
  bool min_nonpositive = false;  ///< ratio is not meaningful
};

/// max K' / min K' over a curve of at least two points.
GainReport gain_report(const std::vector<CurvePoint>& curve);

/// `points` log-spaced block lengths on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int points);
std::vector<CurvePoint> k_prime_curve(const RateModel& model, const std::vector<double>& grid);

/// Header "N_R,C_fin,beta_fin,K_Finite,delta_t,K_prime". Comment lines
/// starting with '#' carry run metadata when given.
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve,
                     const std::vector<std::string>& comments = {});

/// Central second differences of K' at `points` log-spaced N_R with step
/// 1e-3 N_R; returns the values (<= 0 where K' is concave).
std::vector<std::pair<double, double>> second_differences(const RateModel& model, double lo,
                                                          double hi, int points);

struct ParameterBox {
  double V_A_lo = 1, V_A_hi = 34;
  double T_lo = 0, T_hi = 1;
  double xi_lo = 0, xi_hi = 0.05;
};

struct ConcavityWitness {
  double V_A = 0, T = 0, xi_ch = 0, N_R = 0;
  ConcavityTerms terms;
};

struct ConcavityReport {
  bool ok = true;
  int samples = 0;
  int evaluated = 0;
  int skipped = 0;  ///< degenerate points (no estimable channel)
  std::optional<ConcavityWitness> witness;  ///< first violation
  std::vector<std::string> warnings;
};

/// Latin-hypercube sample of (V_A, T, xi_ch) with the rest of `base`
/// fixed; the inequality is tested on a 50-point N_R grid per sample.
ConcavityReport concavity_check(const RunConfig& base, const ParameterBox& box, int samples,
                                std::uint64_t seed, LogMode log_mode = LogMode::Natural);

}  // namespace cvqkd
