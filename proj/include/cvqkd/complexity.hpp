#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvqkd/degree_distribution.hpp"

namespace cvqkd {

/// phi(v) = 1 - E[tanh(u/2)], u ~ N(v, 2v); phi(0) = 1. Adaptive quadrature.
double phi(double v);

/// exp(-0.4527 v^0.86 + 0.0218) for v > 0, 1 at v = 0.
double phi_approx(double v);

/// Inverse of phi_approx: ((ln w - 0.0218) / -0.4527)^(1/0.86) for w < 1,
/// 0 at w = 1. Throws std::domain_error outside (0, 1].
double phi_inv(double w);

/// Inverse of the exact phi by bisection. Throws outside (0, 1].
double phi_inv_exact(double w);

enum class DeMode {
  AsWritten,  ///< L uses phi(ln gamma + (a-1) q_{k-1}) with q_0 = 0, verbatim
  Standard    ///< Gaussian-approximation means, channel mean 2 gamma, BER via Q
};

enum class PhiKind { Approx, Exact };

std::string to_string(DeMode mode);
DeMode parse_de_mode(const std::string& s);

struct DeTrace {
  DeMode mode = DeMode::Standard;
  std::vector<double> q;  ///< q[k] after k iterations; q[0] is the start value
};

struct DeResult {
  std::optional<int> iterations;  ///< D: first k >= 1 with q_k <= eps; empty at the cap
  DeTrace trace;
};

inline constexpr int kDeMaxIter = 500;

/// Gaussian-approximation density evolution for a binary-input channel of
/// SNR gamma (channel LLR mean 2 gamma in standard mode).
DeResult density_evolution(double gamma, const DegreeDistribution& dd, double eps_EC,
                           int max_iter = kDeMaxIter, DeMode mode = DeMode::Standard,
                           PhiKind phi_kind = PhiKind::Approx);

/// CSV with header "iteration,q".
void write_de_trace_csv(std::ostream& out, const DeTrace& trace);

/// Edge count G = n * edge_factor.
double edge_count(const DegreeDistribution& dd, double n);

/// Operations per BP iteration, 7 G.
double ops_per_iteration(const DegreeDistribution& dd, double n);

struct SliceCost {
  double ops_per_iter = 0.0;  ///< E_j
  double iterations = 0.0;    ///< D_j
};

/// c_h * sum_j E_j D_j.
double decoding_time(const std::vector<SliceCost>& costs, double c_h);

/// Seconds per operation from a timed run. Throws on nonpositive inputs.
double calibrate_ch(double measured_elapsed, double total_ops);

/// Per-slice coding plan derived from the quantized channel at SNR gamma.
struct SlicePlan {
  double capacity = 0.0;   ///< 1 - H(l_j | X, l_<j), bits per bit
  double crossover = 0.0;  ///< BSC crossover with the same capacity
  double gamma_eq = 0.0;   ///< Q^{-1}(crossover)^2, the DE input SNR
  double rate = 0.0;       ///< design code rate; 0 when disclosed
  bool disclosed = false;  ///< capacity below the 0.01 rate floor
  DegreeDistribution dd;
  std::optional<int> de_iterations;
};

struct SlicePlanOptions {
  double rate_margin = 0.9;  ///< code rate = margin * capacity
  bool conditioning = true;
  DeMode de_mode = DeMode::Standard;
  int max_iter = kDeMaxIter;
};

/// Quantizer optimized for gamma, per-slice capacities, shipped degree
/// distributions and DE iteration counts.
std::vector<SlicePlan> plan_slices(double gamma, int m, double eps_EC,
                                   const SlicePlanOptions& opts = {});

/// Sum over coded slices of edge_factor * D_j (a slice that fails to
/// converge under DE contributes its iteration cap).
double iteration_weight(const std::vector<SlicePlan>& plan, int max_iter = kDeMaxIter);

}  // namespace cvqkd
