#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace cvqkd {

/// Gaussian tail probability Q(z) = P(N(0,1) > z).
double q_func(double z);

/// Inverse of the Gaussian tail, accurate down to p ~ 1e-300.
double q_inv(double p);

/// Standard normal CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Binary entropy in bits; h2(0) = h2(1) = 0.
double binary_entropy(double p);

/// -p log2 p with the 0 log 0 = 0 convention.
inline double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

struct MinimizeResult {
  double x;
  double fx;
  int evaluations;
};

/// Golden-section minimization of a unimodal function on [lo, hi].
MinimizeResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                       double hi, double x_tol);

/// SplitMix64 step; used to derive independent per-stream seeds from one run seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the stream `stream` derived from a base seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace cvqkd
