#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cvqkd/config.hpp"

namespace cvqkd {

struct SnrResult {
  double gamma;        ///< (V_A T / 2) / (1 + (xi_ch + xi_d) / 2)
  double noise_power;  ///< 1 / gamma; +inf when gamma = 0
};

SnrResult snr(const ProtocolConfig& cfg);

/// AWGN capacity 0.5 log2(1 + gamma), taken as I_AB per quadrature.
double mutual_information(double gamma);

struct Quadratures {
  std::vector<double> x;  ///< Alice
  std::vector<double> y;  ///< Bob
};

/// Samples are produced in fixed-size chunks seeded from (seed, chunk index),
/// so the output does not depend on how chunks are scheduled.
inline constexpr std::size_t kQuadratureChunk = 1u << 16;

/// x ~ N(0, V_A), y = x + n with n ~ N(0, 1/gamma). Throws on count == 0.
Quadratures generate_quadratures(const ProtocolConfig& cfg, std::size_t count,
                                 std::uint64_t seed);

/// Measurement-level model used for parameter estimation:
/// y = sqrt(eta_d T) x + z with Var z = eta_d T xi_ch + 1 + xi_d.
Quadratures generate_physical_quadratures(const ProtocolConfig& cfg, std::size_t count,
                                          std::uint64_t seed);

/// Indices i with |y_i| >= threshold, ascending. threshold 0 keeps everything.
std::vector<std::size_t> post_select(const std::vector<double>& y, double threshold);

}  // namespace cvqkd
