#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cvqkd {

/// Log-likelihood ratios are clipped to +-kLlrMax (natural log units).
inline constexpr double kLlrMax = 40.0;

/// Real-valued source/side-information pair y = x + n used to design the
/// quantizer: x ~ N(0, signal_var), n ~ N(0, noise_var).
struct GaussianChannel {
  double signal_var = 1.0;
  double noise_var = 1.0;
  [[nodiscard]] double snr() const { return signal_var / noise_var; }
};

/// Constant-step quantizer with 2^m bins centered on zero. Bin k covers
/// [(k - 2^(m-1)) delta, (k + 1 - 2^(m-1)) delta); the outermost bins extend
/// to -inf / +inf. Labels are binary-reflected Gray codes, bit 0 least
/// significant.
struct QuantizerConfig {
  int m = 5;
  double delta = 1.0;

  [[nodiscard]] std::uint32_t num_bins() const { return 1u << m; }
  /// Lower edge of bin k; -inf for k = 0.
  [[nodiscard]] double lower_edge(std::uint32_t k) const;
  /// Upper edge of bin k; +inf for the last bin.
  [[nodiscard]] double upper_edge(std::uint32_t k) const;
};

inline std::uint32_t gray_encode(std::uint32_t k) { return k ^ (k >> 1); }
std::uint32_t gray_decode(std::uint32_t g);

struct Quantized {
  std::uint32_t bin;
  std::uint32_t label;  ///< Gray label; bit j is l_j
};

/// Boundary points go to the upper bin; out-of-range values clamp.
Quantized quantize(const QuantizerConfig& q, double y);

struct QuantizedEntropies {
  double H_MY;          ///< entropy of M(Y), bits
  double H_MY_given_X;  ///< conditional entropy of M(Y) given X, bits
  [[nodiscard]] double mutual_information() const { return H_MY - H_MY_given_X; }
};

/// Entropy terms by numeric integration over X.
QuantizedEntropies quantized_entropies(const QuantizerConfig& q, const GaussianChannel& ch);
QuantizedEntropies quantized_entropies(const QuantizerConfig& q, double gamma);

struct QuantizerDesign {
  QuantizerConfig config;
  QuantizedEntropies entropies;
  int evaluations = 0;
};

/// Bin width maximizing I(M(Y); X), searched by golden section over
/// delta in [0.01, 2] sigma_y. Throws std::domain_error for gamma <= 0 or m < 1.
QuantizerDesign build_quantizer(const GaussianChannel& ch, int m);
QuantizerDesign build_quantizer(double gamma, int m);

/// Per-slice conditional entropies H(l_j | X, l_<j) (conditioned) or
/// H(l_j | X) (independent slices), in bits. Conditioned entries sum to
/// H(M(Y) | X).
std::vector<double> slice_conditional_entropies(const QuantizerConfig& q,
                                                const GaussianChannel& ch, bool conditioned);

/// Fraction of differing bits in column j. Rows are m-bit labels.
double estimate_slice_ber(std::span<const std::uint32_t> alice_labels,
                          std::span<const std::uint32_t> bob_labels, int j);

/// ln P(l_j = 0 | x, l_<j) / P(l_j = 1 | x, l_<j) for y ~ N(x, noise_var).
/// `lower_bits` holds l_0..l_{j-1} in its low bits. With conditioning off the
/// lower bits are ignored. Saturates at +-kLlrMax.
double slice_llr(const QuantizerConfig& q, double noise_var, double x, std::uint32_t lower_bits,
                 int j, bool conditioning = true);

/// Bin probabilities P(bin k | x) for y ~ N(x, noise_var), tail-stable.
void bin_probabilities(const QuantizerConfig& q, double noise_var, double x,
                       std::span<double> out);

}  // namespace cvqkd
