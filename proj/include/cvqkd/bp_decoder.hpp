#pragma once

#include <span>
#include <vector>

#include "cvqkd/ldpc_code.hpp"

namespace cvqkd {

struct DecodeResult {
  std::vector<Bit> bits;
  std::vector<double> posterior;  ///< a-posteriori LLRs when decoding stopped
  int iterations = 0;             ///< 0 when the channel decisions already fit
  bool converged = false;
};

/// Pairwise box-plus: 2 atanh(tanh(a/2) tanh(b/2)) in a form that stays
/// finite for large magnitudes.
double box_plus(double a, double b);

/// Log-domain sum-product decoder for syndrome (Slepian-Wolf) decoding.
/// Positive LLR favours bit 0. Holds per-edge message buffers so one
/// instance can decode many frames of the same code; not thread-safe, use
/// one per worker.
class BpDecoder {
 public:
  explicit BpDecoder(const LdpcCode& code);

  /// Flooding schedule with a syndrome check after every iteration. Throws
  /// std::invalid_argument on size mismatch or max_iter < 1.
  DecodeResult decode(std::span<const double> llr, std::span<const Bit> target_syndrome,
                      int max_iter);

  [[nodiscard]] const LdpcCode& code() const { return *code_; }

 private:
  bool syndrome_matches(std::span<const Bit> target) const;

  const LdpcCode* code_;
  std::vector<double> v2c_, c2v_, fwd_;
  std::vector<Bit> hard_;
};

/// Convenience wrapper around a temporary BpDecoder.
DecodeResult bp_decode(const LdpcCode& code, std::span<const double> llr,
                       std::span<const Bit> target_syndrome, int max_iter);

}  // namespace cvqkd
