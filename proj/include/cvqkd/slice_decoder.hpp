#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "cvqkd/ldpc_code.hpp"
#include "cvqkd/quantizer.hpp"

namespace cvqkd {

/// One reconciliation sub-block: Bob's m slices of N_R quantized values and
/// the quadratures both sides hold for those positions.
struct SliceBlock {
  std::vector<std::vector<Bit>> bits;  ///< bits[j][i] = l_j of value i
  std::vector<double> x_side;          ///< Alice's side information
  std::vector<double> y_vals;          ///< Bob's quadratures

  [[nodiscard]] int m() const { return static_cast<int>(bits.size()); }
  [[nodiscard]] std::size_t size() const { return y_vals.size(); }
};

/// Quantizes y[offset, offset + n_r) into a block.
SliceBlock make_slice_block(const QuantizerConfig& q, std::span<const double> x,
                            std::span<const double> y, std::size_t offset, std::size_t n_r);

/// Splits into floor(N / n_r) consecutive blocks; a trailing remainder is dropped.
std::vector<SliceBlock> partition_blocks(const QuantizerConfig& q, std::span<const double> x,
                                         std::span<const double> y, std::size_t n_r);

/// Decoder-side model shared by every block.
struct SliceContext {
  QuantizerConfig quantizer;
  /// Alice's LLRs use side_scale * x as the mean of Bob's value.
  double side_scale = 1.0;
  double noise_var = 1.0;
  bool conditioning = true;
  int max_iter = 100;
  /// One code per slice; nullptr means the slice is disclosed in the clear.
  std::vector<std::shared_ptr<const LdpcCode>> codes;
};

struct BlockResult {
  std::vector<std::vector<Bit>> bits;  ///< Alice's reconstruction of Bob's slices
  std::vector<int> iterations;         ///< per slice; 0 for disclosed slices
  std::vector<char> converged;         ///< per slice
  double seconds = 0.0;

  [[nodiscard]] bool all_converged() const;
};

/// Sequential multistage decoding of one block, slices 0..m-1, each slice
/// conditioned on Alice's decisions for the lower ones.
BlockResult decode_block(const SliceBlock& block, const SliceContext& ctx);

struct ParallelDecodeResult {
  std::vector<BlockResult> blocks;  ///< in block order
  double total_seconds = 0.0;
  int workers = 1;
};

/// Decodes every block on `workers` threads. Codes are shared read-only and
/// each worker owns its decoder buffers, so results do not depend on the
/// worker count or scheduling.
ParallelDecodeResult decode_blocks_parallel(const std::vector<SliceBlock>& blocks,
                                            const SliceContext& ctx, int workers);

}  // namespace cvqkd
