#include "cvqkd/slice_decoder.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cvqkd/bp_decoder.hpp"

namespace cvqkd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Worker-private decoders, one per slice code.
class SliceWorker {
 public:
  explicit SliceWorker(const SliceContext& ctx) : ctx_(ctx) {
    for (const auto& c : ctx.codes) decoders_.emplace_back(c ? std::make_unique<BpDecoder>(*c) : nullptr);
  }

  BlockResult run(const SliceBlock& block) {
    const auto t0 = Clock::now();
    const int m = block.m();
    if (static_cast<std::size_t>(m) != decoders_.size()) {
      throw std::invalid_argument("decode_block: slice count does not match code count");
    }
    const std::size_t n = block.size();
    BlockResult r;
    r.bits.resize(m);
    r.iterations.assign(m, 0);
    r.converged.assign(m, 1);
    std::vector<std::uint32_t> lower(n, 0);
    std::vector<double> llr(n);
    for (int j = 0; j < m; ++j) {
      if (block.bits[j].size() != n) throw std::invalid_argument("decode_block: ragged slice");
      if (!decoders_[j]) {
        r.bits[j] = block.bits[j];
      } else {
        if (decoders_[j]->code().n() != n) {
          throw std::invalid_argument("decode_block: code length differs from block length");
        }
        const auto s = syndrome(decoders_[j]->code(), block.bits[j]);
        for (std::size_t i = 0; i < n; ++i) {
          llr[i] = slice_llr(ctx_.quantizer, ctx_.noise_var, ctx_.side_scale * block.x_side[i],
                             lower[i], j, ctx_.conditioning);
        }
        auto d = decoders_[j]->decode(llr, s, ctx_.max_iter);
        r.iterations[j] = d.iterations;
        r.converged[j] = d.converged ? 1 : 0;
        r.bits[j] = std::move(d.bits);
      }
      for (std::size_t i = 0; i < n; ++i) lower[i] |= static_cast<std::uint32_t>(r.bits[j][i]) << j;
    }
    r.seconds = seconds_since(t0);
    return r;
  }

 private:
  const SliceContext& ctx_;
  std::vector<std::unique_ptr<BpDecoder>> decoders_;
};

}  // namespace

bool BlockResult::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](char c) { return c != 0; });
}

SliceBlock make_slice_block(const QuantizerConfig& q, std::span<const double> x,
                            std::span<const double> y, std::size_t offset, std::size_t n_r) {
  if (x.size() != y.size()) throw std::invalid_argument("make_slice_block: x/y length mismatch");
  if (offset + n_r > y.size()) throw std::out_of_range("make_slice_block: range past end");
  SliceBlock b;
  b.bits.assign(q.m, std::vector<Bit>(n_r));
  b.x_side.assign(x.begin() + offset, x.begin() + offset + n_r);
  b.y_vals.assign(y.begin() + offset, y.begin() + offset + n_r);
  for (std::size_t i = 0; i < n_r; ++i) {
    const auto label = quantize(q, b.y_vals[i]).label;
    for (int j = 0; j < q.m; ++j) b.bits[j][i] = (label >> j) & 1u;
  }
  return b;
}

std::vector<SliceBlock> partition_blocks(const QuantizerConfig& q, std::span<const double> x,
                                         std::span<const double> y, std::size_t n_r) {
  if (n_r == 0) throw std::invalid_argument("partition_blocks: n_r must be positive");
  std::vector<SliceBlock> blocks;
  const std::size_t count = y.size() / n_r;
  blocks.reserve(count);
  for (std::size_t b = 0; b < count; ++b) blocks.push_back(make_slice_block(q, x, y, b * n_r, n_r));
  return blocks;
}

BlockResult decode_block(const SliceBlock& block, const SliceContext& ctx) {
  SliceWorker w(ctx);
  return w.run(block);
}

ParallelDecodeResult decode_blocks_parallel(const std::vector<SliceBlock>& blocks,
                                            const SliceContext& ctx, int workers) {
  if (workers < 1) throw std::invalid_argument("decode_blocks_parallel: workers must be >= 1");
  const auto t0 = Clock::now();
  ParallelDecodeResult out;
  out.workers = workers;
  out.blocks.resize(blocks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto body = [&] {
    try {
      SliceWorker w(ctx);
      for (std::size_t b = next++; b < blocks.size(); b = next++) out.blocks[b] = w.run(blocks[b]);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = blocks.size();
    }
  };

  const int spawn = static_cast<int>(std::min<std::size_t>(workers, std::max<std::size_t>(blocks.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < spawn; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  out.total_seconds = seconds_since(t0);
  return out;
}

}  // namespace cvqkd
