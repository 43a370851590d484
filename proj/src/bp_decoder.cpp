#include "cvqkd/bp_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvqkd {

namespace {

/// Messages are kept inside +-kMsgClamp; far beyond kLlrMax, so saturated
/// channel inputs still dominate.
constexpr double kMsgClamp = 60.0;

inline double log1p_exp_neg(double x) {
  // ln(1 + e^-x) for x >= 0; negligible past 37.
  return x > 37.0 ? 0.0 : std::log1p(std::exp(-x));
}

/// -ln tanh(x / 2) for x >= 0, capped where the argument underflows.
constexpr double kPhiCap = 40.0;
constexpr double kPhiFloor = 1e-17;

inline double log_tanh_half_exact(double x) {
  if (x < kPhiFloor) return kPhiCap;
  return std::min(-std::log(std::tanh(0.5 * x)), kPhiCap);
}

// Linear interpolation table on [kTableLo, kPhiCap]; the singular end below
// kTableLo is evaluated directly. Interpolation error stays under 1e-4.
constexpr double kTableLo = 1.0 / 16.0;
constexpr double kTableStep = 1.0 / 512.0;

struct PhiTable {
  std::vector<double> v;
  PhiTable() {
    const auto size = static_cast<std::size_t>((kPhiCap - kTableLo) / kTableStep) + 2;
    v.resize(size);
    for (std::size_t i = 0; i < size; ++i) v[i] = log_tanh_half_exact(kTableLo + kTableStep * static_cast<double>(i));
  }
};

const PhiTable& phi_table() {
  static const PhiTable t;
  return t;
}

inline double log_tanh_half(double x, const std::vector<double>& tab) {
  if (x < kTableLo) {
    // -ln(x/2) + x^2/12, off by under 3e-7 here.
    return x < kPhiFloor ? kPhiCap : -std::log(0.5 * x) + x * x / 12.0;
  }
  if (x >= kPhiCap) return 0.0;
  const double pos = (x - kTableLo) * (1.0 / kTableStep);
  const auto i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return tab[i] + f * (tab[i + 1] - tab[i]);
}

}  // namespace

double box_plus(double a, double b) {
  const double s = ((a < 0.0) != (b < 0.0)) ? -1.0 : 1.0;
  const double m = std::min(std::fabs(a), std::fabs(b));
  return s * m + log1p_exp_neg(std::fabs(a + b)) - log1p_exp_neg(std::fabs(a - b));
}

BpDecoder::BpDecoder(const LdpcCode& code)
    : code_(&code), v2c_(code.edges()), c2v_(code.edges()), hard_(code.n()) {
  std::size_t max_deg = 0;
  for (std::uint32_t c = 0; c < code.num_checks(); ++c) {
    max_deg = std::max(max_deg, code.check(c).size());
  }
  fwd_.resize(max_deg + 1);
}

bool BpDecoder::syndrome_matches(std::span<const Bit> target) const {
  const auto& code = *code_;
  for (std::uint32_t c = 0; c < code.num_checks(); ++c) {
    Bit acc = 0;
    for (std::uint32_t v : code.check(c)) acc ^= hard_[v];
    if (acc != (target[c] & 1u)) return false;
  }
  return true;
}

DecodeResult BpDecoder::decode(std::span<const double> llr, std::span<const Bit> target_syndrome,
                               int max_iter) {
  const auto& code = *code_;
  if (llr.size() != code.n()) throw std::invalid_argument("bp_decode: llr length mismatch");
  if (target_syndrome.size() != code.num_checks()) {
    throw std::invalid_argument("bp_decode: syndrome length mismatch");
  }
  if (max_iter < 1) throw std::invalid_argument("bp_decode: max_iter must be >= 1");

  const auto edge_var = code.edge_vars();
  for (std::size_t e = 0; e < edge_var.size(); ++e) {
    v2c_[e] = std::clamp(llr[edge_var[e]], -kMsgClamp, kMsgClamp);
  }
  for (std::uint32_t v = 0; v < code.n(); ++v) hard_[v] = llr[v] < 0.0 ? 1 : 0;

  DecodeResult r;
  r.posterior.assign(llr.begin(), llr.end());
  if (syndrome_matches(target_syndrome)) {
    r.converged = true;
  }
  const auto& tab = phi_table().v;
  for (int it = 1; it <= max_iter && !r.converged; ++it) {
    // Check nodes: sum of -ln tanh(|m|/2) over the row, each edge takes the
    // row total minus its own term; the map is its own inverse.
    for (std::uint32_t c = 0; c < code.num_checks(); ++c) {
      const std::size_t off = code.check_offset(c);
      const std::size_t d = code.check(c).size();
      bool negative = target_syndrome[c] != 0;
      if (d == 1) {
        c2v_[off] = negative ? -kMsgClamp : kMsgClamp;
        continue;
      }
      double total = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double m = v2c_[off + k];
        negative ^= m < 0.0;
        fwd_[k] = log_tanh_half(std::fabs(m), tab);
        total += fwd_[k];
      }
      for (std::size_t k = 0; k < d; ++k) {
        const double mag = log_tanh_half(std::max(total - fwd_[k], 0.0), tab);
        c2v_[off + k] = (negative != (v2c_[off + k] < 0.0)) ? -mag : mag;
      }
    }
    // Variable nodes.
    for (std::uint32_t v = 0; v < code.n(); ++v) {
      double total = llr[v];
      const auto edges = code.var_edges(v);
      for (std::uint32_t e : edges) total += c2v_[e];
      r.posterior[v] = total;
      hard_[v] = total < 0.0 ? 1 : 0;
      for (std::uint32_t e : edges) v2c_[e] = std::clamp(total - c2v_[e], -kMsgClamp, kMsgClamp);
    }
    r.iterations = it;
    if (syndrome_matches(target_syndrome)) r.converged = true;
  }
  r.bits.assign(hard_.begin(), hard_.end());
  return r;
}

DecodeResult bp_decode(const LdpcCode& code, std::span<const double> llr,
                       std::span<const Bit> target_syndrome, int max_iter) {
  BpDecoder dec(code);
  return dec.decode(llr, target_syndrome, max_iter);
}

}  // namespace cvqkd
