#include "cvqkd/code_database.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cvqkd/bp_decoder.hpp"
#include "cvqkd/numeric.hpp"
#include "cvqkd/quantizer.hpp"

namespace cvqkd {

CodeDatabase::CodeDatabase(std::uint64_t seed, PegOptions peg) : seed_(seed), peg_(peg) {}

CodeDatabase CodeDatabase::stored_only() { return CodeDatabase(StoredTag{}); }

void CodeDatabase::set_distribution(int rate_hundredths, DegreeDistribution dd) {
  dd.validate();
  std::lock_guard lock(mu_);
  overrides_[rate_hundredths] = std::move(dd);
}

DegreeDistribution CodeDatabase::distribution(int rate_hundredths) const {
  {
    std::lock_guard lock(mu_);
    if (auto it = overrides_.find(rate_hundredths); it != overrides_.end()) return it->second;
  }
  return DegreeDistribution::for_rate(rate_hundredths / 100.0);
}

void CodeDatabase::insert(int rate_hundredths, std::shared_ptr<const LdpcCode> code) {
  std::lock_guard lock(mu_);
  codes_[{rate_hundredths, code->n()}] = std::move(code);
}

std::optional<int> CodeDatabase::bucket_at_or_below(double rate) {
  // Small tolerance so 0.50 is not read as 0.4999999.
  const int b = static_cast<int>(std::floor(rate * 100.0 + 1e-9));
  if (b < kMinRateHundredths) return std::nullopt;
  return std::min(b, kMaxRateHundredths);
}

std::optional<int> CodeDatabase::resolve(double rate, std::uint32_t n) const {
  const auto b = bucket_at_or_below(rate);
  if (!b || build_) return b;
  std::lock_guard lock(mu_);
  auto it = codes_.upper_bound({*b, n});
  while (it != codes_.begin()) {
    --it;
    if (it->first.second == n) return it->first.first;
  }
  return std::nullopt;
}

std::shared_ptr<const LdpcCode> CodeDatabase::lookup(double rate, std::uint32_t n) {
  const auto b = resolve(rate, n);
  if (!b) return nullptr;
  return at(*b, n);
}

std::shared_ptr<const LdpcCode> CodeDatabase::at(int rate_hundredths, std::uint32_t n) {
  if (rate_hundredths < kMinRateHundredths || rate_hundredths > kMaxRateHundredths) {
    throw std::out_of_range("CodeDatabase: rate bucket outside 0.01..0.80");
  }
  {
    std::lock_guard lock(mu_);
    if (auto it = codes_.find({rate_hundredths, n}); it != codes_.end()) return it->second;
    if (!build_) throw std::out_of_range("CodeDatabase: no stored code for this bucket");
  }
  const auto dd = distribution(rate_hundredths);
  const auto seed = derive_seed(seed_, (static_cast<std::uint64_t>(rate_hundredths) << 32) | n);
  auto code = std::make_shared<const LdpcCode>(construct_code(dd, n, seed, peg_));
  std::lock_guard lock(mu_);
  auto [it, inserted] = codes_.emplace(std::make_pair(rate_hundredths, n), std::move(code));
  return it->second;
}

std::vector<std::pair<int, std::uint32_t>> CodeDatabase::stored_keys() const {
  std::lock_guard lock(mu_);
  std::vector<std::pair<int, std::uint32_t>> keys;
  for (const auto& [k, v] : codes_) keys.push_back(k);
  return keys;
}

Selection select_code(CodeDatabase& db, double target_rate, std::uint32_t n,
                      const FrameTester& tester, const SelectOptions& opts) {
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw std::invalid_argument("select_code: target rate must lie in (0, 1)");
  }
  Selection sel;
  const int step = static_cast<int>(std::lround(opts.step * 100.0));
  auto bucket = db.resolve(target_rate, n);
  while (bucket && *bucket >= kMinRateHundredths) {
    auto code = db.at(*bucket, n);
    const double fer = tester(*code);
    sel.attempts.emplace_back(*bucket, fer);
    if (fer <= opts.test_fer) {
      sel.code = std::move(code);
      sel.rate_hundredths = *bucket;
      return sel;
    }
    if (*bucket - step < kMinRateHundredths) break;
    bucket = db.resolve((*bucket - step) / 100.0, n);
  }
  throw std::runtime_error("select_code: rate floor 0.01 reached without a passing code");
}

FrameTester bsc_frame_tester(double p, int frames, int max_iter, std::uint64_t seed) {
  return [=](const LdpcCode& code) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5), flip(p);
    const double mag = (p <= 0.0) ? kLlrMax
                       : (p >= 1.0) ? -kLlrMax
                                    : std::clamp(std::log((1.0 - p) / p), -kLlrMax, kLlrMax);
    BpDecoder dec(code);
    std::vector<Bit> word(code.n());
    std::vector<double> llr(code.n());
    int failures = 0;
    for (int f = 0; f < frames; ++f) {
      for (std::uint32_t i = 0; i < code.n(); ++i) {
        word[i] = coin(rng) ? 1 : 0;
        const Bit seen = word[i] ^ (flip(rng) ? 1 : 0);
        llr[i] = seen ? -mag : mag;
      }
      const auto s = syndrome(code, word);
      const auto r = dec.decode(llr, s, max_iter);
      if (!r.converged || r.bits != word) ++failures;
    }
    return frames > 0 ? static_cast<double>(failures) / frames : 1.0;
  };
}

}  // namespace cvqkd
