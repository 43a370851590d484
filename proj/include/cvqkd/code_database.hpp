#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "cvqkd/ldpc_code.hpp"

namespace cvqkd {

/// Rate grid in hundredths: 0.01 .. 0.80.
inline constexpr int kMinRateHundredths = 1;
inline constexpr int kMaxRateHundredths = 80;

/// Codes keyed by (rate bucket, block length). Entries are built on first
/// lookup from the bucket's degree distribution and a seed derived from the
/// database seed; once built they are immutable and shared.
class CodeDatabase {
 public:
  explicit CodeDatabase(std::uint64_t seed = 1, PegOptions peg = {});

  /// A database holding only inserted codes; nothing is built on lookup.
  static CodeDatabase stored_only();

  /// Override the distribution used for one rate bucket.
  void set_distribution(int rate_hundredths, DegreeDistribution dd);
  [[nodiscard]] DegreeDistribution distribution(int rate_hundredths) const;

  /// Inserts a prebuilt code under its bucket (floor of its realized rate).
  void insert(int rate_hundredths, std::shared_ptr<const LdpcCode> code);

  /// Greatest bucket <= rate. Returns nullopt below the grid.
  static std::optional<int> bucket_at_or_below(double rate);

  /// Bucket that `lookup` would serve: the greatest available bucket <= rate.
  std::optional<int> resolve(double rate, std::uint32_t n) const;

  /// Code for the greatest available bucket rate <= `rate`; nullptr if none.
  std::shared_ptr<const LdpcCode> lookup(double rate, std::uint32_t n);
  std::shared_ptr<const LdpcCode> at(int rate_hundredths, std::uint32_t n);

  [[nodiscard]] std::vector<std::pair<int, std::uint32_t>> stored_keys() const;

 private:
  struct StoredTag {};
  explicit CodeDatabase(StoredTag) : seed_(1), build_(false) {}

  std::uint64_t seed_;
  PegOptions peg_;
  bool build_ = true;
  std::map<int, DegreeDistribution> overrides_;
  std::map<std::pair<int, std::uint32_t>, std::shared_ptr<const LdpcCode>> codes_;
  mutable std::mutex mu_;
};

/// Frame-error rate of a candidate code on a calibration batch.
using FrameTester = std::function<double(const LdpcCode&)>;

struct SelectOptions {
  double eps_EC = 2.5e-10;  ///< analytic budget; recorded, not testable directly
  double test_fer = 1e-3;   ///< surrogate acceptance threshold
  double step = 0.05;       ///< back-off per failed test
};

struct Selection {
  std::shared_ptr<const LdpcCode> code;
  int rate_hundredths = 0;
  std::vector<std::pair<int, double>> attempts;  ///< (bucket, measured FER)
};

/// Steps down from `target_rate` in `step` decrements until a code's
/// measured FER is <= test_fer. Throws std::runtime_error when the 0.01
/// floor is passed without success.
Selection select_code(CodeDatabase& db, double target_rate, std::uint32_t n,
                      const FrameTester& tester, const SelectOptions& opts = {});

/// Calibration batch for a binary symmetric slice channel with crossover p:
/// random words, BSC noise, syndrome decoding at LLR +-ln((1-p)/p).
FrameTester bsc_frame_tester(double p, int frames, int max_iter, std::uint64_t seed);

}  // namespace cvqkd
