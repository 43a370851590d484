#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cvqkd/code_database.hpp"
#include "cvqkd/config.hpp"
#include "cvqkd/estimation.hpp"
#include "cvqkd/finite_rate.hpp"
#include "cvqkd/optimizer.hpp"
#include "cvqkd/quantizer.hpp"
#include "cvqkd/security.hpp"
#include "cvqkd/slice_decoder.hpp"

namespace cvqkd {

enum class Outcome { Success, ParameterEstimationAbort, DecodeFailure, NoKey };

std::string to_string(Outcome o);

/// Process exit status: 0 success, 2 protocol abort, 3 decode failure.
int exit_code(Outcome o);
inline constexpr int kExitConfigError = 4;

/// 64-bit FNV-1a of the canonical config text.
std::uint64_t config_hash(const RunConfig& cfg);

struct SliceCodeInfo {
  int slice = 0;
  bool disclosed = false;
  double capacity = 0.0;       ///< 1 - H(l_j | X, l_<j) on the fitted channel
  double ber = 0.0;            ///< p_j from the estimation subset
  int rate_hundredths = 0;
  double realized_rate = 0.0;  ///< 1 - checks / n of the selected code
  std::uint64_t code_seed = 0;
  std::size_t edges = 0;
  std::vector<std::pair<int, double>> attempts;  ///< (bucket, calibration FER)
  double mean_iterations = 0.0;
};

struct RunManifest {
  std::string config_text;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  Outcome outcome = Outcome::Success;
  std::string abort_reason;
  std::vector<SliceCodeInfo> codes;
  std::vector<std::pair<std::string, std::string>> values;  ///< run results, in emission order
  std::vector<std::pair<std::string, double>> timings;      ///< seconds per step
  std::vector<std::string> outputs;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);

  /// key=value lines. Timings are machine-dependent; leave them out to
  /// compare manifests across runs.
  [[nodiscard]] std::string to_text(bool with_timings = true) const;
};

struct RunOptions {
  int workers = 1;
  int calibration_frames = 1000;
  double test_fer = 1e-3;
  int max_iter = 100;
  bool conditioning = true;
  LogMode log_mode = LogMode::Natural;
  std::string out_dir;  ///< empty: nothing written
};

struct RunResult {
  RunManifest manifest;
  KeyRateReport report;
  ParamEstimate estimate;
  QuantizerConfig quantizer;
  std::vector<Bit> alice_reconciled;  ///< block-major, slice-major within a block
  std::vector<Bit> bob_reconciled;
  bool hash_ok = false;
  std::size_t key_length = 0;
  std::vector<Bit> alice_key;
  std::vector<Bit> bob_key;
};

/// Full protocol run with both parties simulated. Throws ConfigError on invalid
/// configuration (including N_R > N); protocol outcomes are reported in the
/// manifest.
RunResult run_protocol(const RunConfig& cfg, std::uint64_t seed, const RunOptions& opts = {});

/// Calibration batch on the fitted Gaussian channel: fresh (x, y) frames,
/// slice j LLRs conditioned on the true lower slices. Stops early once the
/// failure count rules out test_fer.
FrameTester gaussian_slice_tester(const QuantizerConfig& q, const GaussianChannel& ch, int j,
                                  bool conditioning, int frames, int max_iter, double test_fer,
                                  std::uint64_t seed);

// ---- sweeps ----------------------------------------------------------------

struct SweepNrResult {
  std::vector<CurvePoint> curve;
  std::vector<double> normalized;  ///< K' / max K'
  OptimizationResult optimum;
  RateModel model;
};

SweepNrResult sweep_nr(const RunConfig& cfg, const std::vector<double>& grid, const ModelOptions& opts);
void write_sweep_nr_csv(std::ostream& out, const SweepNrResult& r, const std::vector<std::string>& comments);

struct NePoint {
  double N_o = 0, N_e = 0, N = 0;
  double S_BE = 0, K = 0;
  bool no_key = false;
};

/// K per the asymptotic-efficiency key rate with beta = cfg.beta_target and
/// S_BE(N_e), for N_e = fraction * N_o.
std::vector<NePoint> sweep_ne(const RunConfig& cfg, const std::vector<double>& N_o_list,
                              const std::vector<double>& fractions);
/// 1e-4 .. 1 log-spaced plus 1/2.
std::vector<double> default_ne_fractions(int points = 41);
void write_sweep_ne_csv(std::ostream& out, const std::vector<NePoint>& pts,
                        const std::vector<std::string>& comments);

struct BenchOptions {
  std::size_t N = 200'000;
  std::vector<std::size_t> n_r_list{2'000, 10'000, 50'000};
  std::vector<double> T_list{0.9};
  int workers = 1;
  double rate_margin = 0.9;
  int max_iter = 100;
  bool conditioning = true;
  bool serial_baseline = true;  ///< also time workers = 1
};

struct BenchRow {
  double T = 0, gamma = 0;
  std::size_t N_R = 0, blocks = 0;
  double p_decode = 0;            ///< bit error rate over coded slices
  double block_failure_rate = 0;  ///< blocks with any unconverged slice
  double mean_iterations = 0;
  double total_ops = 0;           ///< sum over blocks and slices of 7 G x iterations
  double seconds = 0;             ///< with opts.workers
  double seconds_serial = 0;      ///< with one worker (0 when skipped)
  double time_normalized = 0;     ///< seconds / seconds at the largest N_R, same T
  double c_h = 0;                 ///< seconds / total_ops
};

/// Desk-scale analogue of the BER / decoding-time experiments on the AWGN
/// quadrature model, codes 10% below slice capacity.
std::vector<BenchRow> bench_decode(const RunConfig& cfg, const BenchOptions& opts, std::uint64_t seed);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows,
                     const std::vector<std::string>& comments);

struct CalibrationResult {
  std::size_t N_R = 0;
  double total_ops = 0;
  double seconds = 0;
  double c_h = 0;
};

/// Times one block of n_r values at the config's channel and divides by the
/// operation count of the iterations actually run.
CalibrationResult calibrate_ch_run(const RunConfig& cfg, std::size_t n_r, std::uint64_t seed);

}  // namespace cvqkd
