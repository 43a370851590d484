#include "cvqkd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cvqkd/bp_decoder.hpp"
#include "cvqkd/channel.hpp"
#include "cvqkd/digest.hpp"
#include "cvqkd/numeric.hpp"
#include "cvqkd/privacy.hpp"

namespace cvqkd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(12) << v;
  return o.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << v;
  return o.str();
}

// Seed streams of one run.
enum Stream : std::uint64_t {
  kQuadratures = 1,
  kSubset = 2,
  kCodes = 3,
  kPrivacy = 4,
  kCalibration = 100,
  kHash = 1000,
};

void write_text_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string pack_hex(const std::vector<Bit>& bits) {
  std::ostringstream o;
  o << std::hex << std::setfill('0');
  for (std::size_t i = 0; i < bits.size(); i += 8) {
    unsigned byte = 0;
    for (std::size_t k = 0; k < 8 && i + k < bits.size(); ++k) byte |= (bits[i + k] & 1u) << (7 - k);
    o << std::setw(2) << byte;
  }
  return o.str();
}

/// Per-slice codes for a channel: rate = margin x capacity, looked up at or
/// below that rate; slices under the rate floor are disclosed.
std::vector<std::shared_ptr<const LdpcCode>> codes_below_capacity(CodeDatabase& db, const QuantizerConfig& q,
                                                                  const GaussianChannel& ch, bool conditioning,
                                                                  double margin, std::uint32_t n_r) {
  const auto h = slice_conditional_entropies(q, ch, conditioning);
  std::vector<std::shared_ptr<const LdpcCode>> codes(q.m);
  for (int j = 0; j < q.m; ++j) codes[j] = db.lookup(margin * std::clamp(1.0 - h[j], 0.0, 1.0), n_r);
  return codes;
}

}  // namespace

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::ParameterEstimationAbort: return "abort-parameter-estimation";
    case Outcome::DecodeFailure: return "abort-decode-failure";
    case Outcome::NoKey: return "abort-no-key";
  }
  return "unknown";
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Success: return 0;
    case Outcome::DecodeFailure: return 3;
    default: return 2;
  }
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_config_text(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : values) {
    if (k == key) {
      v = value;
      return;
    }
  }
  values.emplace_back(key, value);
}

void RunManifest::set(const std::string& key, double value) { set(key, fmt(value)); }

std::string RunManifest::to_text(bool with_timings) const {
  std::ostringstream o;
  o << "seed=" << seed << '\n';
  o << "config_hash=" << hex64(config_hash) << '\n';
  o << "workers=" << workers << '\n';
  o << "outcome=" << cvqkd::to_string(outcome) << '\n';
  if (!abort_reason.empty()) o << "abort_reason=" << abort_reason << '\n';
  std::istringstream cfg(config_text);
  std::string line;
  while (std::getline(cfg, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    o << "config." << trim(line.substr(0, eq)) << '=' << trim(line.substr(eq + 1)) << '\n';
  }
  for (const auto& c : codes) {
    const std::string p = "slice" + std::to_string(c.slice) + ".";
    o << p << "disclosed=" << (c.disclosed ? 1 : 0) << '\n';
    o << p << "capacity=" << fmt(c.capacity) << '\n';
    o << p << "ber=" << fmt(c.ber) << '\n';
    if (!c.disclosed) {
      o << p << "rate_bucket=" << fmt(c.rate_hundredths / 100.0) << '\n';
      o << p << "realized_rate=" << fmt(c.realized_rate) << '\n';
      o << p << "code_seed=" << c.code_seed << '\n';
      o << p << "edges=" << c.edges << '\n';
      o << p << "mean_iterations=" << fmt(c.mean_iterations) << '\n';
    }
    std::string att;
    for (const auto& [b, fer] : c.attempts) att += (att.empty() ? "" : ";") + fmt(b / 100.0) + ":" + fmt(fer);
    if (!att.empty()) o << p << "calibration=" << att << '\n';
  }
  for (const auto& [k, v] : values) o << k << '=' << v << '\n';
  if (with_timings) {
    for (const auto& [k, v] : timings) o << "time." << k << '=' << fmt(v) << '\n';
  }
  for (const auto& p : outputs) o << "output=" << p << '\n';
  return o.str();
}

FrameTester gaussian_slice_tester(const QuantizerConfig& q, const GaussianChannel& ch, int j,
                                  bool conditioning, int frames, int max_iter, double test_fer,
                                  std::uint64_t seed) {
  return [=](const LdpcCode& code) {
    if (frames <= 0) return 1.0;
    const int allowed = static_cast<int>(std::floor(test_fer * frames));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> sx(0.0, std::sqrt(ch.signal_var)), sn(0.0, std::sqrt(ch.noise_var));
    BpDecoder dec(code);
    const std::uint32_t n = code.n();
    std::vector<Bit> bits(n);
    std::vector<double> llr(n);
    int failures = 0;
    for (int f = 0; f < frames; ++f) {
      for (std::uint32_t i = 0; i < n; ++i) {
        const double x = sx(rng);
        const double y = x + sn(rng);
        const auto label = quantize(q, y).label;
        bits[i] = (label >> j) & 1u;
        llr[i] = slice_llr(q, ch.noise_var, x, label, j, conditioning);
      }
      const auto r = dec.decode(llr, syndrome(code, bits), max_iter);
      if (!r.converged || r.bits != bits) {
        if (++failures > allowed) return static_cast<double>(failures) / frames;
      }
    }
    return static_cast<double>(failures) / frames;
  };
}

RunResult run_protocol(const RunConfig& cfg, std::uint64_t seed, const RunOptions& opts) {
  const auto& p = cfg.protocol;
  p.validate();
  cfg.eps.validate();
  if (opts.workers < 1) throw ConfigError("workers must be >= 1");
  const double N = p.reconciled_count();
  if (cfg.N_R < 100 || static_cast<double>(cfg.N_R) > N) throw ConfigError("N_R must lie in [100, N]");

  RunResult res;
  auto& man = res.manifest;
  man.config_text = to_config_text(cfg);
  man.config_hash = config_hash(cfg);
  man.seed = seed;
  man.workers = opts.workers;
  auto abort_with = [&](Outcome o, const std::string& why) {
    man.outcome = o;
    man.abort_reason = why;
  };
  auto finish = [&]() -> RunResult& {
    if (!opts.out_dir.empty()) {
      namespace fs = std::filesystem;
      fs::create_directories(opts.out_dir);
      const fs::path dir(opts.out_dir);
      std::ostringstream csv;
      csv << "# seed=" << seed << " config_hash=" << hex64(man.config_hash) << '\n';
      csv << key_rate_csv_header() << '\n' << key_rate_csv_row(res.report) << '\n';
      write_text_file(dir / "key_rate.csv", csv.str());
      man.outputs.push_back((dir / "key_rate.csv").string());
      if (man.outcome == Outcome::Success) {
        write_text_file(dir / "key.hex", pack_hex(res.bob_key) + "\n");
        man.outputs.push_back((dir / "key.hex").string());
      }
      man.outputs.push_back((dir / "manifest.txt").string());
      write_text_file(dir / "manifest.txt", man.to_text());
    }
    return res;
  };

  // Quadratures and optional post-selection.
  auto t0 = Clock::now();
  const std::size_t total = 2 * static_cast<std::size_t>(p.N_o);
  const auto quad = generate_physical_quadratures(p, total, derive_seed(seed, kQuadratures));
  auto kept = post_select(quad.y, p.post_select_threshold);
  man.timings.emplace_back("quadratures", seconds_since(t0));
  man.set("signals_kept", static_cast<double>(kept.size()));

  // Random estimation subset of 2 N_e values, parameter estimation.
  t0 = Clock::now();
  const std::size_t n_est = 2 * static_cast<std::size_t>(p.N_e);
  if (kept.size() < n_est + static_cast<std::size_t>(cfg.N_R)) {
    abort_with(Outcome::ParameterEstimationAbort, "too few signals after post-selection");
    return finish();
  }
  std::mt19937_64 subset_rng(derive_seed(seed, kSubset));
  std::shuffle(kept.begin(), kept.end(), subset_rng);
  std::vector<std::size_t> rec_idx(kept.begin() + static_cast<std::ptrdiff_t>(n_est), kept.end());
  std::sort(rec_idx.begin(), rec_idx.end());
  std::vector<double> x_est(n_est), y_est(n_est);
  for (std::size_t i = 0; i < n_est; ++i) {
    x_est[i] = quad.x[kept[i]];
    y_est[i] = quad.y[kept[i]];
  }
  std::vector<double> x_rec(rec_idx.size()), y_rec(rec_idx.size());
  for (std::size_t i = 0; i < rec_idx.size(); ++i) {
    x_rec[i] = quad.x[rec_idx[i]];
    y_rec[i] = quad.y[rec_idx[i]];
  }
  res.estimate = estimate_params(x_est, y_est, cfg.eps.eps_PE, p);
  const auto& est = res.estimate;
  man.set("t_hat", est.t_hat);
  man.set("sigma_hat_sq", est.sigma_hat_sq);
  man.set("T_L", est.T_L);
  man.set("T_U", est.T_U);
  man.set("xi_L", est.xi_L);
  man.set("xi_U", est.xi_U);
  for (std::size_t i = 0; i < est.warnings.size(); ++i) man.set("estimate_warning" + std::to_string(i), est.warnings[i]);

  ProtocolConfig fitted = p;
  fitted.T = std::clamp(est.T_hat, 0.0, 1.0);
  fitted.xi_ch = std::max(0.0, est.xi_hat);
  const double gamma_hat = snr(fitted).gamma;
  const double I_AB = mutual_information(gamma_hat);
  man.set("gamma_hat", gamma_hat);
  man.set("I_AB", I_AB);
  double S_BE = std::numeric_limits<double>::infinity();
  try {
    S_BE = holevo_asymptotic(p.V_A, est.T_L, est.xi_U, p.xi_d, p.eta_d).chi_EB;
  } catch (const std::domain_error& e) {
    man.timings.emplace_back("estimation", seconds_since(t0));
    abort_with(Outcome::ParameterEstimationAbort, std::string("no estimable channel: ") + e.what());
    return finish();
  }
  man.set("S_BE", S_BE);
  man.timings.emplace_back("estimation", seconds_since(t0));
  if (!(S_BE < cfg.beta_target * I_AB)) {
    abort_with(Outcome::ParameterEstimationAbort, "S_BE >= beta * I_AB");
    return finish();
  }

  // Quantizer on the fitted channel, slice error rates, code choice.
  t0 = Clock::now();
  GaussianChannel fit{est.t_hat * est.t_hat * p.V_A, std::max(est.sigma_hat_sq, 1e-12)};
  const auto design = build_quantizer(fit, p.m);
  res.quantizer = design.config;
  const auto& q = res.quantizer;
  man.set("quantizer.m", static_cast<double>(q.m));
  man.set("quantizer.delta", q.delta);
  man.set("quantizer.H_MY", design.entropies.H_MY);
  man.set("quantizer.H_MY_given_X", design.entropies.H_MY_given_X);
  std::vector<std::uint32_t> la(n_est), lb(n_est);
  for (std::size_t i = 0; i < n_est; ++i) {
    la[i] = quantize(q, est.t_hat * x_est[i]).label;
    lb[i] = quantize(q, y_est[i]).label;
  }
  const auto h = slice_conditional_entropies(q, fit, opts.conditioning);
  CodeDatabase db(derive_seed(seed, kCodes));
  SliceContext ctx;
  ctx.quantizer = q;
  ctx.side_scale = est.t_hat;
  ctx.noise_var = fit.noise_var;
  ctx.conditioning = opts.conditioning;
  ctx.max_iter = opts.max_iter;
  ctx.codes.resize(q.m);
  const auto n_r = static_cast<std::uint32_t>(cfg.N_R);
  for (int j = 0; j < q.m; ++j) {
    SliceCodeInfo info;
    info.slice = j;
    info.capacity = std::clamp(1.0 - h[j], 0.0, 1.0);
    info.ber = estimate_slice_ber(la, lb, j);
    info.disclosed = info.capacity < 0.01;
    if (!info.disclosed) {
      const auto tester = gaussian_slice_tester(q, fit, j, opts.conditioning, opts.calibration_frames,
                                                opts.max_iter, opts.test_fer, derive_seed(seed, kCalibration + j));
      SelectOptions so;
      so.eps_EC = cfg.eps.eps_EC;
      so.test_fer = opts.test_fer;
      try {
        auto sel = select_code(db, std::min(info.capacity, 0.99), n_r, tester, so);
        info.attempts = sel.attempts;
        info.rate_hundredths = sel.rate_hundredths;
        info.realized_rate = sel.code->rate();
        info.code_seed = sel.code->seed();
        info.edges = sel.code->edges();
        ctx.codes[j] = sel.code;
      } catch (const std::runtime_error&) {
        // No code passed down to the rate floor: send the slice in the clear.
        info.disclosed = true;
      }
    }
    man.codes.push_back(info);
  }
  man.timings.emplace_back("code_selection", seconds_since(t0));

  // Parallel slice reconciliation and hash verification.
  t0 = Clock::now();
  const auto blocks = partition_blocks(q, x_rec, y_rec, n_r);
  const auto dec = decode_blocks_parallel(blocks, ctx, opts.workers);
  man.timings.emplace_back("decode", dec.total_seconds);
  man.set("blocks", static_cast<double>(blocks.size()));
  man.set("values_reconciled", static_cast<double>(blocks.size() * n_r));
  man.set("values_dropped", static_cast<double>(y_rec.size() - blocks.size() * n_r));
  bool converged = true;
  res.hash_ok = true;
  std::vector<double> iter_sum(q.m, 0.0);
  res.alice_reconciled.reserve(blocks.size() * n_r * q.m);
  res.bob_reconciled.reserve(blocks.size() * n_r * q.m);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& r = dec.blocks[b];
    converged = converged && r.all_converged();
    for (int j = 0; j < q.m; ++j) {
      iter_sum[j] += r.iterations[j];
      const auto& a = r.bits[j];
      const auto& bb = blocks[b].bits[j];
      if (!verify_hash(a, bb, derive_seed(seed, kHash + b * q.m + j))) res.hash_ok = false;
      res.alice_reconciled.insert(res.alice_reconciled.end(), a.begin(), a.end());
      res.bob_reconciled.insert(res.bob_reconciled.end(), bb.begin(), bb.end());
    }
  }
  for (int j = 0; j < q.m; ++j) {
    man.codes[j].mean_iterations = blocks.empty() ? 0.0 : iter_sum[j] / static_cast<double>(blocks.size());
  }
  man.set("all_converged", converged ? "1" : "0");
  man.set("hash_ok", res.hash_ok ? "1" : "0");
  man.timings.emplace_back("verify", seconds_since(t0) - dec.total_seconds);

  // Key rate from the realized code rates.
  std::vector<double> rates(q.m, 0.0);
  double ops = 0.0;
  for (int j = 0; j < q.m; ++j) {
    if (man.codes[j].disclosed) continue;
    rates[j] = man.codes[j].realized_rate;
    ops += 7.0 * static_cast<double>(man.codes[j].edges) * man.codes[j].mean_iterations;
  }
  const auto beta = beta_realized(design.entropies.H_MY, q.m, rates, I_AB, design.entropies.H_MY_given_X);
  man.set("beta", beta.beta_direct);
  man.set("R_s", beta.R_s);
  man.set("slepian_wolf_ok", beta.slepian_wolf_ok.value_or(false) ? "1" : "0");
  const double C_fin = c_finite(gamma_hat, static_cast<double>(n_r), cfg.eps.eps_EC, opts.log_mode);
  res.report = key_rates(fitted, cfg.eps, beta.beta_direct, C_fin, S_BE, p.c_h * ops);
  man.set("K", res.report.K);
  man.set("K_Finite", res.report.K_Finite);
  man.set("K_prime", res.report.K_prime);

  if (!converged || !res.hash_ok) {
    abort_with(Outcome::DecodeFailure, !converged ? "decoder did not converge" : "hash mismatch");
    return finish();
  }

  // Privacy amplification to floor(N_o K) bits.
  t0 = Clock::now();
  if (!(res.report.K > 0.0)) {
    abort_with(Outcome::NoKey, "nonpositive key length");
    return finish();
  }
  const double target = std::floor(static_cast<double>(p.N_o) * res.report.K);
  res.key_length = static_cast<std::size_t>(std::min(target, static_cast<double>(res.bob_reconciled.size())));
  const auto pa_seed = derive_seed(seed, kPrivacy);
  res.alice_key = toeplitz_hash(res.alice_reconciled, res.key_length, pa_seed);
  res.bob_key = toeplitz_hash(res.bob_reconciled, res.key_length, pa_seed);
  man.set("key_length", static_cast<double>(res.key_length));
  const auto kd = polynomial_digest(res.bob_key, 0);
  man.set("key_digest", hex64(kd[1]) + hex64(kd[0]));
  man.timings.emplace_back("privacy_amplification", seconds_since(t0));
  return finish();
}

// ---- sweeps ----------------------------------------------------------------

SweepNrResult sweep_nr(const RunConfig& cfg, const std::vector<double>& grid, const ModelOptions& opts) {
  SweepNrResult r;
  r.model = build_rate_model(cfg, opts);
  r.optimum = solve_optimal_nr(r.model);
  std::vector<double> g = grid;
  if (r.optimum.interior_root) g.push_back(r.optimum.N_R_star);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  r.curve = k_prime_curve(r.model, g);
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& c : r.curve) mx = std::max(mx, c.K_prime);
  for (const auto& c : r.curve) r.normalized.push_back(c.K_prime / mx);
  return r;
}

void write_sweep_nr_csv(std::ostream& out, const SweepNrResult& r, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "# log_mode=" << to_string(r.model.log_mode) << " N_R_star=" << fmt(r.optimum.N_R_star)
      << " K_prime_max=" << fmt(r.optimum.K_prime_max) << '\n';
  out << "N_R,C_fin,beta_fin,K_Finite,delta_t,K_prime,K_prime_normalized\n";
  for (std::size_t i = 0; i < r.curve.size(); ++i) {
    const auto& p = r.curve[i];
    out << fmt(p.N_R) << ',' << fmt(p.C_fin) << ',' << fmt(p.beta_fin) << ',' << fmt(p.K_Finite) << ','
        << fmt(p.delta_t) << ',' << fmt(p.K_prime) << ',' << fmt(r.normalized[i]) << '\n';
  }
}

std::vector<double> default_ne_fractions(int points) {
  auto g = log_grid(1e-4, 1.0, points);
  g.push_back(0.5);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

std::vector<NePoint> sweep_ne(const RunConfig& cfg, const std::vector<double>& N_o_list,
                              const std::vector<double>& fractions) {
  std::vector<NePoint> out;
  for (double N_o : N_o_list) {
    for (double f : fractions) {
      ProtocolConfig p = cfg.protocol;
      p.N_o = static_cast<std::int64_t>(std::llround(N_o));
      p.N_e = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(f * N_o)));
      NePoint pt;
      pt.N_o = static_cast<double>(p.N_o);
      pt.N_e = static_cast<double>(p.N_e);
      pt.N = std::max(0.0, p.reconciled_count());
      try {
        pt.S_BE = holevo_worst_case(p, cfg.eps.eps_PE, pt.N_e).S_BE;
        pt.K = key_rates(p, cfg.eps, cfg.beta_target, 0.0, pt.S_BE, 0.0).K;
      } catch (const std::domain_error&) {
        pt.S_BE = std::numeric_limits<double>::quiet_NaN();
        pt.K = std::numeric_limits<double>::quiet_NaN();
      }
      pt.no_key = !(pt.K > 0.0);
      out.push_back(pt);
    }
  }
  return out;
}

void write_sweep_ne_csv(std::ostream& out, const std::vector<NePoint>& pts, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "N_o,N_e,N,S_BE,K,no_key\n";
  for (const auto& p : pts) {
    out << fmt(p.N_o) << ',' << fmt(p.N_e) << ',' << fmt(p.N) << ',' << fmt(p.S_BE) << ',' << fmt(p.K) << ','
        << (p.no_key ? 1 : 0) << '\n';
  }
}

std::vector<BenchRow> bench_decode(const RunConfig& cfg, const BenchOptions& opts, std::uint64_t seed) {
  std::vector<BenchRow> rows;
  CodeDatabase db(derive_seed(seed, kCodes));
  for (std::size_t ti = 0; ti < opts.T_list.size(); ++ti) {
    ProtocolConfig p = cfg.protocol;
    p.T = opts.T_list[ti];
    const double gamma = snr(p).gamma;
    const auto quad = generate_quadratures(p, opts.N, derive_seed(seed, ti));
    const GaussianChannel ch{p.V_A, 1.0 / gamma};
    const auto q = build_quantizer(ch, p.m).config;
    const std::size_t first = rows.size();
    for (std::size_t n_r : opts.n_r_list) {
      SliceContext ctx;
      ctx.quantizer = q;
      ctx.noise_var = ch.noise_var;
      ctx.conditioning = opts.conditioning;
      ctx.max_iter = opts.max_iter;
      ctx.codes = codes_below_capacity(db, q, ch, opts.conditioning, opts.rate_margin, static_cast<std::uint32_t>(n_r));
      const auto blocks = partition_blocks(q, quad.x, quad.y, n_r);
      BenchRow row;
      row.T = p.T;
      row.gamma = gamma;
      row.N_R = n_r;
      row.blocks = blocks.size();
      if (blocks.empty()) {
        rows.push_back(row);
        continue;
      }
      const auto dec = decode_blocks_parallel(blocks, ctx, opts.workers);
      row.seconds = dec.total_seconds;
      if (opts.serial_baseline) {
        row.seconds_serial = opts.workers == 1 ? dec.total_seconds : decode_blocks_parallel(blocks, ctx, 1).total_seconds;
      }
      double errors = 0, coded = 0, failures = 0, iters = 0, slices = 0;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& r = dec.blocks[b];
        if (!r.all_converged()) ++failures;
        for (int j = 0; j < q.m; ++j) {
          if (!ctx.codes[j]) continue;
          for (std::size_t i = 0; i < n_r; ++i) errors += r.bits[j][i] != blocks[b].bits[j][i];
          coded += static_cast<double>(n_r);
          iters += r.iterations[j];
          slices += 1;
          row.total_ops += 7.0 * static_cast<double>(ctx.codes[j]->edges()) * r.iterations[j];
        }
      }
      row.p_decode = coded > 0 ? errors / coded : 0.0;
      row.block_failure_rate = failures / static_cast<double>(blocks.size());
      row.mean_iterations = slices > 0 ? iters / slices : 0.0;
      row.c_h = row.total_ops > 0 ? row.seconds / row.total_ops : 0.0;
      rows.push_back(row);
    }
    // Normalize times to the largest block length at this T.
    std::size_t ref = first;
    for (std::size_t i = first; i < rows.size(); ++i) {
      if (rows[i].N_R > rows[ref].N_R) ref = i;
    }
    for (std::size_t i = first; i < rows.size(); ++i) {
      rows[i].time_normalized = rows[ref].seconds > 0 ? rows[i].seconds / rows[ref].seconds : 0.0;
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "T,gamma,N_R,blocks,p_decode,block_failure_rate,mean_iterations,total_ops,seconds,seconds_serial,"
         "serial_over_parallel,time_normalized,c_h\n";
  for (const auto& r : rows) {
    const double ratio = r.seconds > 0 && r.seconds_serial > 0 ? r.seconds_serial / r.seconds : 0.0;
    out << fmt(r.T) << ',' << fmt(r.gamma) << ',' << r.N_R << ',' << r.blocks << ',' << fmt(r.p_decode) << ','
        << fmt(r.block_failure_rate) << ',' << fmt(r.mean_iterations) << ',' << fmt(r.total_ops) << ','
        << fmt(r.seconds) << ',' << fmt(r.seconds_serial) << ',' << fmt(ratio) << ',' << fmt(r.time_normalized)
        << ',' << fmt(r.c_h) << '\n';
  }
}

CalibrationResult calibrate_ch_run(const RunConfig& cfg, std::size_t n_r, std::uint64_t seed) {
  BenchOptions bo;
  bo.N = n_r;
  bo.n_r_list = {n_r};
  bo.T_list = {cfg.protocol.T};
  bo.serial_baseline = false;
  const auto rows = bench_decode(cfg, bo, seed);
  CalibrationResult c;
  c.N_R = n_r;
  c.total_ops = rows.front().total_ops;
  c.seconds = rows.front().seconds;
  c.c_h = calibrate_ch(c.seconds, c.total_ops);
  return c;
}

}  // namespace cvqkd
