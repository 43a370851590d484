// Command-line front end: protocol runs, block-length optimization and the
// reproduction sweeps.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cvqkd/pipeline.hpp"

using namespace cvqkd;

namespace {

struct Common {
  std::string config_path;
  std::string preset = "standard";
  std::uint64_t seed = 1;
  std::string out_dir;
  int workers = 1;
  std::string log_mode = "as-written";
  std::string de_mode = "standard";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "key = value config file (overrides --preset)");
  sub->add_option("--preset", c.preset, "built-in settings when no config is given")
      ->check(CLI::IsMember({"standard", "green"}));
  sub->add_option("--seed", c.seed, "RNG seed");
  sub->add_option("--out", c.out_dir, "output directory");
  sub->add_option("--workers", c.workers, "decoder worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--log-mode", c.log_mode, "dispersion log base: as-written | standard");
  sub->add_option("--de-mode", c.de_mode, "density-evolution update: as-written | standard");
}

RunConfig load(const Common& c) {
  if (!c.config_path.empty()) return load_config(c.config_path);
  return c.preset == "green" ? green_settings() : standard_settings();
}

std::string hex(std::uint64_t v) {
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << v;
  return o.str();
}

std::vector<std::string> provenance(const Common& c, const RunConfig& cfg) {
  return {"seed=" + std::to_string(c.seed) + " config_hash=" + hex(config_hash(cfg))};
}

/// Opens out/<name> when --out is set; otherwise the caller writes to stdout.
std::ofstream open_output(const Common& c, const std::string& name) {
  std::filesystem::create_directories(c.out_dir);
  const auto path = std::filesystem::path(c.out_dir) / name;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::cerr << "wrote " << path.string() << '\n';
  return f;
}

template <typename Writer>
void emit(const Common& c, const std::string& name, Writer&& w) {
  if (c.out_dir.empty()) {
    w(std::cout);
  } else {
    auto f = open_output(c, name);
    w(f);
  }
}

void print_optimum(std::ostream& o, const OptimizationResult& r) {
  o << "log_mode=" << to_string(r.log_mode) << '\n'
    << "  N_R_star=" << r.N_R_star << (r.interior_root ? "" : " (endpoint, no interior root)") << '\n'
    << "  K_prime_max=" << r.K_prime_max << " bits/s\n"
    << "  grid_N_R=" << r.grid_N_R << " grid_K_prime=" << r.grid_K_prime << '\n'
    << "  root_residual=" << r.root_residual << " midpoint_derivative=" << r.midpoint_derivative << '\n'
    << "  gain=" << r.gain << (r.gain_min_nonpositive ? " (min K' <= 0, ratio not meaningful)" : "") << '\n'
    << "  concavity lhs=" << r.concavity_at_star.lhs << " rhs=" << r.concavity_at_star.rhs
    << (r.concavity_ok ? " holds" : " fails") << '\n'
    << "  B1=" << r.B1 << " B2=" << r.B2 << '\n';
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) v.push_back(std::stod(tok));
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CV-QKD slice reconciliation simulator and block-length optimizer"};
  app.require_subcommand(1);
  Common c;

  auto* run = app.add_subcommand("run", "simulate a full protocol run with both parties");
  add_common(run, c);
  int frames = 1000;
  run->add_option("--calibration-frames", frames, "frames per code-rate calibration batch");

  auto* opt = app.add_subcommand("optimize-nr", "solve for the throughput-optimal block length");
  add_common(opt, c);
  double lo = 1e5, hi = 0;
  opt->add_option("--lo", lo, "lower end of the N_R interval");
  opt->add_option("--hi", hi, "upper end (default N)");

  auto* snr_cmd = app.add_subcommand("sweep-nr", "K'(N_R) curve, normalized to its maximum");
  add_common(snr_cmd, c);
  int points = 60;
  snr_cmd->add_option("--points", points, "log-spaced grid points on [1e5, N]");

  auto* sne = app.add_subcommand("sweep-ne", "K versus the estimation-subset size");
  add_common(sne, c);
  std::string n_o_list = "1e9,1e10";
  int ne_points = 41;
  sne->add_option("--n-o", n_o_list, "comma-separated N_o values");
  sne->add_option("--points", ne_points, "log-spaced N_e / N_o fractions on [1e-4, 1]");

  auto* bench = app.add_subcommand("bench", "decode error rate and time versus block length");
  add_common(bench, c);
  std::size_t bench_n = 200'000;
  std::string nr_list = "2000,10000,50000", t_list = "0.9";
  bench->add_option("--n", bench_n, "quadratures per T");
  bench->add_option("--n-r", nr_list, "comma-separated block lengths");
  bench->add_option("--t", t_list, "comma-separated transmissivities");

  auto* cal = app.add_subcommand("calibrate-ch", "seconds per decoder operation");
  add_common(cal, c);
  std::size_t cal_nr = 100'000;
  cal->add_option("--n-r", cal_nr, "block length of the timed decode");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = load(c);
    const LogMode log_mode = parse_log_mode(c.log_mode);
    const DeMode de_mode = parse_de_mode(c.de_mode);

    if (run->parsed()) {
      RunOptions ro;
      ro.workers = c.workers;
      ro.calibration_frames = frames;
      ro.log_mode = log_mode;
      ro.out_dir = c.out_dir;
      const auto r = run_protocol(cfg, c.seed, ro);
      std::cout << r.manifest.to_text();
      return exit_code(r.manifest.outcome);
    }

    if (opt->parsed()) {
      for (LogMode mode : {LogMode::Natural, LogMode::Bits}) {
        ModelOptions mo{mode, de_mode, std::nullopt};
        const auto model = build_rate_model(cfg, mo);
        const auto r = solve_optimal_nr(model, lo, hi);
        print_optimum(std::cout, r);
        if (!c.out_dir.empty()) {
          auto f = open_output(c, "k_prime_curve_" + to_string(mode) + ".csv");
          auto comments = provenance(c, cfg);
          comments.push_back("log_mode=" + to_string(mode));
          write_curve_csv(f, k_prime_curve(model, log_grid(r.lo, r.hi, 200)), comments);
        }
      }
      return 0;
    }

    if (snr_cmd->parsed()) {
      ModelOptions mo{log_mode, de_mode, std::nullopt};
      const auto r = sweep_nr(cfg, log_grid(1e5, cfg.protocol.reconciled_count(), points), mo);
      emit(c, "sweep_nr.csv", [&](std::ostream& o) { write_sweep_nr_csv(o, r, provenance(c, cfg)); });
      return 0;
    }

    if (sne->parsed()) {
      const auto pts = sweep_ne(cfg, parse_list(n_o_list), default_ne_fractions(ne_points));
      emit(c, "sweep_ne.csv", [&](std::ostream& o) { write_sweep_ne_csv(o, pts, provenance(c, cfg)); });
      return 0;
    }

    if (bench->parsed()) {
      BenchOptions bo;
      bo.N = bench_n;
      bo.n_r_list.clear();
      for (double v : parse_list(nr_list)) bo.n_r_list.push_back(static_cast<std::size_t>(v));
      bo.T_list = parse_list(t_list);
      bo.workers = c.workers;
      const auto rows = bench_decode(cfg, bo, c.seed);
      emit(c, "bench.csv", [&](std::ostream& o) {
        auto comments = provenance(c, cfg);
        comments.push_back("workers=" + std::to_string(c.workers) + " timings are machine-dependent");
        write_bench_csv(o, rows, comments);
      });
      return 0;
    }

    if (cal->parsed()) {
      const auto r = calibrate_ch_run(cfg, cal_nr, c.seed);
      std::cout << "N_R=" << r.N_R << "\ntotal_ops=" << r.total_ops << "\nseconds=" << r.seconds
                << "\nc_h=" << r.c_h << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfigError;
  }
  return 0;
}
