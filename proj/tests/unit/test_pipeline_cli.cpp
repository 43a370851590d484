#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvqkd/pipeline.hpp"

using namespace cvqkd;
namespace fs = std::filesystem;

namespace {

// Near-noiseless desk configuration: N = 2e5 reconciled values, N_R = 1e4.
RunConfig desk_config() {
  RunConfig c;
  c.protocol.V_A = 100.0;
  c.protocol.T = 1.0;
  c.protocol.xi_ch = 0.001;
  c.protocol.xi_d = 0.001;
  c.protocol.N_o = 200'000;
  c.protocol.N_e = 100'000;
  c.eps = EpsilonBudget::uniform(1e-3);
  c.N_R = 10'000;
  return c;
}

RunOptions desk_options(int workers) {
  RunOptions o;
  o.workers = workers;
  o.calibration_frames = 100;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Manifest text without input echoes: worker count and output paths.
std::string comparable(const RunManifest& m) {
  std::istringstream in(m.to_text(false));
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("workers=", 0) != 0 && line.rfind("output=", 0) != 0) out += line + '\n';
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CVQKD_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("cvqkd_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("outcomes and exit codes") {
  CHECK(exit_code(Outcome::Success) == 0);
  CHECK(exit_code(Outcome::ParameterEstimationAbort) == 2);
  CHECK(exit_code(Outcome::NoKey) == 2);
  CHECK(exit_code(Outcome::DecodeFailure) == 3);
  CHECK(kExitConfigError == 4);

  const auto a = desk_config();
  auto b = a;
  CHECK(config_hash(a) == config_hash(desk_config()));
  b.protocol.V_A = 99.0;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("configuration errors") {
  auto c = desk_config();
  c.N_R = 500'000;
  CHECK_THROWS_AS(run_protocol(c, 1), ConfigError);
  c.N_R = 50;
  CHECK_THROWS_AS(run_protocol(c, 1), ConfigError);
}

TEST_CASE("high excess noise aborts at parameter estimation") {
  auto c = desk_config();
  c.protocol.V_A = 5.0;
  c.protocol.T = 0.9;
  c.protocol.xi_ch = 0.5;
  const auto r = run_protocol(c, 3, desk_options(1));
  CHECK(r.manifest.outcome == Outcome::ParameterEstimationAbort);
  CHECK_FALSE(r.manifest.abort_reason.empty());
  CHECK(r.key_length == 0);
  CHECK(r.alice_key.empty());
}

TEST_CASE("desk run end to end") {
  const auto cfg = desk_config();
  const auto dir = scratch_dir("run");
  auto opts = desk_options(1);
  opts.out_dir = dir.string();
  const auto r = run_protocol(cfg, 42, opts);
  REQUIRE(r.manifest.outcome == Outcome::Success);
  CHECK(r.hash_ok);
  CHECK(r.alice_reconciled.size() == 5u * 200'000u);
  CHECK(r.alice_reconciled == r.bob_reconciled);
  CHECK(r.key_length == static_cast<std::size_t>(std::floor(cfg.protocol.N_o * r.report.K)));
  CHECK(r.key_length > 0);
  CHECK(r.alice_key.size() == r.key_length);
  CHECK(r.alice_key == r.bob_key);
  CHECK(r.manifest.codes.size() == 5);
  for (const auto& sc : r.manifest.codes) {
    if (sc.disclosed) continue;
    CHECK(std::fabs(sc.realized_rate - sc.rate_hundredths / 100.0) <= 2.0 / cfg.N_R);
  }

  for (const char* f : {"manifest.txt", "key_rate.csv", "key.hex"}) CHECK(fs::exists(dir / f));
  const auto csv = slurp(dir / "key_rate.csv");
  std::ostringstream hash;
  hash << std::hex;
  hash.width(16);
  hash.fill('0');
  hash << config_hash(cfg);
  CHECK(csv.find("seed=42") != std::string::npos);
  CHECK(csv.find(hash.str()) != std::string::npos);

  // Same seed, other worker count: same manifest and key.
  const auto again = run_protocol(cfg, 42, desk_options(3));
  CHECK(comparable(again.manifest) == comparable(r.manifest));
  CHECK(again.alice_key == r.alice_key);
  CHECK(again.alice_reconciled == r.alice_reconciled);
  fs::remove_all(dir);
}

TEST_CASE("sweep over block length") {
  const auto cfg = standard_settings();
  const auto grid = log_grid(1e5, cfg.protocol.reconciled_count(), 60);
  const auto r = sweep_nr(cfg, grid, {});
  REQUIRE(r.curve.size() == r.normalized.size());
  double mx = -1e300;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < r.normalized.size(); ++i) {
    if (r.normalized[i] > mx) {
      mx = r.normalized[i];
      peak = i;
    }
  }
  CHECK(mx == doctest::Approx(1.0));
  CHECK(r.curve[peak].N_R == doctest::Approx(r.optimum.N_R_star));
  REQUIRE(r.curve.size() - peak > 5);
  for (std::size_t i = peak + 1; i < r.curve.size(); ++i) CHECK(r.normalized[i] < r.normalized[i - 1]);

  std::ostringstream a, b;
  write_sweep_nr_csv(a, r, {"seed=1"});
  write_sweep_nr_csv(b, sweep_nr(cfg, grid, {}), {"seed=1"});
  CHECK(a.str() == b.str());
}

TEST_CASE("sweep over the estimation subset") {
  const auto cfg = standard_settings();
  const auto pts = sweep_ne(cfg, {1e9}, {1e-4, 0.5, 1.0});
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].no_key);
  CHECK(pts[1].K > 0.0);
  CHECK(pts[1].N == doctest::Approx(1e9));
  CHECK(pts[2].N == 0.0);
  CHECK(pts[2].K <= 0.0);
  CHECK(pts[2].no_key);

  const auto f = default_ne_fractions(41);
  CHECK(f.size() == 42);
  CHECK(std::find(f.begin(), f.end(), 0.5) != f.end());
  CHECK(std::is_sorted(f.begin(), f.end()));
  CHECK(f.front() == doctest::Approx(1e-4));
  CHECK(f.back() == doctest::Approx(1.0));
}

TEST_CASE("decode bench") {
  const auto cfg = standard_settings();
  BenchOptions o;
  o.N = 60'000;
  o.n_r_list = {2'000, 6'000, 20'000};
  o.serial_baseline = false;
  const auto rows = bench_decode(cfg, o, 7);
  REQUIRE(rows.size() == 3);
  CHECK(rows.back().time_normalized == doctest::Approx(1.0));
  for (const auto& r : rows) {
    CHECK(r.blocks == o.N / r.N_R);
    CHECK(r.p_decode >= 0.0);
    CHECK(r.p_decode <= 0.5);
    CHECK(r.total_ops > 0.0);
  }
  for (const auto& r : rows) CHECK((r.p_decode == 0.0 || r.block_failure_rate > 0.0));

  // Everything but the timings is reproducible.
  const auto again = bench_decode(cfg, o, 7);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].p_decode == rows[i].p_decode);
    CHECK(again[i].mean_iterations == rows[i].mean_iterations);
  }

  const auto cal = calibrate_ch_run(cfg, 20'000, 1);
  CHECK(cal.c_h == doctest::Approx(cal.seconds / cal.total_ops));
  CHECK(cal.c_h > 0.0);
}

TEST_CASE("command line") {
  const auto dir = scratch_dir("cli");
  const auto cfg_path = dir / "bad.cfg";
  std::ofstream(cfg_path) << "T = 2\n";
  CHECK(run_cli("run --config " + cfg_path.string()) == 4);
  CHECK(run_cli("run --config " + (dir / "missing.cfg").string()) == 4);

  const auto noisy = dir / "noisy.cfg";
  std::ofstream(noisy) << "xi_ch = 0.5\nN_o = 200000\nN_e = 100000\nN_R = 10000\n";
  CHECK(run_cli("run --config " + noisy.string() + " --calibration-frames 10") == 2);

  CHECK(run_cli("sweep-ne --n-o 1e9 --points 9 --out " + (dir / "a").string()) == 0);
  CHECK(run_cli("sweep-ne --n-o 1e9 --points 9 --out " + (dir / "b").string()) == 0);
  const auto sa = slurp(dir / "a" / "sweep_ne.csv");
  CHECK(!sa.empty());
  CHECK(sa == slurp(dir / "b" / "sweep_ne.csv"));
  CHECK(sa.rfind("# seed=1 config_hash=", 0) == 0);

  CHECK(run_cli("sweep-nr --points 20 --seed 5 --out " + (dir / "a").string()) == 0);
  CHECK(run_cli("sweep-nr --points 20 --seed 5 --out " + (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "sweep_nr.csv") == slurp(dir / "b" / "sweep_nr.csv"));

  CHECK(run_cli("optimize-nr --out " + (dir / "a").string()) == 0);
  CHECK(fs::exists(dir / "a" / "k_prime_curve_as-written.csv"));
  CHECK(fs::exists(dir / "a" / "k_prime_curve_standard.csv"));
  CHECK(run_cli("sweep-nr --log-mode base10") == 4);
  CHECK(run_cli("frobnicate") != 0);
  fs::remove_all(dir);
}
