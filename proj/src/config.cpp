#include "cvqkd/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cvqkd {

void ProtocolConfig::validate() const {
  if (!(V_A > 0.0)) throw ConfigError("V_A must be positive");
  if (!(T >= 0.0 && T <= 1.0)) throw ConfigError("T must lie in [0, 1]");
  if (!(xi_ch >= 0.0) || !(xi_d >= 0.0)) throw ConfigError("noise terms must be non-negative");
  if (!(eta_d > 0.0 && eta_d <= 1.0)) throw ConfigError("eta_d must lie in (0, 1]");
  if (!(N_e > 0 && N_e < N_o)) throw ConfigError("require 0 < N_e < N_o");
  if (m < 1 || m > 16) throw ConfigError("m must lie in [1, 16]");
  if (!(c_h > 0.0)) throw ConfigError("c_h must be positive");
  if (!(post_select_threshold >= 0.0)) throw ConfigError("post_select_threshold must be >= 0");
  if (!(reconciled_count() > 0.0)) throw ConfigError("N = 2 N_o - 2 N_e must be positive");
}

void EpsilonBudget::validate() const {
  for (double e : {eps_EC, eps_s, eps_PA, eps_PE}) {
    if (!(e > 0.0 && e < 0.5)) throw ConfigError("each eps component must lie in (0, 1/2)");
  }
}

RunConfig standard_settings() {
  RunConfig c;
  c.protocol = ProtocolConfig{};
  c.eps = EpsilonBudget::uniform(2.5e-10);
  return c;
}

RunConfig green_settings() {
  RunConfig c;
  c.protocol.V_A = 4.0;
  c.protocol.T = 0.92;
  c.protocol.xi_ch = 0.0180;
  c.protocol.xi_d = 0.0128;
  c.protocol.N_o = 10'000'000'000;
  c.protocol.N_e = 5'000'000'000;
  c.eps = EpsilonBudget::uniform(2.5e-7);
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("trailing characters in value for " + key);
  return x;
}

std::int64_t parse_count(const std::string& key, const std::string& v) {
  const double x = parse_real(key, v);
  if (x != std::floor(x) || std::fabs(x) > 9.0e18) {
    throw ConfigError(key + " must be an integer");
  }
  return static_cast<std::int64_t>(x);
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig c = standard_settings();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    auto& p = c.protocol;
    if (key == "V_A") p.V_A = parse_real(key, val);
    else if (key == "T") p.T = parse_real(key, val);
    else if (key == "xi_ch") p.xi_ch = parse_real(key, val);
    else if (key == "xi_d") p.xi_d = parse_real(key, val);
    else if (key == "eta_d") p.eta_d = parse_real(key, val);
    else if (key == "N_o") p.N_o = parse_count(key, val);
    else if (key == "N_e") p.N_e = parse_count(key, val);
    else if (key == "m") p.m = static_cast<int>(parse_count(key, val));
    else if (key == "c_h") p.c_h = parse_real(key, val);
    else if (key == "post_select_threshold") p.post_select_threshold = parse_real(key, val);
    else if (key == "eps_EC") c.eps.eps_EC = parse_real(key, val);
    else if (key == "eps_s") c.eps.eps_s = parse_real(key, val);
    else if (key == "eps_PA") c.eps.eps_PA = parse_real(key, val);
    else if (key == "eps_PE") c.eps.eps_PE = parse_real(key, val);
    else if (key == "beta_target") c.beta_target = parse_real(key, val);
    else if (key == "N_R") c.N_R = parse_count(key, val);
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  c.protocol.validate();
  c.eps.validate();
  if (!(c.beta_target > 0.0 && c.beta_target <= 1.0)) {
    throw ConfigError("beta_target must lie in (0, 1]");
  }
  if (c.N_R < 1) throw ConfigError("N_R must be positive");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  return parse_config(f);
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream o;
  o << std::setprecision(17);
  const auto& p = c.protocol;
  o << "V_A = " << p.V_A << "\nT = " << p.T << "\nxi_ch = " << p.xi_ch << "\nxi_d = " << p.xi_d
    << "\neta_d = " << p.eta_d << "\nN_o = " << p.N_o << "\nN_e = " << p.N_e << "\nm = " << p.m
    << "\nc_h = " << p.c_h << "\npost_select_threshold = " << p.post_select_threshold
    << "\neps_EC = " << c.eps.eps_EC << "\neps_s = " << c.eps.eps_s
    << "\neps_PA = " << c.eps.eps_PA << "\neps_PE = " << c.eps.eps_PE
    << "\nbeta_target = " << c.beta_target << "\nN_R = " << c.N_R << "\n";
  return o.str();
}

}  // namespace cvqkd
