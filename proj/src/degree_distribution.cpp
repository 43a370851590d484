#include "cvqkd/degree_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace cvqkd {

int DegreeDistribution::max_variable_degree() const {
  int d = 0;
  for (const auto& [a, f] : lambda) d = std::max(d, a);
  return d;
}

int DegreeDistribution::max_check_degree() const {
  int d = 0;
  for (const auto& [b, f] : rho) d = std::max(d, b);
  return d;
}

double DegreeDistribution::lambda_inv_sum() const {
  double s = 0.0;
  for (const auto& [a, f] : lambda) s += f / a;
  return s;
}

double DegreeDistribution::rho_inv_sum() const {
  double s = 0.0;
  for (const auto& [b, f] : rho) s += f / b;
  return s;
}

double DegreeDistribution::rho_degree_sum() const {
  double s = 0.0;
  for (const auto& [b, f] : rho) s += b * f;
  return s;
}

double DegreeDistribution::design_rate() const { return 1.0 - rho_inv_sum() / lambda_inv_sum(); }

double DegreeDistribution::edge_factor() const {
  return rho_inv_sum() / lambda_inv_sum() * rho_degree_sum();
}

std::vector<double> DegreeDistribution::variable_node_fractions() const {
  std::vector<double> out;
  const double s = lambda_inv_sum();
  for (const auto& [a, f] : lambda) out.push_back(f / a / s);
  return out;
}

std::vector<double> DegreeDistribution::check_node_fractions() const {
  std::vector<double> out;
  const double s = rho_inv_sum();
  for (const auto& [b, f] : rho) out.push_back(f / b / s);
  return out;
}

void DegreeDistribution::validate() const {
  auto check_side = [](const std::vector<std::pair<int, double>>& side, const char* name) {
    if (side.empty()) throw std::invalid_argument(std::string(name) + " is empty");
    double s = 0.0;
    for (const auto& [d, f] : side) {
      if (d < 2) throw std::invalid_argument(std::string(name) + ": degrees must be >= 2");
      if (f < 0.0) throw std::invalid_argument(std::string(name) + ": negative fraction");
      s += f;
    }
    if (std::fabs(s - 1.0) > 1e-9) {
      throw std::invalid_argument(std::string(name) + ": fractions must sum to 1");
    }
  };
  check_side(lambda, "lambda");
  check_side(rho, "rho");
  const double r = design_rate();
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("design rate must lie in (0, 1)");
}

DegreeDistribution DegreeDistribution::regular(int var_degree, int check_degree) {
  DegreeDistribution dd;
  dd.lambda = {{var_degree, 1.0}};
  dd.rho = {{check_degree, 1.0}};
  dd.validate();
  return dd;
}

DegreeDistribution DegreeDistribution::for_rate(double rate) {
  if (!(rate > 0.0 && rate < 1.0)) throw std::invalid_argument("for_rate: rate must lie in (0,1)");
  DegreeDistribution dd;
  // Rate-1/2 optimized variable profile (max degree 8); the check side is
  // re-fitted per rate.
  dd.lambda = {{2, 0.30013}, {3, 0.28395}, {8, 0.41592}};
  const double s = (1.0 - rate) * dd.lambda_inv_sum();
  int d = std::max(2, static_cast<int>(std::floor(1.0 / s)));
  if (1.0 / (d + 1) >= s) ++d;
  const double rho_d = std::clamp((s - 1.0 / (d + 1)) * d * (d + 1), 0.0, 1.0);
  if (rho_d >= 1.0) {
    dd.rho = {{d, 1.0}};
  } else if (rho_d <= 0.0) {
    dd.rho = {{d + 1, 1.0}};
  } else {
    dd.rho = {{d, rho_d}, {d + 1, 1.0 - rho_d}};
  }
  dd.validate();
  return dd;
}

DegreeDistribution parse_degree_distribution(std::istream& in) {
  DegreeDistribution dd;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    int deg = 0;
    double frac = 0.0;
    if (!(ls >> deg >> frac)) {
      throw std::invalid_argument("degree distribution line " + std::to_string(lineno) +
                                  ": expected '<lambda|rho> degree fraction'");
    }
    if (kind == "lambda") dd.lambda.emplace_back(deg, frac);
    else if (kind == "rho") dd.rho.emplace_back(deg, frac);
    else throw std::invalid_argument("degree distribution line " + std::to_string(lineno) +
                                     ": unknown kind '" + kind + "'");
  }
  dd.validate();
  return dd;
}

DegreeDistribution load_degree_distribution(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open degree distribution file " + path);
  return parse_degree_distribution(f);
}

std::string to_text(const DegreeDistribution& dd) {
  std::ostringstream o;
  o << std::setprecision(17);
  for (const auto& [a, f] : dd.lambda) o << "lambda " << a << ' ' << f << '\n';
  for (const auto& [b, f] : dd.rho) o << "rho " << b << ' ' << f << '\n';
  return o.str();
}

}  // namespace cvqkd
