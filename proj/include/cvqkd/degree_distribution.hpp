#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cvqkd {

/// Edge-perspective degree distribution pair lambda(x), rho(x).
/// Each entry is (degree, fraction of edges attached to nodes of that degree).
struct DegreeDistribution {
  std::vector<std::pair<int, double>> lambda;
  std::vector<std::pair<int, double>> rho;

  [[nodiscard]] int max_variable_degree() const;
  [[nodiscard]] int max_check_degree() const;

  /// sum_a lambda_a / a
  [[nodiscard]] double lambda_inv_sum() const;
  /// sum_b rho_b / b
  [[nodiscard]] double rho_inv_sum() const;
  /// sum_b b rho_b
  [[nodiscard]] double rho_degree_sum() const;

  /// 1 - (sum rho_b / b) / (sum lambda_a / a)
  [[nodiscard]] double design_rate() const;

  /// Edges per variable node as used in the per-iteration operation count:
  /// (sum rho_b / b) / (sum lambda_a / a) * (sum b rho_b).
  [[nodiscard]] double edge_factor() const;

  /// Node-perspective variable degree fractions, same order as `lambda`.
  [[nodiscard]] std::vector<double> variable_node_fractions() const;
  [[nodiscard]] std::vector<double> check_node_fractions() const;

  /// Throws std::invalid_argument unless fractions are non-negative, sum to
  /// one (1e-9), degrees are >= 2, and the design rate lies in (0, 1).
  void validate() const;

  static DegreeDistribution regular(int var_degree, int check_degree);

  /// Shipped default for a target rate: a fixed variable-side profile and a
  /// check side concentrated on two consecutive degrees, tuned so the design
  /// rate equals `rate` exactly.
  static DegreeDistribution for_rate(double rate);
};

/// Reads lines "lambda <degree> <fraction>" / "rho <degree> <fraction>";
/// '#' starts a comment.
DegreeDistribution parse_degree_distribution(std::istream& in);
DegreeDistribution load_degree_distribution(const std::string& path);
std::string to_text(const DegreeDistribution& dd);

}  // namespace cvqkd
