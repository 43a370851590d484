#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cvqkd/degree_distribution.hpp"

namespace cvqkd {

using Bit = std::uint8_t;

/// Sparse parity-check matrix in compressed form. Edges are numbered in
/// check-major order; `var_edges` lists, for every variable node, the ids of
/// its edges.
class LdpcCode {
 public:
  LdpcCode() = default;

  /// Builds from one variable-index list per check node. Throws on
  /// out-of-range indices or repeated variables within a check.
  static LdpcCode from_checks(std::uint32_t n, const std::vector<std::vector<std::uint32_t>>& checks,
                              std::uint64_t seed = 0);

  [[nodiscard]] std::uint32_t n() const { return n_; }
  [[nodiscard]] std::uint32_t num_checks() const {
    return static_cast<std::uint32_t>(check_offsets_.size()) - 1;
  }
  /// Total number of nonzeros G.
  [[nodiscard]] std::size_t edges() const { return check_vars_.size(); }
  /// Realized rate 1 - checks / n.
  [[nodiscard]] double rate() const {
    return 1.0 - static_cast<double>(num_checks()) / static_cast<double>(n_);
  }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  [[nodiscard]] std::span<const std::uint32_t> check(std::uint32_t c) const {
    return {check_vars_.data() + check_offsets_[c], check_offsets_[c + 1] - check_offsets_[c]};
  }
  [[nodiscard]] std::uint32_t check_offset(std::uint32_t c) const { return check_offsets_[c]; }
  [[nodiscard]] std::span<const std::uint32_t> var_edges(std::uint32_t v) const {
    return {var_edges_.data() + var_offsets_[v], var_offsets_[v + 1] - var_offsets_[v]};
  }
  [[nodiscard]] std::span<const std::uint32_t> edge_vars() const { return check_vars_; }

  [[nodiscard]] std::map<int, std::size_t> variable_degree_histogram() const;
  [[nodiscard]] std::map<int, std::size_t> check_degree_histogram() const;

  /// Length of the shortest cycle, or 0 when the graph is acyclic.
  [[nodiscard]] int girth() const;

  friend bool operator==(const LdpcCode&, const LdpcCode&) = default;

 private:
  std::uint32_t n_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint32_t> check_offsets_{0};
  std::vector<std::uint32_t> check_vars_;
  std::vector<std::uint32_t> var_offsets_{0};
  std::vector<std::uint32_t> var_edges_;
};

struct PegOptions {
  /// Maximum number of check layers explored per edge placement.
  int max_depth = 8;
  /// Stop expanding once this many checks have been reached.
  std::size_t max_reached = 256;
};

/// Integer degree sequences realizing `dd` on n variable nodes.
struct DegreeSequences {
  std::vector<int> variable;  ///< nondecreasing
  std::vector<int> check;
};

/// Throws std::invalid_argument when the distribution cannot be realized on
/// n nodes; the message reports the socket residue.
DegreeSequences realize_degrees(const DegreeDistribution& dd, std::uint32_t n);

/// Progressive-edge-growth construction with seeded tie-breaking. Requires
/// n >= 100 unless `allow_small` is set.
LdpcCode construct_code(const DegreeDistribution& dd, std::uint32_t n, std::uint64_t seed,
                        const PegOptions& opts = {}, bool allow_small = false);

/// s = H bits over GF(2). Throws std::invalid_argument on length mismatch.
std::vector<Bit> syndrome(const LdpcCode& code, std::span<const Bit> bits);

/// Code cache format: a header line "ldpc <n> <checks> <rate> <seed>" followed
/// by one line per check node listing its variable indices.
void write_code(std::ostream& out, const LdpcCode& code);
LdpcCode read_code(std::istream& in);
void save_code(const std::string& path, const LdpcCode& code);
LdpcCode load_code(const std::string& path);

}  // namespace cvqkd
