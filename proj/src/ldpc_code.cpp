#include "cvqkd/ldpc_code.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cvqkd {

LdpcCode LdpcCode::from_checks(std::uint32_t n,
                               const std::vector<std::vector<std::uint32_t>>& checks,
                               std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("LdpcCode: n must be positive");
  LdpcCode code;
  code.n_ = n;
  code.seed_ = seed;
  code.check_offsets_.assign(1, 0);
  std::vector<std::uint32_t> var_deg(n, 0);
  for (const auto& row : checks) {
    std::vector<std::uint32_t> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("LdpcCode: repeated variable in a check");
    }
    for (std::uint32_t v : row) {
      if (v >= n) throw std::invalid_argument("LdpcCode: variable index out of range");
      code.check_vars_.push_back(v);
      ++var_deg[v];
    }
    code.check_offsets_.push_back(static_cast<std::uint32_t>(code.check_vars_.size()));
  }
  code.var_offsets_.assign(n + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v) code.var_offsets_[v + 1] = code.var_offsets_[v] + var_deg[v];
  code.var_edges_.assign(code.check_vars_.size(), 0);
  std::vector<std::uint32_t> fill(code.var_offsets_.begin(), code.var_offsets_.end() - 1);
  for (std::uint32_t e = 0; e < code.check_vars_.size(); ++e) {
    code.var_edges_[fill[code.check_vars_[e]]++] = e;
  }
  return code;
}

std::map<int, std::size_t> LdpcCode::variable_degree_histogram() const {
  std::map<int, std::size_t> h;
  for (std::uint32_t v = 0; v < n_; ++v) ++h[static_cast<int>(var_edges(v).size())];
  return h;
}

std::map<int, std::size_t> LdpcCode::check_degree_histogram() const {
  std::map<int, std::size_t> h;
  for (std::uint32_t c = 0; c < num_checks(); ++c) ++h[static_cast<int>(check(c).size())];
  return h;
}

int LdpcCode::girth() const {
  // Bipartite BFS from every variable node; cycle length = d(u) + d(w) + 1.
  const std::uint32_t total = n_ + num_checks();
  std::vector<int> dist(total);
  std::vector<std::uint32_t> parent(total);
  int best = std::numeric_limits<int>::max();
  auto neighbours = [&](std::uint32_t node, auto&& fn) {
    if (node < n_) {
      for (std::uint32_t e : var_edges(node)) {
        const auto c = static_cast<std::uint32_t>(
            std::upper_bound(check_offsets_.begin(), check_offsets_.end(), e) -
            check_offsets_.begin() - 1);
        fn(n_ + c);
      }
    } else {
      for (std::uint32_t v : check(node - n_)) fn(v);
    }
  };
  for (std::uint32_t s = 0; s < n_; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<std::uint32_t> q;
    dist[s] = 0;
    parent[s] = s;
    q.push(s);
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      if (2 * dist[u] + 1 >= best) break;
      neighbours(u, [&](std::uint32_t w) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          parent[w] = u;
          q.push(w);
        } else if (parent[u] != w) {
          best = std::min(best, dist[u] + dist[w] + 1);
        }
      });
    }
  }
  return best == std::numeric_limits<int>::max() ? 0 : best;
}

namespace {

/// Largest-remainder rounding of `fractions * total` to integers summing to total.
std::vector<std::int64_t> apportion(const std::vector<double>& fractions, std::int64_t total) {
  std::vector<std::int64_t> counts(fractions.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::int64_t used = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double exact = fractions[i] * static_cast<double>(total);
    counts[i] = static_cast<std::int64_t>(std::floor(exact));
    used += counts[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < total; ++k, ++used) ++counts[rem[k % rem.size()].second];
  return counts;
}

}  // namespace

DegreeSequences realize_degrees(const DegreeDistribution& dd, std::uint32_t n) {
  dd.validate();
  DegreeSequences seq;
  const auto vcounts = apportion(dd.variable_node_fractions(), n);
  std::int64_t edges = 0;
  for (std::size_t i = 0; i < dd.lambda.size(); ++i) {
    for (std::int64_t k = 0; k < vcounts[i]; ++k) seq.variable.push_back(dd.lambda[i].first);
    edges += vcounts[i] * dd.lambda[i].first;
  }
  std::sort(seq.variable.begin(), seq.variable.end());

  const auto m = static_cast<std::int64_t>(
      std::llround(static_cast<double>(n) * dd.rho_inv_sum() / dd.lambda_inv_sum()));
  if (m < 1 || m >= static_cast<std::int64_t>(n)) {
    throw std::invalid_argument("realize_degrees: check count out of range for n");
  }
  const auto ccounts = apportion(dd.check_node_fractions(), m);
  std::int64_t sockets = 0;
  for (std::size_t i = 0; i < dd.rho.size(); ++i) {
    for (std::int64_t k = 0; k < ccounts[i]; ++k) seq.check.push_back(dd.rho[i].first);
    sockets += ccounts[i] * dd.rho[i].first;
  }
  // Repair the socket residue one degree at a time, spreading changes.
  std::int64_t residue = edges - sockets;
  const std::int64_t initial_residue = residue;
  std::sort(seq.check.begin(), seq.check.end());
  std::size_t i = 0;
  while (residue > 0) {
    ++seq.check[i % seq.check.size()];
    --residue;
    ++i;
  }
  std::size_t j = seq.check.size();
  std::size_t guard = 0;
  while (residue < 0) {
    j = (j == 0 ? seq.check.size() : j) - 1;
    if (seq.check[j] > 2) {
      --seq.check[j];
      ++residue;
      guard = 0;
    } else if (++guard > seq.check.size()) {
      throw std::invalid_argument("realize_degrees: cannot absorb socket residue " +
                                  std::to_string(initial_residue) + " for n = " +
                                  std::to_string(n));
    }
  }
  for (int d : seq.check) {
    if (d > static_cast<int>(n)) {
      throw std::invalid_argument("realize_degrees: check degree exceeds n (residue " +
                                  std::to_string(initial_residue) + ")");
    }
  }
  return seq;
}

namespace {

/// Checks grouped by remaining free sockets, with O(1) moves between groups.
class CapacityBuckets {
 public:
  explicit CapacityBuckets(const std::vector<int>& capacity)
      : cap_(capacity), pos_(capacity.size()) {
    const int maxc = capacity.empty() ? 0 : *std::max_element(capacity.begin(), capacity.end());
    buckets_.resize(static_cast<std::size_t>(maxc) + 1);
    for (std::uint32_t c = 0; c < capacity.size(); ++c) insert(c);
    for (int v : capacity) open_ += v > 0 ? 1 : 0;
  }

  [[nodiscard]] int capacity(std::uint32_t c) const { return cap_[c]; }
  [[nodiscard]] std::size_t open_checks() const { return open_; }

  void consume(std::uint32_t c) {
    remove(c);
    if (--cap_[c] == 0) --open_;
    insert(c);
  }

  /// Highest-capacity check for which `allowed` holds; ties broken from a
  /// random starting offset. Returns UINT32_MAX when none qualifies.
  template <typename Pred>
  std::uint32_t pick(std::mt19937_64& rng, Pred allowed) const {
    for (std::size_t cap = buckets_.size() - 1; cap >= 1; --cap) {
      const auto& b = buckets_[cap];
      if (b.empty()) continue;
      const std::size_t start = rng() % b.size();
      for (std::size_t k = 0; k < b.size(); ++k) {
        const std::uint32_t c = b[(start + k) % b.size()];
        if (allowed(c)) return c;
      }
    }
    return std::numeric_limits<std::uint32_t>::max();
  }

 private:
  void insert(std::uint32_t c) {
    auto& b = buckets_[static_cast<std::size_t>(cap_[c])];
    pos_[c] = b.size();
    b.push_back(c);
  }
  void remove(std::uint32_t c) {
    auto& b = buckets_[static_cast<std::size_t>(cap_[c])];
    const std::uint32_t last = b.back();
    b[pos_[c]] = last;
    pos_[last] = pos_[c];
    b.pop_back();
  }

  std::vector<int> cap_;
  std::vector<std::size_t> pos_;
  std::vector<std::vector<std::uint32_t>> buckets_;
  std::size_t open_ = 0;
};

}  // namespace

LdpcCode construct_code(const DegreeDistribution& dd, std::uint32_t n, std::uint64_t seed,
                        const PegOptions& opts, bool allow_small) {
  if (n < 100 && !allow_small) throw std::invalid_argument("construct_code: n must be >= 100");
  const auto seq = realize_degrees(dd, n);
  const auto m = static_cast<std::uint32_t>(seq.check.size());

  std::vector<std::vector<std::uint32_t>> check_adj(m);
  std::vector<std::vector<std::uint32_t>> var_adj(n);
  for (std::uint32_t c = 0; c < m; ++c) check_adj[c].reserve(static_cast<std::size_t>(seq.check[c]));
  CapacityBuckets buckets(seq.check);
  std::mt19937_64 rng(seed);

  std::vector<std::uint32_t> check_mark(m, 0), var_mark(n, 0);
  std::uint32_t epoch = 0;
  std::vector<std::uint32_t> frontier, next, fresh;

  for (std::uint32_t v = 0; v < n; ++v) {
    const int degree = seq.variable[v];
    for (int k = 0; k < degree; ++k) {
      ++epoch;
      frontier.assign(1, v);
      var_mark[v] = epoch;
      std::size_t reached_open = 0, reached = 0;
      int depth = 0;
      std::uint32_t chosen = std::numeric_limits<std::uint32_t>::max();
      auto unreached = [&](std::uint32_t c) { return check_mark[c] != epoch; };
      while (true) {
        fresh.clear();
        for (std::uint32_t u : frontier) {
          for (std::uint32_t c : var_adj[u]) {
            if (check_mark[c] == epoch) continue;
            check_mark[c] = epoch;
            fresh.push_back(c);
            ++reached;
            if (buckets.capacity(c) > 0) ++reached_open;
          }
        }
        if (fresh.empty()) {
          chosen = buckets.pick(rng, unreached);
          break;
        }
        ++depth;
        if (reached_open == buckets.open_checks()) {
          // Every open check is reachable: take the farthest layer, never a
          // current neighbour of v.
          if (depth > 1) {
            int best_cap = 0;
            std::vector<std::uint32_t> ties;
            for (std::uint32_t c : fresh) {
              const int cap = buckets.capacity(c);
              if (cap > best_cap) {
                best_cap = cap;
                ties.assign(1, c);
              } else if (cap == best_cap && cap > 0) {
                ties.push_back(c);
              }
            }
            if (!ties.empty()) chosen = ties[rng() % ties.size()];
          }
          break;
        }
        if (depth >= opts.max_depth || reached >= opts.max_reached) {
          chosen = buckets.pick(rng, unreached);
          break;
        }
        next.clear();
        for (std::uint32_t c : fresh) {
          for (std::uint32_t u : check_adj[c]) {
            if (var_mark[u] == epoch) continue;
            var_mark[u] = epoch;
            next.push_back(u);
          }
        }
        frontier.swap(next);
      }
      if (chosen == std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("construct_code: no admissible check for variable " +
                                    std::to_string(v) + " (distribution infeasible for n = " +
                                    std::to_string(n) + ")");
      }
      check_adj[chosen].push_back(v);
      var_adj[v].push_back(chosen);
      buckets.consume(chosen);
    }
  }
  for (auto& row : check_adj) std::sort(row.begin(), row.end());
  return LdpcCode::from_checks(n, check_adj, seed);
}

std::vector<Bit> syndrome(const LdpcCode& code, std::span<const Bit> bits) {
  if (bits.size() != code.n()) throw std::invalid_argument("syndrome: length mismatch");
  std::vector<Bit> s(code.num_checks());
  for (std::uint32_t c = 0; c < code.num_checks(); ++c) {
    Bit acc = 0;
    for (std::uint32_t v : code.check(c)) acc ^= bits[v] & 1u;
    s[c] = acc;
  }
  return s;
}

void write_code(std::ostream& out, const LdpcCode& code) {
  out << "ldpc " << code.n() << ' ' << code.num_checks() << ' ' << std::setprecision(17)
      << code.rate() << ' ' << code.seed() << '\n';
  for (std::uint32_t c = 0; c < code.num_checks(); ++c) {
    bool first = true;
    for (std::uint32_t v : code.check(c)) {
      out << (first ? "" : " ") << v;
      first = false;
    }
    out << '\n';
  }
}

LdpcCode read_code(std::istream& in) {
  std::string tag;
  std::uint32_t n = 0, m = 0;
  double rate = 0.0;
  std::uint64_t seed = 0;
  if (!(in >> tag >> n >> m >> rate >> seed) || tag != "ldpc") {
    throw std::runtime_error("read_code: bad header");
  }
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::uint32_t>> checks(m);
  for (std::uint32_t c = 0; c < m; ++c) {
    if (!std::getline(in, line)) throw std::runtime_error("read_code: truncated check list");
    std::istringstream ls(line);
    std::uint32_t v = 0;
    while (ls >> v) checks[c].push_back(v);
  }
  return LdpcCode::from_checks(n, checks, seed);
}

void save_code(const std::string& path, const LdpcCode& code) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write code file " + path);
  write_code(f, code);
}

LdpcCode load_code(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open code file " + path);
  return read_code(f);
}

}  // namespace cvqkd
