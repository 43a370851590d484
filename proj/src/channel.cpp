#include "cvqkd/channel.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cvqkd/numeric.hpp"

namespace cvqkd {

SnrResult snr(const ProtocolConfig& cfg) {
  const double gamma = (0.5 * cfg.V_A * cfg.T) / (1.0 + 0.5 * (cfg.xi_ch + cfg.xi_d));
  const double noise = gamma > 0.0 ? 1.0 / gamma : std::numeric_limits<double>::infinity();
  return {gamma, noise};
}

double mutual_information(double gamma) {
  if (gamma < 0.0) throw std::domain_error("mutual_information: gamma must be >= 0");
  return 0.5 * std::log2(1.0 + gamma);
}

namespace {

template <typename Fill>
Quadratures generate_chunked(std::size_t count, std::uint64_t seed, Fill fill) {
  if (count == 0) throw std::invalid_argument("quadrature count must be >= 1");
  Quadratures q;
  q.x.resize(count);
  q.y.resize(count);
  const std::size_t chunks = (count + kQuadratureChunk - 1) / kQuadratureChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::mt19937_64 rng(derive_seed(seed, c));
    const std::size_t begin = c * kQuadratureChunk;
    const std::size_t end = std::min(count, begin + kQuadratureChunk);
    for (std::size_t i = begin; i < end; ++i) fill(rng, q.x[i], q.y[i]);
  }
  return q;
}

}  // namespace

Quadratures generate_quadratures(const ProtocolConfig& cfg, std::size_t count,
                                 std::uint64_t seed) {
  const double sx = std::sqrt(cfg.V_A);
  const double gamma = snr(cfg).gamma;
  if (!(gamma > 0.0)) throw std::invalid_argument("generate_quadratures: gamma must be > 0");
  const double sn = std::sqrt(1.0 / gamma);
  return generate_chunked(count, seed, [&](std::mt19937_64& rng, double& x, double& y) {
    std::normal_distribution<double> nd(0.0, 1.0);
    x = sx * nd(rng);
    y = x + sn * nd(rng);
  });
}

Quadratures generate_physical_quadratures(const ProtocolConfig& cfg, std::size_t count,
                                          std::uint64_t seed) {
  const double sx = std::sqrt(cfg.V_A);
  const double t = std::sqrt(cfg.eta_d * cfg.T);
  const double sz = std::sqrt(cfg.eta_d * cfg.T * cfg.xi_ch + 1.0 + cfg.xi_d);
  return generate_chunked(count, seed, [&](std::mt19937_64& rng, double& x, double& y) {
    std::normal_distribution<double> nd(0.0, 1.0);
    x = sx * nd(rng);
    y = t * x + sz * nd(rng);
  });
}

std::vector<std::size_t> post_select(const std::vector<double>& y, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("post_select: threshold must be >= 0");
  std::vector<std::size_t> kept;
  kept.reserve(threshold == 0.0 ? y.size() : y.size() / 2);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::fabs(y[i]) >= threshold) kept.push_back(i);
  }
  return kept;
}

}  // namespace cvqkd
