#include "cvqkd/privacy.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <random>
#include <stdexcept>

namespace cvqkd {

namespace {

// FFTW planning is not thread-safe.
std::mutex& plan_mutex() {
  static std::mutex mu;
  return mu;
}

/// Linear convolution of two 0/1 sequences; entries are exact integers
/// while the sums stay far below 2^53.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t full = a.size() + b.size() - 1;
  std::size_t size = 1;
  while (size < full) size <<= 1;
  const std::size_t half = size / 2 + 1;
  double* ra = fftw_alloc_real(size);
  double* rb = fftw_alloc_real(size);
  fftw_complex* ca = fftw_alloc_complex(half);
  fftw_complex* cb = fftw_alloc_complex(half);
  fftw_plan pa, pb, pinv;
  {
    std::lock_guard lock(plan_mutex());
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(size), ra, ca, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(static_cast<int>(size), rb, cb, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_1d(static_cast<int>(size), ca, ra, FFTW_ESTIMATE);
  }
  std::fill(ra, ra + size, 0.0);
  std::fill(rb, rb + size, 0.0);
  std::copy(a.begin(), a.end(), ra);
  std::copy(b.begin(), b.end(), rb);
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t k = 0; k < half; ++k) {
    const std::complex<double> x(ca[k][0], ca[k][1]), y(cb[k][0], cb[k][1]);
    const auto z = x * y;
    ca[k][0] = z.real();
    ca[k][1] = z.imag();
  }
  fftw_execute(pinv);
  std::vector<double> out(ra, ra + full);
  for (double& v : out) v /= static_cast<double>(size);
  {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pinv);
  }
  fftw_free(ra);
  fftw_free(rb);
  fftw_free(ca);
  fftw_free(cb);
  return out;
}

}  // namespace

std::vector<Bit> toeplitz_diagonals(std::size_t n, std::size_t out_len, std::uint64_t seed) {
  std::vector<Bit> r(out_len + n - (n > 0 ? 1 : 0));
  std::mt19937_64 rng(seed);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i % 64 == 0) word = rng();
    r[i] = (word >> (i % 64)) & 1u;
  }
  return r;
}

std::vector<Bit> toeplitz_hash_naive(std::span<const Bit> input, std::size_t out_len, std::uint64_t seed) {
  const std::size_t n = input.size();
  if (n == 0 || out_len == 0) return std::vector<Bit>(out_len, 0);
  const auto r = toeplitz_diagonals(n, out_len, seed);
  std::vector<Bit> out(out_len, 0);
  for (std::size_t i = 0; i < out_len; ++i) {
    Bit acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc ^= r[i - j + n - 1] & input[j];
    out[i] = acc;
  }
  return out;
}

std::vector<Bit> toeplitz_hash(std::span<const Bit> input, std::size_t out_len, std::uint64_t seed) {
  const std::size_t n = input.size();
  if (out_len > n) throw std::invalid_argument("toeplitz_hash: output longer than input");
  if (n == 0 || out_len == 0) return std::vector<Bit>(out_len, 0);
  if (n * out_len <= (1u << 20)) return toeplitz_hash_naive(input, out_len, seed);
  if (n > (std::size_t{1} << 26)) throw std::invalid_argument("toeplitz_hash: input too long for exact FFT sums");
  const auto r = toeplitz_diagonals(n, out_len, seed);
  // out_i = sum_j r[i + n - 1 - j] x_j = (r * x)[i + n - 1].
  std::vector<double> rd(r.begin(), r.end()), xd(input.begin(), input.end());
  const auto conv = convolve(rd, xd);
  std::vector<Bit> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const auto v = static_cast<std::int64_t>(std::llround(conv[i + n - 1]));
    out[i] = static_cast<Bit>(v & 1);
  }
  return out;
}

}  // namespace cvqkd
