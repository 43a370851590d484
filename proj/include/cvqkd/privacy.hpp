#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cvqkd/ldpc_code.hpp"

namespace cvqkd {

/// Seeded binary Toeplitz hash: out = M x over GF(2) with M (out_len x n)
/// constant along diagonals, M[i][j] = r[i - j + n - 1], r drawn from the
/// seed. A 2-universal family over the choice of r.
std::vector<Bit> toeplitz_hash(std::span<const Bit> input, std::size_t out_len, std::uint64_t seed);

/// The diagonal bits r (length out_len + n - 1) used by toeplitz_hash.
std::vector<Bit> toeplitz_diagonals(std::size_t n, std::size_t out_len, std::uint64_t seed);

/// Direct O(out_len * n) evaluation, for cross-checking.
std::vector<Bit> toeplitz_hash_naive(std::span<const Bit> input, std::size_t out_len, std::uint64_t seed);

}  // namespace cvqkd
