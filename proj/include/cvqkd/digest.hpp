#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace cvqkd {

using Digest128 = std::array<std::uint64_t, 2>;

/// Seeded polynomial hash over GF(2^128): bits are packed into 128-bit
/// blocks b_1..b_L plus a final length block, and the digest is
/// sum_i b_i k^(L+2-i) for a key k derived from the seed. Two different
/// strings of at most L blocks collide with probability <= (L + 1) / 2^128
/// over the choice of key, i.e. <= 2^-120 for strings of up to 255 blocks.
Digest128 polynomial_digest(std::span<const std::uint8_t> bits, std::uint64_t seed);

/// Compares the digests of two bit strings; lengths must match.
bool verify_hash(std::span<const std::uint8_t> bits_a, std::span<const std::uint8_t> bits_b,
                 std::uint64_t seed);

/// Multiplication in GF(2^128) modulo x^128 + x^7 + x^2 + x + 1.
/// Element layout: {low 64 coefficients, high 64 coefficients}.
Digest128 gf128_mul(const Digest128& a, const Digest128& b);

}  // namespace cvqkd
