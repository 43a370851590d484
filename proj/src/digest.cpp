#include "cvqkd/digest.hpp"

#include <stdexcept>

#include "cvqkd/numeric.hpp"

namespace cvqkd {

Digest128 gf128_mul(const Digest128& a, const Digest128& b) {
  Digest128 acc{0, 0};
  Digest128 shifted = a;
  for (int i = 0; i < 128; ++i) {
    const std::uint64_t word = i < 64 ? b[0] : b[1];
    if ((word >> (i & 63)) & 1u) {
      acc[0] ^= shifted[0];
      acc[1] ^= shifted[1];
    }
    // shifted *= x, reducing x^128 = x^7 + x^2 + x + 1.
    const bool carry = (shifted[1] >> 63) & 1u;
    shifted[1] = (shifted[1] << 1) | (shifted[0] >> 63);
    shifted[0] <<= 1;
    if (carry) shifted[0] ^= 0x87;
  }
  return acc;
}

Digest128 polynomial_digest(std::span<const std::uint8_t> bits, std::uint64_t seed) {
  Digest128 key{splitmix64(seed ^ 0x5851f42d4c957f2dULL), splitmix64(seed + 0x14057b7ef767814fULL)};
  if (key[0] == 0 && key[1] == 0) key[0] = 1;
  Digest128 h{0, 0};
  Digest128 block{0, 0};
  std::size_t filled = 0;
  auto absorb = [&](const Digest128& b) {
    h[0] ^= b[0];
    h[1] ^= b[1];
    h = gf128_mul(h, key);
  };
  for (std::uint8_t bit : bits) {
    if (bit & 1u) block[filled >> 6] |= std::uint64_t{1} << (filled & 63);
    if (++filled == 128) {
      absorb(block);
      block = {0, 0};
      filled = 0;
    }
  }
  if (filled > 0) absorb(block);
  absorb({static_cast<std::uint64_t>(bits.size()), 0});
  return h;
}

bool verify_hash(std::span<const std::uint8_t> bits_a, std::span<const std::uint8_t> bits_b,
                 std::uint64_t seed) {
  if (bits_a.size() != bits_b.size()) throw std::invalid_argument("verify_hash: length mismatch");
  return polynomial_digest(bits_a, seed) == polynomial_digest(bits_b, seed);
}

}  // namespace cvqkd
