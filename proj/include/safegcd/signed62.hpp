// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "safegcd/bigint.hpp"

namespace safegcd {

inline constexpr int kLimbCount = 5;
inline constexpr unsigned kLimbBits = 62;
inline constexpr std::uint64_t kLimbMask = (std::uint64_t{1} << kLimbBits) - 1;

// Signed big integer in radix 2^62 with int64 limbs, least significant
// first. Canonical form at effective length len: limbs[0..len-2] in
// [0, 2^62), limbs[len-1] a plain signed word. The representable range at
// length len is [-2^(62*(len-1)+63), 2^(62*(len-1)+63)); lengths below
// kLimbCount leave the upper limbs at zero and ignored.
struct Signed62 {
  std::array<std::int64_t, kLimbCount> limbs{};

  friend bool operator==(const Signed62& a, const Signed62& b) {
    return a.limbs == b.limbs;
  }
};

// Field-by-field copy; the kernels never whole-struct-assign working state.
inline void assign(Signed62& dst, const Signed62& src) noexcept {
  for (int i = 0; i < kLimbCount; ++i) dst.limbs[i] = src.limbs[i];
}

// Canonical encoding of x at the given length. Throws std::out_of_range if
// x is not representable, std::invalid_argument for a bad length.
Signed62 encode(const Int& x, int len = kLimbCount);

// Value of a at the given length: sum of limbs[i] * 2^(62*i), each limb
// read as a signed word. Defined for non-canonical limbs too.
Int decode(const Signed62& a, int len = kLimbCount);

// sign(decode(a, alen) - factor * decode(b, kLimbCount)) as -1/0/1.
// b must be canonical with non-negative top limb; factor in [-2, 2].
int mul_cmp_62(const Signed62& a, int alen, const Signed62& b,
               std::int64_t factor);

// Precomputed modulus data for the inverse kernels. modulus is canonical;
// modulus_inv62 is the unique positive m^-1 mod 2^62.
struct ModInfo {
  Signed62 modulus;
  std::uint64_t modulus_inv62 = 0;
};

// Builds ModInfo for odd m with 3 <= m < 2^256; throws
// std::invalid_argument otherwise.
ModInfo make_modinfo(const Int& m);

// Big-endian hex, no prefix. Parsing is case-insensitive and rejects empty
// or non-hex input; formatting is lowercase with no leading zeros ("0" for
// zero). Formatting requires a non-negative value.
std::optional<Int> parse_hex(std::string_view text);
std::string format_hex(const Int& value);

// 16-digit zero-padded lowercase hex of a 64-bit word (two's complement
// bit pattern for signed limbs).
std::string format_hex_u64(std::uint64_t word);

}  // namespace safegcd
