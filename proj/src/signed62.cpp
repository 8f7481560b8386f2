// SPDX-License-Identifier: MIT
#include "safegcd/signed62.hpp"

#include <algorithm>
#include <stdexcept>

#include "safegcd/verify.hpp"
#include "safegcd/wide64.hpp"

namespace safegcd {

namespace {

const Int kTwo62 = Int(1) << 62;

void check_len(int len) {
  if (len < 1 || len > kLimbCount) {
    throw std::invalid_argument("signed62: length must be in [1, 5]");
  }
}

}  // namespace

Signed62 encode(const Int& x, int len) {
  check_len(len);
  const Int bound = Int(1) << (62 * (len - 1) + 63);
  if (x < -bound || x >= bound) {
    throw std::out_of_range("encode: value not representable at this length");
  }
  Signed62 out;
  Int rest = x;
  for (int i = 0; i < len - 1; ++i) {
    Int limb = rest % kTwo62;
    if (limb < 0) limb += kTwo62;
    out.limbs[i] = static_cast<std::int64_t>(limb.convert_to<std::uint64_t>());
    rest = (rest - limb) / kTwo62;  // exact
  }
  out.limbs[len - 1] = rest.convert_to<std::int64_t>();
  return out;
}

Int decode(const Signed62& a, int len) {
  check_len(len);
  Int acc = a.limbs[len - 1];
  for (int i = len - 2; i >= 0; --i) {
    acc *= kTwo62;
    acc += a.limbs[i];
  }
  return acc;
}

int mul_cmp_62(const Signed62& a, int alen, const Signed62& b,
               std::int64_t factor) {
  SAFEGCD_VERIFY_CHECK(alen >= 1 && alen <= kLimbCount);
  SAFEGCD_VERIFY_CHECK(factor >= -2 && factor <= 2);
  // Accumulate a - factor*b limb by limb, 62 bits at a time. The carried
  // top never exceeds a couple of words, so the final sign lives in the
  // accumulator; any nonzero retired limb with a zero top means positive.
  Signed128 acc;
  std::uint64_t low[kLimbCount];
  for (int i = 0; i < kLimbCount; ++i) {
    acc.add_i64(i < alen ? a.limbs[i] : 0);
    acc.accum_mul(-factor, b.limbs[i]);
    low[i] = acc.low_u64() & kLimbMask;
    acc.shift_right(62);
  }
  const std::int64_t top = acc.to_i64();
  if (top != 0) return top < 0 ? -1 : 1;
  for (int i = kLimbCount - 1; i >= 0; --i) {
    if (low[i] != 0) return 1;
  }
  return 0;
}

ModInfo make_modinfo(const Int& m) {
  if (m < 3 || !is_odd(m)) {
    throw std::invalid_argument("make_modinfo: modulus must be odd and >= 3");
  }
  if (m >= Int(1) << 256) {
    throw std::invalid_argument("make_modinfo: modulus must be below 2^256");
  }
  ModInfo info;
  info.modulus = encode(m, kLimbCount);
  // Hensel lifting: for odd m, x = m inverts m mod 8 already, and each
  // x *= 2 - m*x round doubles the number of correct low bits.
  const std::uint64_t m64 =
      Int(m & 0xFFFFFFFFFFFFFFFFULL).convert_to<std::uint64_t>();
  std::uint64_t inv = m64;
  for (int round = 0; round < 5; ++round) inv *= 2 - m64 * inv;
  info.modulus_inv62 = inv & kLimbMask;
  return info;
}

std::optional<Int> parse_hex(std::string_view text) {
  if (text.empty()) return std::nullopt;
  Int value = 0;
  for (char c : text) {
    int digit;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      digit = c - 'A' + 10;
    } else {
      return std::nullopt;
    }
    value <<= 4;
    value += digit;
  }
  return value;
}

std::string format_hex(const Int& value) {
  if (value < 0) throw std::invalid_argument("format_hex: negative value");
  if (value == 0) return "0";
  static const char* digits = "0123456789abcdef";
  std::string out;
  Int rest = value;
  while (rest != 0) {
    out.push_back(digits[(rest & 0xF).convert_to<unsigned>()]);
    rest >>= 4;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string format_hex_u64(std::uint64_t word) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[word & 0xF];
    word >>= 4;
  }
  return out;
}

}  // namespace safegcd
