// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <stdexcept>

#include "safegcd/verify.hpp"

namespace safegcd {

// Unsigned 128-bit value split into 64-bit halves: value = hi * 2^64 + lo.
struct U128Parts {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  friend constexpr bool operator==(U128Parts a, U128Parts b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

// Portable full 64x64->128 multiply from four 32x32 partial products.
// Everything is uint64 arithmetic wrapping mod 2^64; no wider type is
// involved. mid34 = floor(ll/2^32) + low32(lh) + low32(hl) needs at most
// 34 bits, so the carry folded into hi is exact.
constexpr U128Parts umul128(std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t ll =
      static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) *
      static_cast<std::uint32_t>(b);
  const std::uint64_t lh = static_cast<std::uint32_t>(a) * (b >> 32);
  const std::uint64_t hl = (a >> 32) * static_cast<std::uint32_t>(b);
  const std::uint64_t hh = (a >> 32) * (b >> 32);
  const std::uint64_t mid34 =
      (ll >> 32) + static_cast<std::uint32_t>(lh) + static_cast<std::uint32_t>(hl);
  U128Parts out;
  out.hi = hh + (lh >> 32) + (hl >> 32) + (mid34 >> 32);
  out.lo = (mid34 << 32) + static_cast<std::uint32_t>(ll);
  return out;
}

// Signed 128-bit accumulator, two's complement over (hi, lo). Products
// come from umul128 with sign-correction terms, so the portable multiply
// above stays the only multiplication primitive. With verification
// enabled, add/sub/convert assert that no signed overflow occurs.
class Signed128 {
 public:
  constexpr Signed128() = default;
  constexpr Signed128(std::uint64_t lo, std::uint64_t hi) : lo_(lo), hi_(hi) {}

  static constexpr Signed128 from_i64(std::int64_t x) noexcept {
    return {static_cast<std::uint64_t>(x),
            static_cast<std::uint64_t>(x >> 63)};
  }

  // Exact a*b; a 127-bit product always fits.
  static constexpr Signed128 mul(std::int64_t a, std::int64_t b) noexcept {
    const std::uint64_t ua = static_cast<std::uint64_t>(a);
    const std::uint64_t ub = static_cast<std::uint64_t>(b);
    U128Parts p = umul128(ua, ub);
    // Signed product = unsigned product - 2^64*(a<0 ? b : 0) - 2^64*(b<0 ? a : 0).
    std::uint64_t hi = p.hi;
    if (a < 0) hi -= ub;
    if (b < 0) hi -= ua;
    return {p.lo, hi};
  }

  void add(Signed128 o) {
    const std::uint64_t sign_a = hi_ >> 63;
    const std::uint64_t sign_b = o.hi_ >> 63;
    const std::uint64_t old_lo = lo_;
    lo_ += o.lo_;
    hi_ += o.hi_ + (lo_ < old_lo ? 1u : 0u);
    SAFEGCD_VERIFY_CHECK(sign_a != sign_b || (hi_ >> 63) == sign_a);
  }

  void sub(Signed128 o) {
    const std::uint64_t sign_a = hi_ >> 63;
    const std::uint64_t sign_b = o.hi_ >> 63;
    const std::uint64_t old_lo = lo_;
    lo_ -= o.lo_;
    hi_ = hi_ - o.hi_ - (lo_ > old_lo ? 1u : 0u);
    SAFEGCD_VERIFY_CHECK(sign_a == sign_b || (hi_ >> 63) == sign_a);
  }

  void accum_mul(std::int64_t a, std::int64_t b) { add(mul(a, b)); }
  void add_i64(std::int64_t x) { add(from_i64(x)); }

  // Arithmetic right shift by n, 0 < n < 64.
  void shift_right(unsigned n) {
    SAFEGCD_VERIFY_CHECK(n > 0 && n < 64);
    lo_ = (lo_ >> n) | (hi_ << (64 - n));
    hi_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi_) >> n);
  }

  constexpr std::uint64_t low_u64() const noexcept { return lo_; }
  constexpr std::int64_t high_i64() const noexcept {
    return static_cast<std::int64_t>(hi_);
  }

  constexpr bool fits_i64() const noexcept {
    return hi_ == (lo_ >> 63 ? ~std::uint64_t{0} : std::uint64_t{0});
  }

  std::int64_t to_i64() const {
    SAFEGCD_VERIFY_CHECK(fits_i64());
    return static_cast<std::int64_t>(lo_);
  }

  friend constexpr bool operator==(Signed128 a, Signed128 b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  std::uint64_t lo_ = 0;
  std::uint64_t hi_ = 0;
};

// floor((a*b) / 2^shift) for shift in {0, 62, 64}. The <=127-bit product
// is exact; the caller guarantees the shifted result fits in int64.
inline std::int64_t mul_shift_signed(std::int64_t a, std::int64_t b,
                                     unsigned shift) {
  Signed128 p = Signed128::mul(a, b);
  switch (shift) {
    case 0:
      return p.to_i64();
    case 62:
      p.shift_right(62);
      return p.to_i64();
    case 64:
      return p.high_i64();
    default:
      throw std::invalid_argument("mul_shift_signed: shift must be 0, 62 or 64");
  }
}

}  // namespace safegcd
