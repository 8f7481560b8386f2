// SPDX-License-Identifier: MIT
#include "safegcd/divsteps62.hpp"

#include <array>
#include <bit>

#include "safegcd/verify.hpp"
#include "safegcd/wide64.hpp"

namespace safegcd {

namespace {

constexpr std::uint64_t kDebruijn = 0x022FDD63CC95386DULL;

// Build the lookup table from the constant itself. Each slot must be hit
// exactly once; a duplicate slot makes the constexpr evaluation throw,
// which fails the build, so a bad multiplier cannot ship.
constexpr std::array<std::uint8_t, 64> make_ctz_table() {
  std::array<std::uint8_t, 64> table{};
  std::array<bool, 64> seen{};
  for (int i = 0; i < 64; ++i) {
    const unsigned slot = static_cast<unsigned>((kDebruijn << i) >> 58);
    if (seen[slot]) throw "not a de Bruijn sequence";
    seen[slot] = true;
    table[slot] = static_cast<std::uint8_t>(i);
  }
  return table;
}

constexpr std::array<std::uint8_t, 64> kCtzTable = make_ctz_table();

const std::uint8_t* g_ctz_override = nullptr;

std::uint64_t uabs64(std::int64_t x) {
  return x < 0 ? 0 - static_cast<std::uint64_t>(x) : static_cast<std::uint64_t>(x);
}

}  // namespace

namespace detail {
void set_ctz_table_override(const std::uint8_t* table64) noexcept {
  g_ctz_override = table64;
}
}  // namespace detail

int ctz64(std::uint64_t x) {
  SAFEGCD_VERIFY_CHECK(x != 0);
  const std::uint8_t* table = g_ctz_override ? g_ctz_override : kCtzTable.data();
  return table[((x & (0 - x)) * kDebruijn) >> 58];
}

std::uint64_t inv_neg_mod64(std::uint64_t f) {
  SAFEGCD_VERIFY_CHECK((f & 1) == 1);
  return f * (f * f - 2);
}

std::uint64_t inv_mod16(std::uint64_t f) {
  SAFEGCD_VERIFY_CHECK((f & 1) == 1);
  return f + (((f + 1) & 4) << 1);
}

bool trans_bounds_ok(const Trans2x2& t) {
  const std::uint64_t two62 = std::uint64_t{1} << 62;
  // Check the absolute values individually first so the sums below cannot
  // wrap even for arbitrary (fault-injected) matrices.
  if (uabs64(t.u) > two62 || uabs64(t.v) > two62) return false;
  if (uabs64(t.q) > two62 || uabs64(t.r) > two62) return false;
  if (uabs64(t.u) + uabs64(t.v) > two62) return false;
  if (uabs64(t.q) + uabs64(t.r) > two62) return false;
  // |u|+|v| <= 2^62 makes the signed sums representable.
  if (t.u + t.v <= -static_cast<std::int64_t>(two62)) return false;
  if (t.q + t.r <= -static_cast<std::int64_t>(two62)) return false;
  return true;
}

bool det_check_pow2(const Trans2x2& t, unsigned n) {
  if (n > 126) return false;
  Signed128 det = Signed128::mul(t.u, t.r);
  det.sub(Signed128::mul(t.v, t.q));
  const std::uint64_t lo = n < 64 ? std::uint64_t{1} << n : 0;
  const std::uint64_t hi = n >= 64 ? std::uint64_t{1} << (n - 64) : 0;
  return det == Signed128(lo, hi);
}

std::int64_t divsteps_62_var(std::int64_t eta, std::uint64_t f0,
                             std::uint64_t g0, Trans2x2& t,
                             BatchTrace* trace) {
  // Working registers wrap mod 2^64 by design; only the low 62-i bits of
  // f and g stay meaningful as i counts down.
  std::uint64_t u = 1, v = 0, q = 0, r = 1;
  std::uint64_t f = f0, g = g0, mask, w;
  int i = 62, limit, zeros;
  int pending = 0;  // halvings deferred by the last cancellation

  for (;;) {
    BatchTraceRecord* rec = nullptr;
    if (trace) {
      trace->records.push_back(BatchTraceRecord{
          i, pending, eta, f, g, u, v, q, r, 0, 0, 0, 0});
      rec = &trace->records.back();
    }
    // Sentinel bits above position i stop the count at the number of
    // steps remaining in the batch.
    zeros = ctz64(g | (~std::uint64_t{0} << i));
    g >>= zeros;
    u <<= zeros;
    v <<= zeros;
    eta -= zeros;
    i -= zeros;
    pending = 0;
    if (rec) rec->zeros = zeros;
    if (i == 0) break;

    SAFEGCD_VERIFY_CHECK((f & 1) == 1);
    SAFEGCD_VERIFY_CHECK((g & 1) == 1);
    SAFEGCD_VERIFY_CHECK(u * f0 + v * g0 == f << (62 - i));
    SAFEGCD_VERIFY_CHECK(q * f0 + r * g0 == g << (62 - i));
    SAFEGCD_VERIFY_CHECK(eta >= -745 && eta <= 745);

    if (eta < 0) {
      std::uint64_t tmp;
      eta = -eta;
      tmp = f;
      f = g;
      g = 0 - tmp;
      tmp = u;
      u = q;
      q = 0 - tmp;
      tmp = v;
      v = r;
      r = 0 - tmp;
      limit = static_cast<int>(eta) + 1 > i ? i : static_cast<int>(eta) + 1;
      SAFEGCD_VERIFY_CHECK(limit > 0 && limit <= 62);
      // Cancel the low min(limit, 6) bits of g: w = -g/f there, via
      // f*(f*f-2) = -1/f mod 64.
      mask = (~std::uint64_t{0} >> (64 - limit)) & 63U;
      w = (f * g * (f * f - 2)) & mask;
    } else {
      limit = static_cast<int>(eta) + 1 > i ? i : static_cast<int>(eta) + 1;
      SAFEGCD_VERIFY_CHECK(limit > 0 && limit <= 62);
      // Cancel the low min(limit, 4) bits: w = -g/f there, via an inverse
      // of f mod 16.
      mask = (~std::uint64_t{0} >> (64 - limit)) & 15U;
      w = f + (((f + 1) & 4) << 1);
      w = (0 - (w * g)) & mask;
    }
    g += f * w;
    q += u * w;
    r += v * w;
    SAFEGCD_VERIFY_CHECK((g & mask) == 0);
    pending = std::popcount(mask);
    if (rec) {
      rec->limit = limit;
      rec->mask = mask;
      rec->w = w;
    }
  }

  t.u = static_cast<std::int64_t>(u);
  t.v = static_cast<std::int64_t>(v);
  t.q = static_cast<std::int64_t>(q);
  t.r = static_cast<std::int64_t>(r);
  SAFEGCD_VERIFY_CHECK(det_check_pow2(t, 62));
  SAFEGCD_VERIFY_CHECK(trans_bounds_ok(t));
  return eta;
}

}  // namespace safegcd
