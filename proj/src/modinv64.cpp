// SPDX-License-Identifier: MIT
#include "safegcd/modinv64.hpp"

#include <cstdlib>

#include "safegcd/verify.hpp"
#include "safegcd/wide64.hpp"

namespace safegcd {

namespace {

const Signed62 kOne{{1, 0, 0, 0, 0}};

std::int64_t abs_i64(std::int64_t x) { return x < 0 ? -x : x; }

}  // namespace

void update_fg_62_var(int len, Signed62& f, Signed62& g, const Trans2x2& t) {
  SAFEGCD_VERIFY_CHECK(len >= 1 && len <= kLimbCount);
  const std::int64_t u = t.u, v = t.v, q = t.q, r = t.r;

  Signed128 cf = Signed128::mul(u, f.limbs[0]);
  cf.accum_mul(v, g.limbs[0]);
  Signed128 cg = Signed128::mul(q, f.limbs[0]);
  cg.accum_mul(r, g.limbs[0]);
  // t cancels the low 62 bits of both rows by construction.
  SAFEGCD_VERIFY_CHECK((cf.low_u64() & kLimbMask) == 0);
  SAFEGCD_VERIFY_CHECK((cg.low_u64() & kLimbMask) == 0);
  cf.shift_right(62);
  cg.shift_right(62);

  for (int i = 1; i < len; ++i) {
    cf.accum_mul(u, f.limbs[i]);
    cf.accum_mul(v, g.limbs[i]);
    cg.accum_mul(q, f.limbs[i]);
    cg.accum_mul(r, g.limbs[i]);
    f.limbs[i - 1] = static_cast<std::int64_t>(cf.low_u64() & kLimbMask);
    g.limbs[i - 1] = static_cast<std::int64_t>(cg.low_u64() & kLimbMask);
    cf.shift_right(62);
    cg.shift_right(62);
  }
  f.limbs[len - 1] = cf.to_i64();
  g.limbs[len - 1] = cg.to_i64();
}

void update_de_62(Signed62& d, Signed62& e, const Trans2x2& t,
                  const ModInfo& mi) {
  const std::int64_t u = t.u, v = t.v, q = t.q, r = t.r;
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(d, kLimbCount, mi.modulus, -2) > 0);
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(d, kLimbCount, mi.modulus, 1) < 0);
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(e, kLimbCount, mi.modulus, -2) > 0);
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(e, kLimbCount, mi.modulus, 1) < 0);

  // Bias the modulus multiples by the input signs first; together with
  // the low-bit cancellation below this keeps the outputs in (-2m, m).
  const std::int64_t sd = d.limbs[kLimbCount - 1] >> 63;
  const std::int64_t se = e.limbs[kLimbCount - 1] >> 63;
  std::int64_t md = (u & sd) + (v & se);
  std::int64_t me = (q & sd) + (r & se);

  Signed128 cd = Signed128::mul(u, d.limbs[0]);
  cd.accum_mul(v, e.limbs[0]);
  Signed128 ce = Signed128::mul(q, d.limbs[0]);
  ce.accum_mul(r, e.limbs[0]);

  // Choose the multiple of m that clears the low 62 bits of each row.
  md -= static_cast<std::int64_t>(
      (mi.modulus_inv62 * cd.low_u64() + static_cast<std::uint64_t>(md)) &
      kLimbMask);
  me -= static_cast<std::int64_t>(
      (mi.modulus_inv62 * ce.low_u64() + static_cast<std::uint64_t>(me)) &
      kLimbMask);

  cd.accum_mul(mi.modulus.limbs[0], md);
  ce.accum_mul(mi.modulus.limbs[0], me);
  SAFEGCD_VERIFY_CHECK((cd.low_u64() & kLimbMask) == 0);
  SAFEGCD_VERIFY_CHECK((ce.low_u64() & kLimbMask) == 0);
  cd.shift_right(62);
  ce.shift_right(62);

  for (int i = 1; i < kLimbCount; ++i) {
    cd.accum_mul(u, d.limbs[i]);
    cd.accum_mul(v, e.limbs[i]);
    ce.accum_mul(q, d.limbs[i]);
    ce.accum_mul(r, e.limbs[i]);
    if (mi.modulus.limbs[i] != 0) {
      cd.accum_mul(mi.modulus.limbs[i], md);
      ce.accum_mul(mi.modulus.limbs[i], me);
    }
    d.limbs[i - 1] = static_cast<std::int64_t>(cd.low_u64() & kLimbMask);
    e.limbs[i - 1] = static_cast<std::int64_t>(ce.low_u64() & kLimbMask);
    cd.shift_right(62);
    ce.shift_right(62);
  }
  d.limbs[kLimbCount - 1] = cd.to_i64();
  e.limbs[kLimbCount - 1] = ce.to_i64();

  SAFEGCD_VERIFY_CHECK(mul_cmp_62(d, kLimbCount, mi.modulus, -2) > 0);
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(d, kLimbCount, mi.modulus, 1) < 0);
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(e, kLimbCount, mi.modulus, -2) > 0);
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(e, kLimbCount, mi.modulus, 1) < 0);
}

int shrink_len(Signed62& f, Signed62& g, int len) {
  SAFEGCD_VERIFY_CHECK(len >= 1 && len <= kLimbCount);
  const std::int64_t fn = f.limbs[len - 1];
  const std::int64_t gn = g.limbs[len - 1];
  // cond is zero iff len > 1 and both top limbs are 0 or -1, i.e. pure
  // sign extension of bit 61 of the limb below once folded in.
  std::int64_t cond = (static_cast<std::int64_t>(len) - 2) >> 63;
  cond |= fn ^ (fn >> 63);
  cond |= gn ^ (gn >> 63);
  if (cond == 0) {
    f.limbs[len - 2] |= static_cast<std::int64_t>(static_cast<std::uint64_t>(fn) << 62);
    g.limbs[len - 2] |= static_cast<std::int64_t>(static_cast<std::uint64_t>(gn) << 62);
    --len;
  }
  return len;
}

void normalize_62(Signed62& d, std::int64_t f_top, const ModInfo& mi) {
  const std::int64_t mask = static_cast<std::int64_t>(kLimbMask);
  std::int64_t r0 = d.limbs[0], r1 = d.limbs[1], r2 = d.limbs[2],
               r3 = d.limbs[3], r4 = d.limbs[4];
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(d, kLimbCount, mi.modulus, -2) > 0);
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(d, kLimbCount, mi.modulus, 1) < 0);

  // Add m if negative, bringing (-2m, m) to (-m, m) before negating.
  std::int64_t cond_add = r4 >> 63;
  r0 += mi.modulus.limbs[0] & cond_add;
  r1 += mi.modulus.limbs[1] & cond_add;
  r2 += mi.modulus.limbs[2] & cond_add;
  r3 += mi.modulus.limbs[3] & cond_add;
  r4 += mi.modulus.limbs[4] & cond_add;
  // Negate when the final f is negative: the inverse carries f's sign.
  const std::int64_t cond_negate = f_top >> 63;
  r0 = (r0 ^ cond_negate) - cond_negate;
  r1 = (r1 ^ cond_negate) - cond_negate;
  r2 = (r2 ^ cond_negate) - cond_negate;
  r3 = (r3 ^ cond_negate) - cond_negate;
  r4 = (r4 ^ cond_negate) - cond_negate;
  r1 += r0 >> 62;
  r0 &= mask;
  r2 += r1 >> 62;
  r1 &= mask;
  r3 += r2 >> 62;
  r2 &= mask;
  r4 += r3 >> 62;
  r3 &= mask;

  // One more conditional add lands in [0, m).
  cond_add = r4 >> 63;
  r0 += mi.modulus.limbs[0] & cond_add;
  r1 += mi.modulus.limbs[1] & cond_add;
  r2 += mi.modulus.limbs[2] & cond_add;
  r3 += mi.modulus.limbs[3] & cond_add;
  r4 += mi.modulus.limbs[4] & cond_add;
  r1 += r0 >> 62;
  r0 &= mask;
  r2 += r1 >> 62;
  r1 &= mask;
  r3 += r2 >> 62;
  r2 &= mask;
  r4 += r3 >> 62;
  r3 &= mask;

  d.limbs[0] = r0;
  d.limbs[1] = r1;
  d.limbs[2] = r2;
  d.limbs[3] = r3;
  d.limbs[4] = r4;

  SAFEGCD_VERIFY_CHECK(r0 >> 62 == 0 && r1 >> 62 == 0 && r2 >> 62 == 0 &&
                       r3 >> 62 == 0 && r4 >> 62 == 0);
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(d, kLimbCount, mi.modulus, 0) >= 0);
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(d, kLimbCount, mi.modulus, 1) < 0);
}

Signed62 modinv64_var(const Signed62& x, const ModInfo& mi,
                      ModinvStats* stats, ModinvTrace* trace) {
  Signed62 d{};
  Signed62 e{};
  e.limbs[0] = 1;
  Signed62 f;
  assign(f, mi.modulus);
  Signed62 g;
  assign(g, x);

  int len = kLimbCount;
  std::int64_t eta = -1;  // eta = -delta with delta starting at 1
  int outer = 0;
  std::int64_t max_abs_eta = abs_i64(eta);

  for (;;) {
    Trans2x2 t;
    const std::int64_t eta_in = eta;
    const int len_in = len;
    ModinvIterationRecord* rec = nullptr;
    if (trace) {
      trace->iterations.emplace_back();
      rec = &trace->iterations.back();
      rec->iteration = outer;
      rec->eta_in = eta_in;
      rec->len_in = len_in;
    }

    eta = divsteps_62_var(eta, static_cast<std::uint64_t>(f.limbs[0]),
                          static_cast<std::uint64_t>(g.limbs[0]), t,
                          (rec && trace->capture_batch) ? &rec->batch : nullptr);
    if (abs_i64(eta) > max_abs_eta) max_abs_eta = abs_i64(eta);

    update_de_62(d, e, t, mi);

    // f and g remain bounded by the modulus throughout.
    SAFEGCD_VERIFY_CHECK(mul_cmp_62(f, len, mi.modulus, -1) > 0);
    SAFEGCD_VERIFY_CHECK(mul_cmp_62(f, len, mi.modulus, 1) <= 0);
    SAFEGCD_VERIFY_CHECK(mul_cmp_62(g, len, mi.modulus, -1) > 0);
    SAFEGCD_VERIFY_CHECK(mul_cmp_62(g, len, mi.modulus, 1) < 0);

    update_fg_62_var(len, f, g, t);

    if (rec) {
      rec->eta_out = eta;
      rec->t = t;
      assign(rec->f_after, f);
      assign(rec->g_after, g);
      assign(rec->d_after, d);
      assign(rec->e_after, e);
    }
    ++outer;

    if (g.limbs[0] == 0) {
      std::int64_t cond = 0;
      for (int j = 1; j < len; ++j) cond |= g.limbs[j];
      if (cond == 0) {
        if (rec) {
          rec->g_zero = true;
          rec->len_out = len;
        }
        break;
      }
    }

    len = shrink_len(f, g, len);
    if (rec) rec->len_out = len;
    SAFEGCD_VERIFY_CHECK(outer < 12);
    SAFEGCD_VERIFY_CHECK(mul_cmp_62(f, len, mi.modulus, -1) > 0);
    SAFEGCD_VERIFY_CHECK(mul_cmp_62(f, len, mi.modulus, 1) <= 0);
    SAFEGCD_VERIFY_CHECK(mul_cmp_62(g, len, mi.modulus, -1) > 0);
    SAFEGCD_VERIFY_CHECK(mul_cmp_62(g, len, mi.modulus, 1) < 0);
  }

  // g = 0 now, and f = +-gcd(x, m): +-1 for invertible x, or +-m when
  // x = 0 (d = 0 then, so the result is still correct).
  SAFEGCD_VERIFY_CHECK(mul_cmp_62(g, len, kOne, 0) == 0);
  SAFEGCD_VERIFY_CHECK(
      mul_cmp_62(f, len, kOne, -1) == 0 || mul_cmp_62(f, len, kOne, 1) == 0 ||
      (mul_cmp_62(x, kLimbCount, kOne, 0) == 0 &&
       mul_cmp_62(d, kLimbCount, kOne, 0) == 0 &&
       (mul_cmp_62(f, len, mi.modulus, 1) == 0 ||
        mul_cmp_62(f, len, mi.modulus, -1) == 0)));

  normalize_62(d, f.limbs[len - 1], mi);

  if (stats) {
    stats->outer_iterations = outer;
    stats->max_abs_eta = max_abs_eta;
  }
  Signed62 out;
  assign(out, d);
  return out;
}

}  // namespace safegcd
