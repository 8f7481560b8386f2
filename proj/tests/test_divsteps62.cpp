// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <array>
#include <cstdint>
#include <random>

#include "safegcd/divsteps62.hpp"
#include "safegcd/refmath.hpp"
#include "safegcd/verify.hpp"

namespace {

using safegcd::BatchTrace;
using safegcd::ctz64;
using safegcd::divsteps_62_var;
using safegcd::Int;
using safegcd::Trans2x2;
using safegcd::VerifyError;
using safegcd::VerifyGuard;
namespace refmath = safegcd::refmath;

int ctz_naive(std::uint64_t x) {
  int n = 0;
  while (!(x & 1)) {
    x >>= 1;
    ++n;
  }
  return n;
}

// Reference batch via 62 exact divsteps; the aggregate matrix entries fit
// int64 and depend only on the low 62 bits of f0/g0 and on eta.
struct RefBatch {
  std::int64_t eta_out;
  Trans2x2 t;
};

RefBatch ref_batch(std::int64_t eta, std::uint64_t f0, std::uint64_t g0) {
  const auto [state, t] = refmath::step_n({Int(-eta), Int(f0), Int(g0)}, 62);
  RefBatch out;
  out.eta_out = state.eta().convert_to<std::int64_t>();
  out.t.u = t.u.convert_to<std::int64_t>();
  out.t.v = t.v.convert_to<std::int64_t>();
  out.t.q = t.q.convert_to<std::int64_t>();
  out.t.r = t.r.convert_to<std::int64_t>();
  return out;
}

void check_against_ref(std::int64_t eta, std::uint64_t f0, std::uint64_t g0) {
  Trans2x2 t;
  const std::int64_t eta_out = divsteps_62_var(eta, f0, g0, t);
  const RefBatch ref = ref_batch(eta, f0, g0);
  CHECK(eta_out == ref.eta_out);
  CHECK(t == ref.t);
}

}  // namespace

TEST_CASE("ctz64 handles every bit position") {
  for (int i = 0; i < 64; ++i) {
    CHECK(ctz64(std::uint64_t{1} << i) == i);
    // All higher bits set above the lowest one.
    CHECK(ctz64(~std::uint64_t{0} << i) == i);
  }
}

TEST_CASE("ctz64 matches a naive scan on random words") {
  std::mt19937_64 rng(0xD1);
  for (int n = 0; n < 1000000; ++n) {
    std::uint64_t x = rng();
    if (x == 0) continue;
    CHECK(ctz64(x) == ctz_naive(x));
  }
}

TEST_CASE("ctz64 rejects zero under verification") {
  CHECK_THROWS_AS(ctz64(0), VerifyError);
}

TEST_CASE("ctz64 override hook swaps and restores the table") {
  std::array<std::uint8_t, 64> zeros{};
  safegcd::detail::set_ctz_table_override(zeros.data());
  CHECK(ctz64(8) == 0);
  safegcd::detail::set_ctz_table_override(nullptr);
  CHECK(ctz64(8) == 3);
}

TEST_CASE("inv_neg_mod64 gives -1/f mod 64 for all odd f") {
  for (std::uint64_t f = 1; f < 64; f += 2) {
    CHECK(((safegcd::inv_neg_mod64(f) * f) & 63) == 63);
  }
  // High bits of f do not disturb the low 6 result bits.
  CHECK(((safegcd::inv_neg_mod64(0xFFFFFFFFFFFFFFC5ULL) *
          0xFFFFFFFFFFFFFFC5ULL) &
         63) == 63);
  CHECK_THROWS_AS(safegcd::inv_neg_mod64(2), VerifyError);
}

TEST_CASE("inv_mod16 gives 1/f mod 16 for all odd f") {
  for (std::uint64_t f = 1; f < 16; f += 2) {
    CHECK(((safegcd::inv_mod16(f) * f) & 15) == 1);
  }
  CHECK(((safegcd::inv_mod16(0xFFFFFFFFFFFFFFC5ULL) * 0xFFFFFFFFFFFFFFC5ULL) &
         15) == 1);
  CHECK_THROWS_AS(safegcd::inv_mod16(4), VerifyError);
}

TEST_CASE("divsteps_62_var pinned batch: g = 0 is pure doubling") {
  Trans2x2 t;
  const std::int64_t eta_out = divsteps_62_var(-1, 1, 0, t);
  CHECK(eta_out == -63);
  CHECK(t == Trans2x2{std::int64_t{1} << 62, 0, 0, 1});
}

TEST_CASE("divsteps_62_var pinned batch: f = g = 1") {
  Trans2x2 t;
  const std::int64_t eta_out = divsteps_62_var(-1, 1, 1, t);
  const RefBatch ref = ref_batch(-1, 1, 1);
  CHECK(eta_out == ref.eta_out);
  CHECK(t == ref.t);
  CHECK(t == Trans2x2{0, std::int64_t{1} << 62, -1, 1});
}

TEST_CASE("divsteps_62_var matches the exact model on random batches") {
  std::mt19937_64 rng(0xD2);
  std::uniform_int_distribution<std::int64_t> eta_dist(-683, 683);
  for (int n = 0; n < 2000; ++n) {
    check_against_ref(eta_dist(rng), rng() | 1, rng());
  }
}

TEST_CASE("divsteps_62_var edge batches") {
  const std::uint64_t all = ~std::uint64_t{0};
  for (std::int64_t eta : {std::int64_t{-683}, std::int64_t{-1}, std::int64_t{0},
                           std::int64_t{1}, std::int64_t{683}}) {
    check_against_ref(eta, 1, all);
    check_against_ref(eta, all, all);
    check_against_ref(eta, all, 1);
    check_against_ref(eta, all, 0);
    check_against_ref(eta, 1, 1);
  }
}

TEST_CASE("divsteps_62_var only reads the low 62 bits of f0 and g0") {
  std::mt19937_64 rng(0xD3);
  const std::uint64_t mask62 = (std::uint64_t{1} << 62) - 1;
  for (int n = 0; n < 200; ++n) {
    const std::uint64_t f0 = rng() | 1;
    const std::uint64_t g0 = rng();
    Trans2x2 ta, tb;
    const std::int64_t ea = divsteps_62_var(-1, f0, g0, ta);
    const std::int64_t eb = divsteps_62_var(-1, f0 & mask62, g0 & mask62, tb);
    CHECK(ea == eb);
    CHECK(ta == tb);
  }
}

TEST_CASE("batch matrices satisfy determinant and bound checks") {
  std::mt19937_64 rng(0xD4);
  std::uniform_int_distribution<std::int64_t> eta_dist(-683, 683);
  for (int n = 0; n < 2000; ++n) {
    Trans2x2 t;
    divsteps_62_var(eta_dist(rng), rng() | 1, rng(), t);
    CHECK(safegcd::det_check_pow2(t, 62));
    CHECK(safegcd::trans_bounds_ok(t));
  }
}

TEST_CASE("det_check_pow2 pinned values") {
  CHECK(safegcd::det_check_pow2(Trans2x2{1, 0, 0, 1}, 0));
  CHECK(safegcd::det_check_pow2(Trans2x2{std::int64_t{1} << 62, 0, 0, 1}, 62));
  CHECK(!safegcd::det_check_pow2(Trans2x2{std::int64_t{1} << 62, 0, 0, 1}, 61));
  CHECK(safegcd::det_check_pow2(Trans2x2{0, 2, -1, 1}, 1));
  // Sign matters: det = -2^n is not accepted.
  CHECK(!safegcd::det_check_pow2(Trans2x2{0, 2, 1, 1}, 1));
  CHECK(!safegcd::det_check_pow2(Trans2x2{3, 0, 0, 1}, 1));
  // det = 2^124 from two 2^62 diagonals.
  CHECK(safegcd::det_check_pow2(
      Trans2x2{std::int64_t{1} << 62, 0, 0, std::int64_t{1} << 62}, 124));
  CHECK(!safegcd::det_check_pow2(Trans2x2{1, 0, 0, 1}, 127));
}

TEST_CASE("trans_bounds_ok pinned values") {
  const std::int64_t two62 = std::int64_t{1} << 62;
  CHECK(safegcd::trans_bounds_ok(Trans2x2{two62, 0, 0, 1}));
  CHECK(safegcd::trans_bounds_ok(Trans2x2{0, two62, -1, 1}));
  CHECK(!safegcd::trans_bounds_ok(Trans2x2{two62, 1, 0, 1}));
  CHECK(!safegcd::trans_bounds_ok(Trans2x2{two62 + 1, 0, 0, 1}));
  CHECK(!safegcd::trans_bounds_ok(Trans2x2{-two62, 0, 0, 1}));  // u+v = -2^62
  CHECK(safegcd::trans_bounds_ok(Trans2x2{-(two62 - 1), 0, 0, 1}));
  CHECK(!safegcd::trans_bounds_ok(Trans2x2{INT64_MIN, INT64_MIN, 0, 1}));
}

TEST_CASE("mid-batch trace obeys the register invariants") {
  std::mt19937_64 rng(0xD5);
  std::uniform_int_distribution<std::int64_t> eta_dist(-683, 683);
  const Int two64 = Int(1) << 64;
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t eta_in = trial == 0 ? -1 : eta_dist(rng);
    const std::uint64_t f0 = rng() | 1;
    const std::uint64_t g0 = trial == 1 ? 0 : rng();
    BatchTrace trace;
    Trans2x2 t;
    divsteps_62_var(eta_in, f0, g0, t, &trace);
    REQUIRE(!trace.records.empty());
    CHECK(trace.records.front().i == 62);
    CHECK(trace.records.front().j == 0);
    CHECK(trace.records.front().eta == eta_in);

    refmath::DivstepState state{Int(-eta_in), Int(f0), Int(g0)};
    refmath::TransMatrix tm = refmath::TransMatrix::identity();
    unsigned done = 0;
    for (const auto& rec : trace.records) {
      // Steps accounted for at this loop top: 62 - i completed plus j
      // halvings deferred from the previous cancellation.
      const unsigned n = static_cast<unsigned>(62 - rec.i + rec.j);
      REQUIRE(n <= 62);
      REQUIRE(n >= done);
      while (done < n) {
        tm = refmath::compose(refmath::step_matrix(state), tm);
        state = refmath::divstep(state);
        ++done;
      }
      const Int scale_j = Int(1) << rec.j;
      // Row 1 of the exact aggregate is the register row shifted left by j.
      CHECK(tm.u % scale_j == 0);
      CHECK(tm.v % scale_j == 0);
      CHECK(Int(static_cast<std::int64_t>(rec.u)) == tm.u / scale_j);
      CHECK(Int(static_cast<std::int64_t>(rec.v)) == tm.v / scale_j);
      // Row 2 is current.
      CHECK(Int(static_cast<std::int64_t>(rec.q)) == tm.q);
      CHECK(Int(static_cast<std::int64_t>(rec.r)) == tm.r);
      // f carries the exact f_n modulo 2^(64-n).
      const Int mod_f = Int(1) << (64 - n);
      CHECK((Int(rec.f) - state.f) % mod_f == 0);
      // g carries f's scale shifted by the deferred halvings.
      CHECK((rec.g & ((std::uint64_t{1} << rec.j) - 1)) == 0);
      const Int mod_g = Int(1) << (64 - n + rec.j);
      CHECK((((Int(rec.g) - ((state.g << rec.j) % two64)) % mod_g) + mod_g) %
                mod_g ==
            0);
      // eta runs ahead of the exact model by the deferred halvings.
      CHECK(Int(rec.eta) == state.eta() + rec.j);
    }
  }
}

TEST_CASE("trace zeros/limit/mask fields are consistent") {
  std::mt19937_64 rng(0xD6);
  for (int trial = 0; trial < 100; ++trial) {
    BatchTrace trace;
    Trans2x2 t;
    divsteps_62_var(-1, rng() | 1, rng(), t, &trace);
    int steps = 0;
    for (const auto& rec : trace.records) {
      steps += rec.zeros;
      CHECK(rec.zeros >= 0);
      CHECK(rec.zeros <= rec.i);
      if (rec.mask != 0) {
        // mask is 2^min(limit, 4 or 6) - 1.
        CHECK((rec.mask & (rec.mask + 1)) == 0);
        CHECK(rec.limit > 0);
        CHECK(rec.limit <= 62);
        CHECK(rec.w <= rec.mask);
      }
    }
    CHECK(steps == 62);
  }
}

TEST_CASE("corrupted ctz table is caught, never silently wrong") {
  // Swap the table entries for trailing-zero counts 0 and 1. That keeps
  // the reported count <= max(1, true count) <= i, so the kernel cannot
  // shift by a negative amount; the corruption must surface as a wrong
  // result or a verification failure instead.
  constexpr std::uint64_t kDebruijn = 0x022FDD63CC95386DULL;
  std::array<std::uint8_t, 64> table{};
  for (int i = 0; i < 64; ++i) {
    table[(kDebruijn << i) >> 58] = static_cast<std::uint8_t>(i);
  }
  std::swap(table[kDebruijn >> 58], table[(kDebruijn << 1) >> 58]);

  safegcd::detail::set_ctz_table_override(table.data());
  std::mt19937_64 rng(0xD7);
  int caught = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t f0 = rng() | 1;
    const std::uint64_t g0 = rng() | 1;  // odd g triggers count-0 lookups
    Trans2x2 t;
    try {
      const std::int64_t eta_out = divsteps_62_var(-1, f0, g0, t);
      const RefBatch ref = ref_batch(-1, f0, g0);
      if (eta_out != ref.eta_out || !(t == ref.t)) ++caught;
    } catch (const VerifyError&) {
      ++caught;
    }
  }
  safegcd::detail::set_ctz_table_override(nullptr);
  CHECK(caught == 50);
  // Back to normal after restore.
  check_against_ref(-1, 12345, 67890);
}
