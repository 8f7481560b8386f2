// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <vector>

namespace safegcd {

// Aggregate transition matrix ((u, v), (q, r)) for one 62-divstep batch,
// scaled by 2^62. Every batch the kernel returns satisfies det = 2^62,
// |u|+|v| <= 2^62, |q|+|r| <= 2^62, u+v > -2^62 and q+r > -2^62.
struct Trans2x2 {
  std::int64_t u = 1;
  std::int64_t v = 0;
  std::int64_t q = 0;
  std::int64_t r = 1;

  friend bool operator==(const Trans2x2& a, const Trans2x2& b) {
    return a.u == b.u && a.v == b.v && a.q == b.q && a.r == b.r;
  }
};

// Snapshot of the kernel registers at the top of one inner loop pass,
// plus the shift/cancellation data of that pass. j counts halvings
// deferred by the previous odd-step cancellation, i is the remaining-step
// counter; both drive the mid-batch invariant checks.
struct BatchTraceRecord {
  int i = 0;
  int j = 0;
  std::int64_t eta = 0;
  std::uint64_t f = 0;
  std::uint64_t g = 0;
  std::uint64_t u = 0;
  std::uint64_t v = 0;
  std::uint64_t q = 0;
  std::uint64_t r = 0;
  int zeros = 0;
  int limit = 0;
  std::uint64_t mask = 0;
  std::uint64_t w = 0;
};

struct BatchTrace {
  std::vector<BatchTraceRecord> records;
};

// Trailing zero count of a nonzero word, de Bruijn multiply + table
// lookup. x = 0 is rejected (verification) and yields garbage otherwise.
int ctz64(std::uint64_t x);

// f * (f*f - 2) for odd f: the low 6 bits equal -f^-1 mod 64.
std::uint64_t inv_neg_mod64(std::uint64_t f);

// f + (((f + 1) & 4) << 1) for odd f: an inverse of f mod 16.
std::uint64_t inv_mod16(std::uint64_t f);

// Runs 62 divsteps on (eta, f0, g0), observing only the low 62 bits of
// f0/g0 and the sign state. Returns the new eta and fills t with the
// aggregate matrix (so t * (f0, g0)^T = 2^62 * (f62, g62)^T for any lift
// of the inputs). Requires odd f0 and eta in [-745, 745]. When trace is
// non-null, appends one record per inner loop pass; no allocation happens
// otherwise.
std::int64_t divsteps_62_var(std::int64_t eta, std::uint64_t f0,
                             std::uint64_t g0, Trans2x2& t,
                             BatchTrace* trace = nullptr);

// Whether u*r - v*q == +2^n exactly (n <= 126; sign included).
bool det_check_pow2(const Trans2x2& t, unsigned n);

// The four aggregate-matrix bounds stated on Trans2x2.
bool trans_bounds_ok(const Trans2x2& t);

namespace detail {
// Test hook: replace the 64-entry ctz lookup table (fault injection);
// nullptr restores the built-in table.
void set_ctz_table_override(const std::uint8_t* table64) noexcept;
}  // namespace detail

}  // namespace safegcd
