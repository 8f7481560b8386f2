// SPDX-License-Identifier: MIT
#pragma once

#include <optional>
#include <utility>

#include "safegcd/bigint.hpp"

namespace safegcd::refmath {

// Exact reference model of the divstep iteration on arbitrary-precision
// integers. This is the ground truth the limb kernels are tested against;
// it favors clarity over speed.

// Thrown when an inverse is requested for x with gcd(x, m) != 1.
class NotInvertibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// One divstep state. delta is the internal sign-state convention; the
// batched kernels work in eta = -delta, and eta() is the only place the
// conversion happens.
struct DivstepState {
  Int delta;
  Int f;
  Int g;

  Int eta() const { return -delta; }

  friend bool operator==(const DivstepState& a, const DivstepState& b) {
    return a.delta == b.delta && a.f == b.f && a.g == b.g;
  }
};

// 2x2 integer transition matrix ((u, v), (q, r)).
struct TransMatrix {
  Int u, v, q, r;

  static TransMatrix identity() { return {1, 0, 0, 1}; }

  Int det() const { return u * r - v * q; }

  friend bool operator==(const TransMatrix& a, const TransMatrix& b) {
    return a.u == b.u && a.v == b.v && a.q == b.q && a.r == b.r;
  }
};

// t * (f, g)^T.
std::pair<Int, Int> apply(const TransMatrix& t, const Int& f, const Int& g);

// later * earlier.
TransMatrix compose(const TransMatrix& later, const TransMatrix& earlier);

// One exact divstep. Requires odd f; the transition keeps f odd, preserves
// gcd(f, g), and once g = 0 only delta keeps incrementing.
DivstepState divstep(const DivstepState& s);

// The matrix m(s) with m(s) * (f, g)^T = 2 * (f', g')^T for the step taken
// from s. det m(s) = 2 always.
TransMatrix step_matrix(const DivstepState& s);

// n divsteps from s, together with the aggregate transition T satisfying
// T * (f0, g0)^T = 2^n * (fn, gn)^T and det T = 2^n.
std::pair<DivstepState, TransMatrix> step_n(DivstepState s, unsigned n);

// 12 batches of 62 suffice for inputs up to 256 bits.
inline constexpr unsigned kDefaultMaxDivsteps = 744;

// Number of divsteps from s until g = 0, or nullopt if cap is exceeded.
std::optional<unsigned> divsteps_to_zero(DivstepState s, unsigned cap);

// gcd(f, g) for odd f, by running exactly max_steps divsteps and returning
// |f|. Throws std::runtime_error if g has not reached 0 by then (max_steps
// too small for the input size).
Int gcd_safegcd(const Int& f, const Int& g, unsigned max_steps = kDefaultMaxDivsteps);

// Modular inverse of x mod m for odd m >= 3 and 0 <= x < m, via the
// aggregate transition row (u, v): from T * (m, x)^T = 2^n * (+-1, 0)^T it
// follows v * x = +-2^n (mod m), and dividing out 2^n by repeated halving
// mod m yields the inverse. Returns 0 for x = 0. Throws NotInvertibleError
// when gcd(x, m) != 1.
Int modinv_ref(const Int& x, const Int& m, unsigned max_steps = kDefaultMaxDivsteps);

}  // namespace safegcd::refmath
