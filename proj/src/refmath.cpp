// SPDX-License-Identifier: MIT
#include "safegcd/refmath.hpp"

#include <stdexcept>

namespace safegcd::refmath {

std::pair<Int, Int> apply(const TransMatrix& t, const Int& f, const Int& g) {
  return {t.u * f + t.v * g, t.q * f + t.r * g};
}

TransMatrix compose(const TransMatrix& a, const TransMatrix& b) {
  return {a.u * b.u + a.v * b.q, a.u * b.v + a.v * b.r,
          a.q * b.u + a.r * b.q, a.q * b.v + a.r * b.r};
}

DivstepState divstep(const DivstepState& s) {
  if (!is_odd(s.f)) throw std::invalid_argument("divstep: f must be odd");
  DivstepState next;
  if (s.delta > 0 && is_odd(s.g)) {
    next.delta = 1 - s.delta;
    next.f = s.g;
    next.g = (s.g - s.f) / 2;  // numerator even, division exact
  } else if (is_odd(s.g)) {
    next.delta = 1 + s.delta;
    next.f = s.f;
    next.g = (s.g + s.f) / 2;
  } else {
    next.delta = 1 + s.delta;
    next.f = s.f;
    next.g = s.g / 2;
  }
  return next;
}

TransMatrix step_matrix(const DivstepState& s) {
  if (!is_odd(s.f)) throw std::invalid_argument("step_matrix: f must be odd");
  if (s.delta > 0 && is_odd(s.g)) return {0, 2, -1, 1};
  if (is_odd(s.g)) return {2, 0, 1, 1};
  return {2, 0, 0, 1};
}

std::pair<DivstepState, TransMatrix> step_n(DivstepState s, unsigned n) {
  TransMatrix acc = TransMatrix::identity();
  for (unsigned k = 0; k < n; ++k) {
    acc = compose(step_matrix(s), acc);
    s = divstep(s);
  }
  return {std::move(s), std::move(acc)};
}

std::optional<unsigned> divsteps_to_zero(DivstepState s, unsigned cap) {
  for (unsigned n = 0; n <= cap; ++n) {
    if (s.g == 0) return n;
    s = divstep(s);
  }
  return std::nullopt;
}

Int gcd_safegcd(const Int& f, const Int& g, unsigned max_steps) {
  DivstepState s{1, f, g};
  for (unsigned k = 0; k < max_steps; ++k) s = divstep(s);
  if (s.g != 0) {
    throw std::runtime_error("gcd_safegcd: g nonzero after max_steps");
  }
  return abs(s.f);
}

Int modinv_ref(const Int& x, const Int& m, unsigned max_steps) {
  if (m < 3 || !is_odd(m)) {
    throw std::invalid_argument("modinv_ref: modulus must be odd and >= 3");
  }
  if (x < 0 || x >= m) {
    throw std::invalid_argument("modinv_ref: value must be in [0, m)");
  }
  if (x == 0) return 0;

  DivstepState s{1, m, x};
  TransMatrix t = TransMatrix::identity();
  unsigned n = 0;
  while (s.g != 0) {
    if (n == max_steps) {
      throw std::runtime_error("modinv_ref: divstep bound exhausted");
    }
    t = compose(step_matrix(s), t);
    s = divstep(s);
    ++n;
  }
  if (abs(s.f) != 1) {
    throw NotInvertibleError("modinv_ref: value not coprime to modulus");
  }

  // v * x = 2^n * f_n (mod m) with f_n = +-1. Halve n times mod m: m is
  // odd, so odd values become even after adding m.
  Int value = t.v % m;
  if (value < 0) value += m;
  for (unsigned k = 0; k < n; ++k) {
    if (is_odd(value)) value += m;
    value /= 2;
  }
  if (s.f < 0) value = m - value;
  return value % m;
}

}  // namespace safegcd::refmath
