// SPDX-License-Identifier: MIT
#include "safegcd/oracles.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include <boost/multiprecision/miller_rabin.hpp>

#include "safegcd/refmath.hpp"
#include "safegcd/verify.hpp"

namespace safegcd::oracles {

namespace {

Int mod_canon(const Int& v, const Int& m) {
  Int r = v % m;
  if (r < 0) r += m;
  return r;
}

// v * 2^-n mod m for odd m, by repeated exact halving.
Int div_pow2_mod(Int v, unsigned n, const Int& m) {
  v = mod_canon(v, m);
  for (unsigned k = 0; k < n; ++k) {
    if (is_odd(v)) v += m;
    v /= 2;
  }
  return v;
}

std::string int_str(const Int& v) { return v.str(); }

DifferentialFailure make_failure(std::string stage, int trial, int iteration,
                                 std::string detail, Int x) {
  DifferentialFailure f;
  f.stage = std::move(stage);
  f.trial = trial;
  f.iteration = iteration;
  f.detail = std::move(detail);
  f.x = std::move(x);
  return f;
}

}  // namespace

EgcdResult egcd(const Int& a, const Int& b) {
  if (a == 0 && b == 0) {
    throw std::invalid_argument("egcd: gcd(0, 0) is undefined");
  }
  Int old_r = a, r = b;
  Int old_s = 1, s = 0;
  Int old_t = 0, t = 1;
  while (r != 0) {
    const Int quot = old_r / r;
    old_r -= quot * r;
    std::swap(old_r, r);
    old_s -= quot * s;
    std::swap(old_s, s);
    old_t -= quot * t;
    std::swap(old_t, t);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  return {std::move(old_r), std::move(old_s), std::move(old_t)};
}

std::optional<Int> modinv_egcd(const Int& x, const Int& m) {
  if (m < 1) throw std::invalid_argument("modinv_egcd: modulus must be positive");
  if (x == 0) return Int(0);
  EgcdResult res = egcd(x, m);
  if (res.g != 1) return std::nullopt;
  return mod_canon(res.u, m);
}

Int modinv_fermat(const Int& a, const Int& p) {
  if (a <= 0 || a >= p) {
    throw std::invalid_argument("modinv_fermat: value must be in (0, p)");
  }
  return boost::multiprecision::powm(a, p - 2, p);
}

bool is_probable_prime(const Int& n, unsigned rounds) {
  if (n < 2) return false;
  std::mt19937_64 gen(0xC0FFEE1234567891ULL);
  return boost::multiprecision::miller_rabin_test(n, rounds, gen);
}

Int random_bits(std::mt19937_64& rng, unsigned bits) {
  Int out = 0;
  for (unsigned made = 0; made < bits; made += 64) {
    out <<= 64;
    out += rng();
  }
  out &= (Int(1) << bits) - 1;
  return out;
}

Int random_below(std::mt19937_64& rng, const Int& bound) {
  if (bound < 1) throw std::invalid_argument("random_below: bound must be >= 1");
  if (bound == 1) return Int(0);
  const unsigned bits =
      static_cast<unsigned>(boost::multiprecision::msb(bound)) + 1 + 64;
  return random_bits(rng, bits) % bound;
}

std::vector<Int> adversarial_corpus(const Int& m, int* skipped) {
  std::vector<Int> out;
  int skip = 0;
  const auto push = [&](const Int& cand) {
    if (cand < 0 || cand >= m) return;
    if (cand != 0 && boost::multiprecision::gcd(cand, m) != 1) {
      ++skip;
      return;
    }
    out.push_back(cand);
  };

  push(0);
  push(1);
  push(2);
  push(m - 1);
  push(m - 2);
  // Long one-runs and alternating bit patterns.
  for (unsigned k : {62u, 124u, 186u, 248u, 255u, 256u}) push((Int(1) << k) - 1);
  Int alt_a = 0, alt_b = 0;
  for (int k = 0; k < 128; ++k) {
    alt_a <<= 2;
    alt_a += 2;  // ...101010
    alt_b <<= 2;
    alt_b += 1;  // ...010101
  }
  push(alt_a);
  push(alt_b);
  // Values that pull intermediate top limbs toward 0 / -1 near each limb
  // boundary.
  for (int k = 1; k <= 4; ++k) {
    const Int p = Int(1) << (62 * k);
    push(p - 1);
    push(p);
    push(p + 1);
    push(m - p);
    push(m - p - 1);
    push(m - p + 1);
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (skipped) *skipped = skip;
  return out;
}

std::optional<DifferentialFailure> verify_iteration_batches(
    const Int& m, const Int& x, const ModinvTrace& trace,
    BatchCheckStats* stats) {
  refmath::DivstepState s{1, m, x};
  Int dd = 0, ee = 1;  // reference d, e residues mod m

  for (const auto& rec : trace.iterations) {
    const int it = rec.iteration;
    if (stats) ++stats->batches_checked;

    if (!det_check_pow2(rec.t, 62) || !trans_bounds_ok(rec.t)) {
      if (stats) ++stats->bound_violations;
      return make_failure("batch-bounds", -1, it,
                          "aggregate matrix bound or determinant violation", x);
    }

    auto [s_next, ref_t] = refmath::step_n(s, 62);
    if (ref_t.u != rec.t.u || ref_t.v != rec.t.v || ref_t.q != rec.t.q ||
        ref_t.r != rec.t.r) {
      std::ostringstream os;
      os << "matrix mismatch: kernel (" << rec.t.u << ", " << rec.t.v << ", "
         << rec.t.q << ", " << rec.t.r << ") vs reference (" << int_str(ref_t.u)
         << ", " << int_str(ref_t.v) << ", " << int_str(ref_t.q) << ", "
         << int_str(ref_t.r) << ")";
      return make_failure("batch", -1, it, os.str(), x);
    }
    if (s_next.eta() != rec.eta_out) {
      std::ostringstream os;
      os << "eta mismatch: kernel " << rec.eta_out << " vs reference "
         << int_str(s_next.eta());
      return make_failure("batch", -1, it, os.str(), x);
    }

    const Int f_dec = decode(rec.f_after, rec.len_in);
    const Int g_dec = decode(rec.g_after, rec.len_in);
    if (f_dec != s_next.f || g_dec != s_next.g) {
      std::ostringstream os;
      os << "f/g mismatch after update: kernel (" << int_str(f_dec) << ", "
         << int_str(g_dec) << ") vs reference (" << int_str(s_next.f) << ", "
         << int_str(s_next.g) << ")";
      return make_failure("update-fg", -1, it, os.str(), x);
    }

    const Int dd_next =
        div_pow2_mod(Int(rec.t.u) * dd + Int(rec.t.v) * ee, 62, m);
    const Int ee_next =
        div_pow2_mod(Int(rec.t.q) * dd + Int(rec.t.r) * ee, 62, m);
    if (mod_canon(decode(rec.d_after, kLimbCount), m) != dd_next ||
        mod_canon(decode(rec.e_after, kLimbCount), m) != ee_next) {
      return make_failure("update-de", -1, it,
                          "d/e residue diverged from the reference transition",
                          x);
    }

    s = std::move(s_next);
    dd = dd_next;
    ee = ee_next;
  }

  if (!trace.iterations.empty() && trace.iterations.back().g_zero && s.g != 0) {
    return make_failure("batch", -1,
                        trace.iterations.back().iteration,
                        "kernel stopped but the reference g is nonzero", x);
  }
  return std::nullopt;
}

DifferentialReport differential_modinv(int trials, const Int& m,
                                       std::uint64_t seed,
                                       bool include_corpus) {
  DifferentialReport rep;
  rep.seed = seed;
  rep.trials = trials;

  const ModInfo mi = make_modinfo(m);  // validates the modulus
  rep.modulus_prime = is_probable_prime(m);

  std::mt19937_64 rng(seed);
  std::vector<Int> inputs;
  if (include_corpus) inputs = adversarial_corpus(m, &rep.skipped_inputs);
  for (int t = 0; t < trials; ++t) {
    Int x = random_below(rng, m);
    while (x != 0 && boost::multiprecision::gcd(x, m) != 1) {
      x = random_below(rng, m);
    }
    inputs.push_back(std::move(x));
  }

  VerifyGuard verify_on(true);
  for (std::size_t idx = 0; idx < inputs.size(); ++idx) {
    const Int& x = inputs[idx];
    const int trial = static_cast<int>(idx);

    ModinvStats stats;
    ModinvTrace trace;
    Signed62 result;
    try {
      result = modinv64_var(encode(x, kLimbCount), mi, &stats, &trace);
    } catch (const VerifyError& e) {
      rep.pass = false;
      rep.failure = make_failure("verify", trial, -1, e.what(), x);
      return rep;
    }
    ++rep.checked_inputs;

    if (stats.outer_iterations > rep.max_outer_iterations) {
      rep.max_outer_iterations = stats.outer_iterations;
    }
    if (stats.max_abs_eta > rep.max_abs_eta) rep.max_abs_eta = stats.max_abs_eta;
    if (stats.outer_iterations > 12) {
      rep.pass = false;
      rep.failure = make_failure("iteration-cap", trial, -1,
                                 "more than 12 batches", x);
      return rep;
    }

    BatchCheckStats bstats;
    if (auto fail = verify_iteration_batches(m, x, trace, &bstats)) {
      fail->trial = trial;
      rep.batches_checked += bstats.batches_checked;
      rep.bound_violations += bstats.bound_violations;
      rep.pass = false;
      rep.failure = std::move(fail);
      return rep;
    }
    rep.batches_checked += bstats.batches_checked;
    rep.bound_violations += bstats.bound_violations;

    const Int got = decode(result, kLimbCount);

    Int want_ref;
    try {
      want_ref = refmath::modinv_ref(x, m);
    } catch (const refmath::NotInvertibleError&) {
      // Inputs are pre-screened coprime; reaching this is itself a failure.
      rep.pass = false;
      rep.failure = make_failure("inverse-limb-vs-ref", trial, -1,
                                 "reference reports non-invertible input", x);
      return rep;
    }
    if (got != want_ref) {
      rep.pass = false;
      rep.failure = make_failure(
          "inverse-limb-vs-ref", trial, -1,
          "kernel " + format_hex(got) + " vs reference " + format_hex(want_ref),
          x);
      return rep;
    }

    const std::optional<Int> want_egcd = modinv_egcd(x, m);
    if (!want_egcd || got != *want_egcd) {
      rep.pass = false;
      rep.failure = make_failure(
          "inverse-limb-vs-egcd", trial, -1,
          "kernel " + format_hex(got) + " vs egcd " +
              (want_egcd ? format_hex(*want_egcd) : std::string("<none>")),
          x);
      return rep;
    }

    if (rep.modulus_prime && x != 0) {
      const Int want_fermat = modinv_fermat(x, m);
      if (want_fermat != *want_egcd) {
        rep.pass = false;
        rep.failure = make_failure(
            "inverse-egcd-vs-fermat", trial, -1,
            "egcd " + format_hex(*want_egcd) + " vs fermat " +
                format_hex(want_fermat),
            x);
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace safegcd::oracles
