// SPDX-License-Identifier: MIT
#include "safegcd/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <random>
#include <sstream>

#include "safegcd/divsteps62.hpp"
#include "safegcd/modinv64.hpp"
#include "safegcd/oracles.hpp"
#include "safegcd/refmath.hpp"
#include "safegcd/signed62.hpp"
#include "safegcd/verify.hpp"
#include "safegcd/wide64.hpp"

namespace safegcd::selftest {

const char* const kSecp256k1PrimeHex =
    "fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f";

Options Options::scaled(int trials, std::uint64_t seed) {
  Options o;
  o.seed = seed;
  if (trials <= 0) {
    o.umul_random_pairs = 0;
    o.batch_random_trials = 0;
    o.inverse_prime_trials = 0;
    o.inverse_random_moduli = 0;
    o.refmath_bound_trials = 0;
    o.shrink_trials = 0;
    o.codec_trials_per_len = 0;
    return o;
  }
  const double ratio = static_cast<double>(trials) / o.inverse_prime_trials;
  const auto scale = [&](int full) {
    const double v = full * ratio;
    return v < 1.0 ? 1 : static_cast<int>(v);
  };
  o.umul_random_pairs = scale(o.umul_random_pairs);
  o.batch_random_trials = scale(o.batch_random_trials);
  o.inverse_random_moduli = scale(o.inverse_random_moduli);
  o.refmath_bound_trials = scale(o.refmath_bound_trials);
  o.shrink_trials = scale(o.shrink_trials);
  o.codec_trials_per_len = scale(o.codec_trials_per_len);
  o.inverse_prime_trials = trials;
  return o;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Ctx {
  Options opts;
  std::int64_t batches_checked = 0;
  std::int64_t bound_violations = 0;
  int max_outer = 0;
  std::int64_t max_abs_eta = 0;
  int verify_failures = 0;
  // A corrupted ctz table (fault injection) would drive the kernel into
  // undefined shifts; criteria that enter the kernel fail fast instead.
  bool kernel_ok = true;
};

constexpr const char* kKernelGateMsg =
    "ctz64 failed its sanity check; kernel runs skipped";

void accumulate(Ctx& ctx, const oracles::DifferentialReport& rep) {
  ctx.batches_checked += rep.batches_checked;
  ctx.bound_violations += rep.bound_violations;
  ctx.max_outer = std::max(ctx.max_outer, rep.max_outer_iterations);
  ctx.max_abs_eta = std::max(ctx.max_abs_eta, rep.max_abs_eta);
  if (rep.failure && rep.failure->stage == "verify") ++ctx.verify_failures;
}

std::string failure_text(const oracles::DifferentialReport& rep) {
  if (!rep.failure) return "unknown failure";
  const auto& f = *rep.failure;
  std::ostringstream os;
  os << "stage " << f.stage << ", trial " << f.trial;
  if (f.iteration >= 0) os << ", iteration " << f.iteration;
  os << ": " << f.detail << " (x=" << format_hex(f.x) << ")";
  return os.str();
}

void crit_umul(Ctx& ctx, CriterionResult& res) {
  const std::uint64_t edges[] = {0,
                                 1,
                                 (std::uint64_t{1} << 32) - 1,
                                 std::uint64_t{1} << 32,
                                 (std::uint64_t{1} << 32) + 1,
                                 std::uint64_t{1} << 63,
                                 ~std::uint64_t{0}};
  long long pairs = 0;
  long long mismatches = 0;
  const auto check = [&](std::uint64_t a, std::uint64_t b) {
    const U128Parts p = umul128(a, b);
    const Int got = (Int(p.hi) << 64) + p.lo;
    ++pairs;
    if (got != Int(a) * b) {
      if (++mismatches == 1) {
        res.detail = "mismatch at a=" + format_hex_u64(a) + " b=" + format_hex_u64(b);
      }
    }
  };
  for (std::uint64_t a : edges) {
    for (std::uint64_t b : edges) check(a, b);
  }
  std::mt19937_64 rng(ctx.opts.seed ^ 0xC1);
  for (int n = 0; n < ctx.opts.umul_random_pairs; ++n) check(rng(), rng());
  res.pass = mismatches == 0;
  if (res.pass) {
    res.detail = std::to_string(pairs) + " pairs (49 edge) matched the bignum product";
  }
}

void crit_batch(Ctx& ctx, CriterionResult& res) {
  if (!ctx.kernel_ok) {
    res.pass = false;
    res.detail = kKernelGateMsg;
    return;
  }
  // The synthetic eta sweep covers the full documented input range, which
  // includes states a real inverse run never reaches; the mid-batch eta
  // assertion is a reachable-state statement, so the sweep runs with
  // verification off and checks functional equality only.
  VerifyGuard verify_off(false);
  long long checked = 0;
  std::string first;
  const auto one = [&](std::int64_t eta, std::uint64_t f0, std::uint64_t g0) {
    Trans2x2 t;
    const std::int64_t eta_out = divsteps_62_var(eta, f0, g0, t);
    ++checked;
    ++ctx.batches_checked;
    if (!det_check_pow2(t, 62) || !trans_bounds_ok(t)) {
      ++ctx.bound_violations;
      if (first.empty()) {
        first = "bound/determinant violation at eta=" + std::to_string(eta) +
                " f0=" + format_hex_u64(f0) + " g0=" + format_hex_u64(g0);
      }
      return;
    }
    refmath::DivstepState st{Int(-eta), Int(f0), Int(g0)};
    auto [after, rt] = refmath::step_n(st, 62);
    if (rt.u != t.u || rt.v != t.v || rt.q != t.q || rt.r != t.r ||
        after.eta() != eta_out) {
      if (first.empty()) {
        first = "mismatch vs exact model at eta=" + std::to_string(eta) +
                " f0=" + format_hex_u64(f0) + " g0=" + format_hex_u64(g0);
      }
    }
  };
  std::mt19937_64 rng(ctx.opts.seed ^ 0xC2);
  const std::uint64_t f_edges[] = {1, ~std::uint64_t{0}, rng() | 1};
  for (std::uint64_t f0 : f_edges) {
    for (std::uint64_t g0 : {std::uint64_t{0}, f0, ~std::uint64_t{0}}) {
      for (int eta : {-745, -1, 0, 1, 745}) one(eta, f0, g0);
    }
  }
  std::uniform_int_distribution<std::int64_t> eta_dist(-745, 745);
  for (int n = 0; n < ctx.opts.batch_random_trials; ++n) {
    one(eta_dist(rng), rng() | 1, rng());
  }
  res.pass = first.empty();
  res.detail = res.pass
                   ? std::to_string(checked) + " batches matched the exact model"
                   : first;
}

void crit_small_inverses(Ctx& ctx, CriterionResult& res) {
  const auto brute_inv = [](std::uint64_t f, std::uint64_t mask) -> std::uint64_t {
    for (std::uint64_t j = 1; j <= mask; j += 2) {
      if (((f * j) & mask) == 1) return j;
    }
    return 0;
  };
  std::mt19937_64 rng(ctx.opts.seed ^ 0xC4);
  std::string first;
  for (std::uint64_t fr = 1; fr < 64; fr += 2) {
    const std::uint64_t want = (64 - brute_inv(fr, 63)) & 63;
    for (std::uint64_t lift : {std::uint64_t{0}, rng(), rng()}) {
      const std::uint64_t f = (lift << 6) | fr;
      if ((inv_neg_mod64(f) & 63) != want && first.empty()) {
        first = "inv_neg_mod64 wrong for f=" + format_hex_u64(f);
      }
    }
  }
  for (std::uint64_t fr = 1; fr < 16; fr += 2) {
    const std::uint64_t want = brute_inv(fr, 15);
    for (std::uint64_t lift : {std::uint64_t{0}, rng(), rng()}) {
      const std::uint64_t f = (lift << 4) | fr;
      if ((inv_mod16(f) & 15) != want && first.empty()) {
        first = "inv_mod16 wrong for f=" + format_hex_u64(f);
      }
    }
  }
  res.pass = first.empty();
  res.detail = res.pass
                   ? "all 32 odd residues mod 64 and 8 mod 16, with random lifts"
                   : first;
}

void crit_inverse(Ctx& ctx, CriterionResult& res) {
  if (!ctx.kernel_ok) {
    res.pass = false;
    res.detail = kKernelGateMsg;
    return;
  }
  const Int p = *parse_hex(kSecp256k1PrimeHex);
  {
    const ModInfo mi = make_modinfo(p);
    const Signed62 zero = modinv64_var(encode(Int(0)), mi);
    if (decode(zero) != 0) {
      res.pass = false;
      res.detail = "x=0 did not map to 0";
      return;
    }
  }
  auto prime_rep = oracles::differential_modinv(ctx.opts.inverse_prime_trials, p,
                                                ctx.opts.seed ^ 0xC5, true);
  accumulate(ctx, prime_rep);
  long long inputs = prime_rep.checked_inputs;
  if (!prime_rep.pass) {
    res.pass = false;
    res.detail = "secp256k1 prime: " + failure_text(prime_rep);
    return;
  }
  std::mt19937_64 rng(ctx.opts.seed ^ 0xC55);
  for (int i = 0; i < ctx.opts.inverse_random_moduli; ++i) {
    Int m = oracles::random_bits(rng, 256);
    m |= Int(1) << 255;
    m |= 1;
    auto rep = oracles::differential_modinv(1, m, rng(), /*include_corpus=*/i < 5);
    accumulate(ctx, rep);
    inputs += rep.checked_inputs;
    if (!rep.pass) {
      res.pass = false;
      res.detail = "modulus " + format_hex(m) + ": " + failure_text(rep);
      return;
    }
  }
  res.pass = true;
  res.detail = std::to_string(inputs) +
               " inputs agreed across limb, exact, egcd and Fermat routes";
}

void crit_iteration_bounds(Ctx& ctx, CriterionResult& res) {
  if (!ctx.kernel_ok) {
    res.pass = false;
    res.detail = kKernelGateMsg;
    return;
  }
  if (ctx.max_outer > 12) {
    res.pass = false;
    res.detail = "driver used " + std::to_string(ctx.max_outer) + " batches";
    return;
  }
  unsigned max_steps = 0;
  std::mt19937_64 rng(ctx.opts.seed ^ 0xC6);
  for (int i = 0; i < ctx.opts.refmath_bound_trials; ++i) {
    Int m = oracles::random_bits(rng, 256) | 1;
    if (m < 3) m = 3;
    const Int g = oracles::random_below(rng, m);
    const auto steps = refmath::divsteps_to_zero({Int(1), m, g}, 724);
    if (!steps) {
      res.pass = false;
      res.detail = "exact model took more than 724 divsteps for m=" + format_hex(m) +
                   " g=" + format_hex(g);
      return;
    }
    max_steps = std::max(max_steps, *steps);
  }
  res.pass = true;
  res.detail = "driver max " + std::to_string(ctx.max_outer) + "/12 batches (" +
               std::to_string(ctx.max_outer * 62) +
               "/744 divsteps); exact model max " + std::to_string(max_steps) +
               "/724 divsteps over " + std::to_string(ctx.opts.refmath_bound_trials) +
               " inputs";
}

void crit_shrink(Ctx& ctx, CriterionResult& res) {
  std::mt19937_64 rng(ctx.opts.seed ^ 0xC8);
  long long folds = 0;
  std::string first;
  const auto top_limb = [&]() -> std::int64_t {
    switch (rng() & 3) {
      case 0:
        return 0;
      case 1:
        return -1;
      default:
        return static_cast<std::int64_t>(rng());
    }
  };
  for (int n = 0; n < ctx.opts.shrink_trials && first.empty(); ++n) {
    const int len = 1 + static_cast<int>(rng() % kLimbCount);
    Signed62 f{}, g{};
    for (int i = 0; i + 1 < len; ++i) {
      f.limbs[i] = static_cast<std::int64_t>(rng() & kLimbMask);
      g.limbs[i] = static_cast<std::int64_t>(rng() & kLimbMask);
    }
    f.limbs[len - 1] = top_limb();
    g.limbs[len - 1] = top_limb();
    const Int fd = decode(f, len);
    const Int gd = decode(g, len);
    const std::int64_t fn = f.limbs[len - 1];
    const std::int64_t gn = g.limbs[len - 1];
    const int len2 = shrink_len(f, g, len);
    const bool should_fold =
        len > 1 && (fn == 0 || fn == -1) && (gn == 0 || gn == -1);
    if (len2 != (should_fold ? len - 1 : len)) {
      first = "wrong fold decision at len=" + std::to_string(len);
    } else if (decode(f, len2) != fd || decode(g, len2) != gd) {
      first = "decoded value changed at len=" + std::to_string(len);
    }
    if (should_fold) ++folds;
  }
  res.pass = first.empty();
  res.detail = res.pass ? std::to_string(ctx.opts.shrink_trials) + " states, " +
                              std::to_string(folds) + " folds, values preserved"
                        : first;
}

void crit_codec(Ctx& ctx, CriterionResult& res) {
  std::mt19937_64 rng(ctx.opts.seed ^ 0xC9);
  std::string first;
  for (int len = 1; len <= kLimbCount && first.empty(); ++len) {
    const unsigned bits = 62 * (len - 1) + 63;
    const Int offset = Int(1) << bits;
    for (int n = 0; n < ctx.opts.codec_trials_per_len && first.empty(); ++n) {
      const Int value = oracles::random_bits(rng, bits + 1) - offset;
      const Signed62 enc = encode(value, len);
      for (int i = 0; i + 1 < len; ++i) {
        if (enc.limbs[i] < 0 ||
            static_cast<std::uint64_t>(enc.limbs[i]) > kLimbMask) {
          first = "non-canonical limb at len=" + std::to_string(len);
        }
      }
      for (int i = len; i < kLimbCount; ++i) {
        if (enc.limbs[i] != 0) first = "dirty upper limb at len=" + std::to_string(len);
      }
      if (first.empty() && decode(enc, len) != value) {
        first = "roundtrip mismatch at len=" + std::to_string(len);
      }
    }
  }
  res.pass = first.empty();
  res.detail = res.pass ? std::to_string(ctx.opts.codec_trials_per_len) +
                              " values per length, all lengths roundtrip"
                        : first;
}

void crit_bounds_summary(Ctx& ctx, CriterionResult& res) {
  res.pass = ctx.bound_violations == 0 && ctx.batches_checked > 0;
  res.detail = std::to_string(ctx.batches_checked) + " batches checked, " +
               std::to_string(ctx.bound_violations) +
               " bound/determinant violations";
}

void crit_verify_parity(Ctx& ctx, CriterionResult& res) {
  if (!ctx.kernel_ok) {
    res.pass = false;
    res.detail = kKernelGateMsg;
    return;
  }
  res.pass = ctx.verify_failures == 0;
  res.detail = std::to_string(ctx.verify_failures) +
               " verification checks fired with verification enabled";
}

}  // namespace

std::string result_line(const CriterionResult& res) {
  std::ostringstream os;
  os << "criterion " << res.id << " (" << res.name << "): "
     << (res.pass ? "PASS" : "FAIL") << ": " << res.detail;
  return os.str();
}

std::vector<CriterionResult> run_all(const Options& opts, std::ostream* progress) {
  Ctx ctx{};
  ctx.opts = opts;
  for (int b = 0; b < 64; ++b) {
    if (ctz64(std::uint64_t{1} << b) != b) {
      ctx.kernel_ok = false;
      break;
    }
  }
  VerifyGuard verify_on(true);
  std::vector<CriterionResult> out;

  const auto run = [&](int id, const char* name, auto&& body) {
    CriterionResult res;
    res.id = id;
    res.name = name;
    const auto start = Clock::now();
    try {
      body(res);
    } catch (const VerifyError& e) {
      ++ctx.verify_failures;
      res.pass = false;
      res.detail = std::string("verification check fired: ") + e.what();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("error: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (progress) *progress << result_line(res) << std::endl;
    out.push_back(std::move(res));
  };

  run(1, "umul128-exactness", [&](CriterionResult& r) { crit_umul(ctx, r); });
  run(2, "batch-differential", [&](CriterionResult& r) { crit_batch(ctx, r); });
  run(4, "small-inverse-formulas",
      [&](CriterionResult& r) { crit_small_inverses(ctx, r); });
  run(5, "inverse-differential", [&](CriterionResult& r) { crit_inverse(ctx, r); });
  run(6, "iteration-bounds",
      [&](CriterionResult& r) { crit_iteration_bounds(ctx, r); });
  run(8, "shrink-value-preservation", [&](CriterionResult& r) { crit_shrink(ctx, r); });
  run(9, "codec-roundtrip", [&](CriterionResult& r) { crit_codec(ctx, r); });
  run(3, "batch-matrix-bounds",
      [&](CriterionResult& r) { crit_bounds_summary(ctx, r); });
  run(7, "verify-parity", [&](CriterionResult& r) { crit_verify_parity(ctx, r); });

  std::sort(out.begin(), out.end(),
            [](const CriterionResult& a, const CriterionResult& b) {
              return a.id < b.id;
            });
  return out;
}

}  // namespace safegcd::selftest
