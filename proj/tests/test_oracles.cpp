// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "safegcd/divsteps62.hpp"
#include "safegcd/json_io.hpp"
#include "safegcd/modinv64.hpp"
#include "safegcd/oracles.hpp"
#include "safegcd/signed62.hpp"
#include "safegcd/verify.hpp"

namespace {

using safegcd::Int;
namespace oracles = safegcd::oracles;

const Int kSecpPrime(
    "0xfffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f");

safegcd::ModinvTrace traced_run(const Int& x, const Int& m) {
  const safegcd::ModInfo mi = safegcd::make_modinfo(m);
  safegcd::ModinvTrace trace;
  safegcd::modinv64_var(safegcd::encode(x), mi, nullptr, &trace);
  return trace;
}

}  // namespace

TEST_CASE("egcd pinned values and identity") {
  const auto r = oracles::egcd(240, 46);
  CHECK(r.g == 2);
  CHECK(r.u * 240 + r.v * 46 == 2);

  const auto z = oracles::egcd(0, 5);
  CHECK(z.g == 5);
  CHECK(z.u * 0 + z.v * 5 == 5);

  const auto n = oracles::egcd(-240, 46);
  CHECK(n.g == 2);
  CHECK(n.u * -240 + n.v * 46 == 2);

  CHECK_THROWS_AS(oracles::egcd(0, 0), std::invalid_argument);
}

TEST_CASE("egcd satisfies the Bezout identity on random inputs") {
  std::mt19937_64 rng(0xF1);
  for (int trial = 0; trial < 500; ++trial) {
    Int a = oracles::random_bits(rng, 128);
    Int b = oracles::random_bits(rng, 128);
    if (a == 0 && b == 0) continue;
    if (rng() & 1) a = -a;
    const auto r = oracles::egcd(a, b);
    CHECK(r.g >= 0);
    CHECK(r.g == gcd(abs(a), abs(b)));
    CHECK(r.u * a + r.v * b == r.g);
  }
}

TEST_CASE("modinv_egcd pinned values") {
  CHECK(oracles::modinv_egcd(3, 7) == Int(5));
  CHECK(oracles::modinv_egcd(0, 7) == Int(0));
  CHECK(oracles::modinv_egcd(1, 7) == Int(1));
  CHECK(!oracles::modinv_egcd(3, 9).has_value());
  CHECK_THROWS_AS(oracles::modinv_egcd(3, 0), std::invalid_argument);
}

TEST_CASE("modinv_fermat agrees with egcd under a prime modulus") {
  CHECK(oracles::modinv_fermat(3, 7) == 5);
  CHECK_THROWS_AS(oracles::modinv_fermat(0, 7), std::invalid_argument);
  CHECK_THROWS_AS(oracles::modinv_fermat(7, 7), std::invalid_argument);
  std::mt19937_64 rng(0xF2);
  for (int trial = 0; trial < 100; ++trial) {
    const Int x = 1 + oracles::random_below(rng, kSecpPrime - 1);
    const auto e = oracles::modinv_egcd(x, kSecpPrime);
    REQUIRE(e.has_value());
    CHECK(oracles::modinv_fermat(x, kSecpPrime) == *e);
  }
}

TEST_CASE("is_probable_prime classifies known values") {
  CHECK(oracles::is_probable_prime(2));
  CHECK(oracles::is_probable_prime(3));
  CHECK(oracles::is_probable_prime(7));
  CHECK(oracles::is_probable_prime(97));
  CHECK(oracles::is_probable_prime(kSecpPrime));
  CHECK(!oracles::is_probable_prime(0));
  CHECK(!oracles::is_probable_prime(1));
  CHECK(!oracles::is_probable_prime(9));
  CHECK(!oracles::is_probable_prime(561));  // Carmichael
  CHECK(!oracles::is_probable_prime(kSecpPrime - 1));
}

TEST_CASE("random helpers are deterministic and in range") {
  std::mt19937_64 a(7), b(7);
  CHECK(oracles::random_bits(a, 256) == oracles::random_bits(b, 256));
  CHECK(oracles::random_below(a, Int(1000)) ==
        oracles::random_below(b, Int(1000)));
  std::mt19937_64 rng(0xF3);
  for (int trial = 0; trial < 1000; ++trial) {
    CHECK(oracles::random_bits(rng, 62) < (Int(1) << 62));
    const Int v = oracles::random_below(rng, Int(977));
    CHECK(v >= 0);
    CHECK(v < 977);
  }
  CHECK(oracles::random_below(rng, 1) == 0);
  CHECK_THROWS_AS(oracles::random_below(rng, 0), std::invalid_argument);
}

TEST_CASE("adversarial corpus hits the documented patterns") {
  int skipped = -1;
  const auto corpus = oracles::adversarial_corpus(kSecpPrime, &skipped);
  CHECK(skipped == 0);  // prime modulus: nothing shares a factor
  CHECK(corpus.size() >= 30);
  CHECK(std::is_sorted(corpus.begin(), corpus.end()));
  CHECK(std::adjacent_find(corpus.begin(), corpus.end()) == corpus.end());
  for (const Int& v : corpus) {
    CHECK(v >= 0);
    CHECK(v < kSecpPrime);
  }
  const auto has = [&](const Int& v) {
    return std::binary_search(corpus.begin(), corpus.end(), v);
  };
  CHECK(has(0));
  CHECK(has(1));
  CHECK(has(2));
  CHECK(has(kSecpPrime - 1));
  CHECK(has(kSecpPrime - 2));
  CHECK(has((Int(1) << 62) - 1));
  CHECK(has(Int(1) << 124));
  CHECK(has(kSecpPrime - (Int(1) << 186)));
}

TEST_CASE("adversarial corpus drops non-coprime entries for composites") {
  // Divisible by 3, so the 2^62-1 and 2^124-1 patterns share a factor.
  const Int m = 3 * ((Int(1) << 253) + 1113);
  int skipped = -1;
  const auto corpus = oracles::adversarial_corpus(m, &skipped);
  CHECK(skipped >= 2);
  for (const Int& v : corpus) {
    if (v != 0) CHECK(gcd(v, m) == 1);
  }
}

TEST_CASE("verify_iteration_batches accepts an honest trace") {
  std::mt19937_64 rng(0xF4);
  const Int x = oracles::random_below(rng, kSecpPrime);
  const auto trace = traced_run(x, kSecpPrime);
  oracles::BatchCheckStats stats;
  const auto fail = oracles::verify_iteration_batches(kSecpPrime, x, trace, &stats);
  CHECK(!fail.has_value());
  CHECK(stats.batches_checked == static_cast<std::int64_t>(trace.iterations.size()));
  CHECK(stats.bound_violations == 0);
}

TEST_CASE("verify_iteration_batches localizes seeded corruption") {
  std::mt19937_64 rng(0xF5);
  const Int x = 1 + oracles::random_below(rng, kSecpPrime - 1);
  const auto trace = traced_run(x, kSecpPrime);
  REQUIRE(trace.iterations.size() >= 3);

  SUBCASE("matrix corruption breaks the determinant") {
    auto bad = trace;
    // Negating one row flips the determinant sign: always caught.
    bad.iterations[1].t.u = -bad.iterations[1].t.u;
    bad.iterations[1].t.v = -bad.iterations[1].t.v;
    oracles::BatchCheckStats stats;
    const auto fail = oracles::verify_iteration_batches(kSecpPrime, x, bad, &stats);
    REQUIRE(fail.has_value());
    CHECK(fail->stage == "batch-bounds");
    CHECK(fail->iteration == 1);
    CHECK(stats.bound_violations == 1);
  }

  SUBCASE("eta corruption is a batch mismatch") {
    auto bad = trace;
    bad.iterations[1].eta_out += 2;
    const auto fail = oracles::verify_iteration_batches(kSecpPrime, x, bad);
    REQUIRE(fail.has_value());
    CHECK(fail->stage == "batch");
    CHECK(fail->iteration == 1);
  }

  SUBCASE("f corruption shows up in update-fg") {
    auto bad = trace;
    bad.iterations[2].f_after.limbs[0] ^= 1;
    const auto fail = oracles::verify_iteration_batches(kSecpPrime, x, bad);
    REQUIRE(fail.has_value());
    CHECK(fail->stage == "update-fg");
    CHECK(fail->iteration == 2);
  }

  SUBCASE("d corruption shows up in update-de") {
    auto bad = trace;
    bad.iterations[0].d_after.limbs[0] ^= 2;
    const auto fail = oracles::verify_iteration_batches(kSecpPrime, x, bad);
    REQUIRE(fail.has_value());
    CHECK(fail->stage == "update-de");
    CHECK(fail->iteration == 0);
  }
}

TEST_CASE("differential_modinv passes for the secp256k1 prime") {
  const auto rep = oracles::differential_modinv(3, kSecpPrime, 0x5EED);
  CHECK(rep.pass);
  CHECK(!rep.failure.has_value());
  CHECK(rep.modulus_prime);
  CHECK(rep.trials == 3);
  CHECK(rep.checked_inputs > 30);  // corpus plus trials
  CHECK(rep.skipped_inputs == 0);
  CHECK(rep.batches_checked >= rep.checked_inputs);
  CHECK(rep.bound_violations == 0);
  CHECK(rep.max_outer_iterations <= 12);
  CHECK(rep.max_outer_iterations >= 8);
  CHECK(rep.max_abs_eta <= 745);
}

TEST_CASE("differential_modinv passes for small and composite moduli") {
  const auto nine = oracles::differential_modinv(5, Int(9), 0x5EED);
  CHECK(nine.pass);
  CHECK(!nine.modulus_prime);

  const Int m = 3 * ((Int(1) << 253) + 1113);
  const auto comp = oracles::differential_modinv(2, m, 0x5EED);
  CHECK(comp.pass);
  CHECK(comp.skipped_inputs >= 2);
  CHECK(!comp.modulus_prime);

  const auto tiny = oracles::differential_modinv(0, Int(3), 1,
                                                 /*include_corpus=*/true);
  CHECK(tiny.pass);
}

TEST_CASE("differential_modinv with no inputs trivially passes") {
  const auto rep =
      oracles::differential_modinv(0, kSecpPrime, 1, /*include_corpus=*/false);
  CHECK(rep.pass);
  CHECK(rep.checked_inputs == 0);
  CHECK(rep.batches_checked == 0);
}

TEST_CASE("differential_modinv is deterministic per seed") {
  const auto a = oracles::differential_modinv(2, kSecpPrime, 0xABCDEF);
  const auto b = oracles::differential_modinv(2, kSecpPrime, 0xABCDEF);
  CHECK(safegcd::jsonio::differential_report_json(a) ==
        safegcd::jsonio::differential_report_json(b));
}

TEST_CASE("differential_modinv rejects invalid moduli") {
  CHECK_THROWS_AS(oracles::differential_modinv(1, Int(8), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracles::differential_modinv(1, Int(1) << 256, 1),
                  std::invalid_argument);
}

TEST_CASE("differential_modinv surfaces kernel faults as verify failures") {
  // Corrupt the ctz table: the kernel's own invariant checks must fire
  // and the harness reports the verify stage.
  constexpr std::uint64_t kDebruijn = 0x022FDD63CC95386DULL;
  std::array<std::uint8_t, 64> table{};
  for (int i = 0; i < 64; ++i) {
    table[(kDebruijn << i) >> 58] = static_cast<std::uint8_t>(i);
  }
  std::swap(table[kDebruijn >> 58], table[(kDebruijn << 1) >> 58]);
  safegcd::detail::set_ctz_table_override(table.data());
  const auto rep = oracles::differential_modinv(1, kSecpPrime, 0x5EED);
  safegcd::detail::set_ctz_table_override(nullptr);
  CHECK(!rep.pass);
  REQUIRE(rep.failure.has_value());
  CHECK(rep.failure->stage == "verify");
}
