// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace safegcd::selftest {

// Trial counts for the acceptance criteria. Defaults are the full pinned
// counts; scaled() shrinks everything proportionally for quick runs.
struct Options {
  std::uint64_t seed = 0x5AFE6CD5EEDULL;
  int umul_random_pairs = 1'000'000;
  int batch_random_trials = 100'000;
  int inverse_prime_trials = 10'000;
  int inverse_random_moduli = 1'000;
  int refmath_bound_trials = 10'000;
  int shrink_trials = 100'000;
  int codec_trials_per_len = 100'000;

  // Scales every count by inverse_prime_trials = trials; trials = 0 turns
  // all randomized work off.
  static Options scaled(int trials, std::uint64_t seed);
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs all acceptance criteria (verification force-enabled for the run)
// and returns one result per criterion, ordered by id. When progress is
// non-null, one "criterion N (<name>): PASS/FAIL" line is streamed per
// criterion as it finishes.
std::vector<CriterionResult> run_all(const Options& opts,
                                     std::ostream* progress = nullptr);

// One rendered result line, the same text run_all streams.
std::string result_line(const CriterionResult& res);

// Field prime of the secp256k1 curve: 2^256 - 2^32 - 977.
extern const char* const kSecp256k1PrimeHex;

}  // namespace safegcd::selftest
