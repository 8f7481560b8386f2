// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "safegcd/bigint.hpp"
#include "safegcd/modinv64.hpp"

namespace safegcd::oracles {

// Independent arithmetic routes used to cross-check the divstep stack.

// Extended Euclid: g = gcd(a, b) >= 0 with u*a + v*b = g. gcd(0, 0) is
// rejected.
struct EgcdResult {
  Int g, u, v;
};
EgcdResult egcd(const Int& a, const Int& b);

// Canonical inverse of x mod m via egcd, nullopt when gcd(x, m) != 1.
// Follows the x = 0 -> 0 convention of the divstep drivers.
std::optional<Int> modinv_egcd(const Int& x, const Int& m);

// a^(p-2) mod p; only meaningful for prime p and 0 < a < p.
Int modinv_fermat(const Int& a, const Int& p);

// Miller-Rabin with a fixed-seeded engine; deterministic per input.
bool is_probable_prime(const Int& n, unsigned rounds = 25);

// Deterministic helpers for seeded sampling.
Int random_bits(std::mt19937_64& rng, unsigned bits);
Int random_below(std::mt19937_64& rng, const Int& bound);  // uniform-ish [0, bound)

// First point of disagreement found by the differential harness. stage
// names which comparison failed:
//   "batch"              kernel batch matrix/eta vs the exact model
//   "batch-bounds"       aggregate matrix bound or determinant violation
//   "update-fg"          decoded f/g after a batch vs the exact model
//   "update-de"          decoded d/e congruence vs the exact model
//   "iteration-cap"      more than 12 batches
//   "inverse-limb-vs-ref"    final result vs the exact divstep inverse
//   "inverse-limb-vs-egcd"   final result vs extended Euclid
//   "inverse-egcd-vs-fermat" oracle cross-check under a prime modulus
//   "verify"             a verification check fired
struct DifferentialFailure {
  std::string stage;
  int trial = -1;
  int iteration = -1;
  std::string detail;
  Int x;
};

struct BatchCheckStats {
  std::int64_t batches_checked = 0;
  std::int64_t bound_violations = 0;
};

// Replays a traced modinv64_var run against the exact model, batch by
// batch: each aggregate matrix, eta, updated f/g values and d/e
// congruences must match. Returns the first mismatch, if any.
std::optional<DifferentialFailure> verify_iteration_batches(
    const Int& m, const Int& x, const ModinvTrace& trace,
    BatchCheckStats* stats = nullptr);

struct DifferentialReport {
  bool pass = true;
  std::uint64_t seed = 0;
  int trials = 0;
  int checked_inputs = 0;   // trials plus executed corpus entries
  int skipped_inputs = 0;   // corpus entries outside the driver contract
  std::int64_t batches_checked = 0;
  std::int64_t bound_violations = 0;
  int max_outer_iterations = 0;
  std::int64_t max_abs_eta = 0;
  bool modulus_prime = false;
  std::optional<DifferentialFailure> failure;
};

// Fixed adversarial inputs for modulus m: {0, 1, 2, m-1, m-2}, long 0/1
// bit runs, and values that steer intermediate top limbs toward 0/-1.
// Entries with gcd != 1 (possible for composite m) are dropped.
std::vector<Int> adversarial_corpus(const Int& m, int* skipped = nullptr);

// Runs `trials` random inputs plus the corpus under modulus m, comparing
// the limb driver against the exact-model, egcd and (for prime m) Fermat
// routes, and replaying every batch. Stops at the first failure.
DifferentialReport differential_modinv(int trials, const Int& m,
                                       std::uint64_t seed,
                                       bool include_corpus = true);

}  // namespace safegcd::oracles
