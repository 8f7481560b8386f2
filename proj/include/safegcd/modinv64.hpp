// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <vector>

#include "safegcd/divsteps62.hpp"
#include "safegcd/signed62.hpp"

namespace safegcd {

// Aggregate counters for one modinv64_var run.
struct ModinvStats {
  int outer_iterations = 0;    // batches executed (each is 62 divsteps)
  std::int64_t max_abs_eta = 0;  // largest |eta| seen at batch boundaries
};

// Checkpoint of one outer iteration, for diagnostics and the differential
// harness. f/g/d/e are the post-update values; len_in applies to them,
// len_out is after shrinking.
struct ModinvIterationRecord {
  int iteration = 0;
  std::int64_t eta_in = 0;
  std::int64_t eta_out = 0;
  int len_in = 0;
  int len_out = 0;
  Trans2x2 t;
  Signed62 f_after;
  Signed62 g_after;
  Signed62 d_after;
  Signed62 e_after;
  bool g_zero = false;
  BatchTrace batch;  // filled only when capture_batch is set
};

struct ModinvTrace {
  bool capture_batch = false;
  std::vector<ModinvIterationRecord> iterations;
};

// (f', g')^T = t * (f, g)^T / 2^62 on the first len limbs, in place. The
// division is exact for matrices produced from (f.limbs[0], g.limbs[0]);
// verification asserts the low 62 bits vanish and the tops fit.
void update_fg_62_var(int len, Signed62& f, Signed62& g, const Trans2x2& t);

// (d', e')^T = (t * (d, e)^T + (md, me)^T * m) / 2^62 with md, me chosen
// so the division is exact, in place. Uses modulus_inv62 to find the
// cancelling multiples; inputs and outputs lie in (-2m, m). Always runs on
// all kLimbCount limbs.
void update_de_62(Signed62& d, Signed62& e, const Trans2x2& t,
                  const ModInfo& mi);

// Folds top limbs that are pure sign extension (0 or -1 with len > 1)
// into bit 62 of the limb below, returning the new length. Decoded values
// are unchanged.
int shrink_len(Signed62& f, Signed62& g, int len);

// Final reduction: maps d in (-2m, m) to the canonical representative of
// sign(f_top) * d mod m, in [0, m).
void normalize_62(Signed62& d, std::int64_t f_top, const ModInfo& mi);

// Modular inverse of x mod m on the 62-limb representation: x canonical
// in [0, m), m described by mi (odd, 3 <= m < 2^256), and gcd(x, m) = 1
// or x = 0 (which returns 0). Verification asserts the range invariants,
// the 12-batch cap and the final-state conditions; outside verification a
// precondition violation is not detected.
Signed62 modinv64_var(const Signed62& x, const ModInfo& mi,
                      ModinvStats* stats = nullptr,
                      ModinvTrace* trace = nullptr);

}  // namespace safegcd
