// SPDX-License-Identifier: MIT
#include <array>
#include <chrono>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "safegcd/divsteps62.hpp"
#include "safegcd/json_io.hpp"
#include "safegcd/modinv64.hpp"
#include "safegcd/oracles.hpp"
#include "safegcd/refmath.hpp"
#include "safegcd/selftest.hpp"
#include "safegcd/signed62.hpp"
#include "safegcd/verify.hpp"

namespace {

using safegcd::Int;

// Bad input that should surface as exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Int parse_hex_arg(const std::string& text, const char* what) {
  const auto v = safegcd::parse_hex(text);
  if (!v) throw UsageError(std::string(what) + " is not valid hex");
  return *v;
}

void validate_modulus(const Int& m) {
  if (m < 3 || !safegcd::is_odd(m)) throw UsageError("modulus must be odd and >= 3");
  if (m >= Int(1) << 256) throw UsageError("modulus must be below 2^256");
}

struct InverseArgs {
  std::string mod_hex;
  std::string value_hex;
  bool json = false;
  bool verify = false;
};

int cmd_modinv(const InverseArgs& args) {
  const Int m = parse_hex_arg(args.mod_hex, "--mod");
  const Int x = parse_hex_arg(args.value_hex, "--value");
  validate_modulus(m);
  if (x >= m) throw UsageError("value must be below the modulus");

  if (x != 0) {
    const auto inv = safegcd::oracles::modinv_egcd(x, m);
    if (!inv) {
      const Int g = safegcd::oracles::egcd(x, m).g;
      std::cerr << "error: value is not invertible mod the given modulus (gcd = "
                << safegcd::format_hex(g) << ")\n";
      return 1;
    }
  }

  safegcd::VerifyGuard guard(args.verify);
  const safegcd::ModInfo mi = safegcd::make_modinfo(m);
  const safegcd::Signed62 result = safegcd::modinv64_var(safegcd::encode(x), mi);
  const Int inverse = safegcd::decode(result);

  if (args.json) {
    std::cout << "{\"modulus\":\"" << safegcd::format_hex(m) << "\",\"value\":\""
              << safegcd::format_hex(x) << "\",\"inverse\":\""
              << safegcd::format_hex(inverse) << "\"}\n";
  } else {
    std::cout << safegcd::format_hex(inverse) << "\n";
  }
  return 0;
}

void print_limbs(std::ostream& os, const char* name, const safegcd::Signed62& v,
                 int len) {
  os << "  " << name << ":";
  for (int i = 0; i < len; ++i) {
    os << " " << safegcd::format_hex_u64(static_cast<std::uint64_t>(v.limbs[i]));
  }
  os << "\n";
}

int cmd_trace(const InverseArgs& args) {
  const Int m = parse_hex_arg(args.mod_hex, "--mod");
  const Int x = parse_hex_arg(args.value_hex, "--value");
  validate_modulus(m);
  if (x >= m) throw UsageError("value must be below the modulus");
  if (x != 0 && !safegcd::oracles::modinv_egcd(x, m)) {
    const Int g = safegcd::oracles::egcd(x, m).g;
    std::cerr << "error: value is not invertible mod the given modulus (gcd = "
              << safegcd::format_hex(g) << ")\n";
    return 1;
  }

  safegcd::VerifyGuard guard(args.verify);
  const safegcd::ModInfo mi = safegcd::make_modinfo(m);
  safegcd::ModinvTrace trace;
  trace.capture_batch = true;
  safegcd::ModinvStats stats;
  const safegcd::Signed62 result =
      safegcd::modinv64_var(safegcd::encode(x), mi, &stats, &trace);
  const Int inverse = safegcd::decode(result);

  if (args.json) {
    std::cout << "{\"modulus\":\"" << safegcd::format_hex(m) << "\",\"value\":\""
              << safegcd::format_hex(x) << "\",\"inverse\":\""
              << safegcd::format_hex(inverse)
              << "\",\"outer_iterations\":" << stats.outer_iterations
              << ",\"max_abs_eta\":" << stats.max_abs_eta << ",\"iterations\":[";
    for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
      if (i) std::cout << ",";
      std::cout << safegcd::jsonio::iteration_record_json(trace.iterations[i], true);
    }
    std::cout << "]}\n";
    return 0;
  }

  std::cout << "modulus " << safegcd::format_hex(m) << "\nvalue   "
            << safegcd::format_hex(x) << "\n";
  for (const auto& rec : trace.iterations) {
    std::cout << "iteration " << rec.iteration << ": eta " << rec.eta_in
              << " -> " << rec.eta_out << ", len " << rec.len_in << " -> "
              << rec.len_out << (rec.g_zero ? ", g = 0" : "") << "\n";
    std::cout << "  t: u=" << rec.t.u << " v=" << rec.t.v << " q=" << rec.t.q
              << " r=" << rec.t.r << "\n";
    print_limbs(std::cout, "f", rec.f_after, rec.len_in);
    print_limbs(std::cout, "g", rec.g_after, rec.len_in);
    print_limbs(std::cout, "d", rec.d_after, safegcd::kLimbCount);
    print_limbs(std::cout, "e", rec.e_after, safegcd::kLimbCount);
    std::cout << "  batch:\n";
    for (const auto& b : rec.batch.records) {
      std::cout << "    i=" << b.i << " j=" << b.j << " eta=" << b.eta
                << " f=" << safegcd::format_hex_u64(b.f)
                << " g=" << safegcd::format_hex_u64(b.g)
                << " u=" << safegcd::format_hex_u64(b.u)
                << " v=" << safegcd::format_hex_u64(b.v)
                << " q=" << safegcd::format_hex_u64(b.q)
                << " r=" << safegcd::format_hex_u64(b.r) << " zeros=" << b.zeros
                << " limit=" << b.limit
                << " mask=" << safegcd::format_hex_u64(b.mask)
                << " w=" << safegcd::format_hex_u64(b.w) << "\n";
    }
  }
  std::cout << "inverse " << safegcd::format_hex(inverse) << "\n";
  return 0;
}

std::array<std::uint8_t, 64> corrupted_ctz_table() {
  // Correct table with two entries swapped: ctz becomes wrong for some
  // inputs while staying in range.
  std::array<std::uint8_t, 64> table{};
  const std::uint64_t debruijn = 0x022FDD63CC95386DULL;
  for (int i = 0; i < 64; ++i) {
    table[(debruijn << i) >> 58] = static_cast<std::uint8_t>(i);
  }
  std::swap(table[3], table[7]);
  return table;
}

int cmd_selftest(int trials, std::uint64_t seed, bool json, bool inject_fault) {
  static std::array<std::uint8_t, 64> bad_table;
  if (inject_fault) {
    bad_table = corrupted_ctz_table();
    safegcd::detail::set_ctz_table_override(bad_table.data());
  }

  safegcd::selftest::Options opts;
  if (trials >= 0) {
    opts = safegcd::selftest::Options::scaled(trials, seed);
  } else {
    opts.seed = seed;
  }

  const auto results =
      safegcd::selftest::run_all(opts, json ? nullptr : &std::cout);
  safegcd::detail::set_ctz_table_override(nullptr);

  bool all_pass = true;
  for (const auto& r : results) all_pass = all_pass && r.pass;

  if (json) {
    std::cout << "[";
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (i) std::cout << ",";
      std::cout << safegcd::jsonio::criterion_result_json(results[i]);
    }
    std::cout << "]\n";
  } else {
    std::cout << (all_pass ? "selftest: all criteria passed"
                           : "selftest: FAILURES present")
              << "\n";
  }
  return all_pass ? 0 : 1;
}

int cmd_bench(const std::string& mod_hex, int trials, std::uint64_t seed) {
  const Int m = mod_hex.empty()
                    ? *safegcd::parse_hex(safegcd::selftest::kSecp256k1PrimeHex)
                    : parse_hex_arg(mod_hex, "--mod");
  validate_modulus(m);
  if (trials < 1) throw UsageError("--trials must be at least 1");

  std::mt19937_64 rng(seed);
  std::vector<Int> xs;
  std::vector<safegcd::Signed62> enc;
  xs.reserve(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) {
    Int x = safegcd::oracles::random_below(rng, m);
    while (x == 0 || boost::multiprecision::gcd(x, m) != 1) {
      x = safegcd::oracles::random_below(rng, m);
    }
    enc.push_back(safegcd::encode(x));
    xs.push_back(std::move(x));
  }
  const safegcd::ModInfo mi = safegcd::make_modinfo(m);
  const bool prime = safegcd::oracles::is_probable_prime(m);

  using Clock = std::chrono::steady_clock;
  const auto report = [&](const char* name, double secs, std::uint64_t checksum) {
    std::cout << name << ": " << trials << " ops in " << secs * 1e3 << " ms ("
              << secs / trials * 1e9 << " ns/op), checksum "
              << safegcd::format_hex_u64(checksum) << "\n";
  };

  {
    std::uint64_t checksum = 0;
    const auto t0 = Clock::now();
    for (const auto& x : enc) {
      const safegcd::Signed62 r = safegcd::modinv64_var(x, mi);
      checksum ^= static_cast<std::uint64_t>(r.limbs[0]);
    }
    report("modinv64_var   ", std::chrono::duration<double>(Clock::now() - t0).count(),
           checksum);
  }
  {
    std::uint64_t checksum = 0;
    const auto t0 = Clock::now();
    for (const auto& x : xs) {
      const Int r = safegcd::refmath::modinv_ref(x, m);
      checksum ^= Int(r & 0x3FFFFFFFFFFFFFFFULL).convert_to<std::uint64_t>();
    }
    report("modinv_ref     ", std::chrono::duration<double>(Clock::now() - t0).count(),
           checksum);
  }
  {
    std::uint64_t checksum = 0;
    const auto t0 = Clock::now();
    for (const auto& x : xs) {
      const Int r = *safegcd::oracles::modinv_egcd(x, m);
      checksum ^= Int(r & 0x3FFFFFFFFFFFFFFFULL).convert_to<std::uint64_t>();
    }
    report("modinv_egcd    ", std::chrono::duration<double>(Clock::now() - t0).count(),
           checksum);
  }
  if (prime) {
    std::uint64_t checksum = 0;
    const auto t0 = Clock::now();
    for (const auto& x : xs) {
      const Int r = safegcd::oracles::modinv_fermat(x, m);
      checksum ^= Int(r & 0x3FFFFFFFFFFFFFFFULL).convert_to<std::uint64_t>();
    }
    report("modinv_fermat  ", std::chrono::duration<double>(Clock::now() - t0).count(),
           checksum);
  }
  std::cout << "matching checksums mean all routes agreed on every input\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"safegcd: variable-time modular inverse via batched divsteps"};
  app.require_subcommand(1);

  InverseArgs modinv_args;
  auto* modinv = app.add_subcommand("modinv", "Compute value^-1 mod modulus");
  modinv->add_option("--mod", modinv_args.mod_hex, "odd modulus, big-endian hex")
      ->required();
  modinv->add_option("--value", modinv_args.value_hex, "value in [0, mod), hex")
      ->required();
  modinv->add_flag("--json", modinv_args.json, "emit JSON");
  modinv->add_flag("--verify", modinv_args.verify, "enable verification checks");

  InverseArgs trace_args;
  auto* trace = app.add_subcommand(
      "trace-divsteps", "Invert and dump per-iteration divstep records");
  trace->add_option("--mod", trace_args.mod_hex, "odd modulus, big-endian hex")
      ->required();
  trace->add_option("--value", trace_args.value_hex, "value in [0, mod), hex")
      ->required();
  trace->add_flag("--json", trace_args.json, "emit JSON");
  trace->add_flag("--verify", trace_args.verify, "enable verification checks");

  int st_trials = -1;
  std::uint64_t st_seed = safegcd::selftest::Options{}.seed;
  bool st_json = false;
  bool st_fault = false;
  auto* selftest =
      app.add_subcommand("selftest", "Run the acceptance criteria suite");
  selftest->add_option("--trials", st_trials,
                       "scale randomized trial counts (default: full suite)");
  selftest->add_option("--seed", st_seed, "seed for randomized trials");
  selftest->add_flag("--json", st_json, "emit JSON");
  selftest->add_flag("--inject-ctz-fault", st_fault,
                     "corrupt the ctz table first (the suite must then fail)");

  std::string bench_mod;
  int bench_trials = 500;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "Time the inverse routes");
  bench->add_option("--mod", bench_mod, "odd modulus, hex (default: secp256k1 prime)");
  bench->add_option("--trials", bench_trials, "number of inversions per route");
  bench->add_option("--seed", bench_seed, "input generation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (modinv->parsed()) return cmd_modinv(modinv_args);
    if (trace->parsed()) return cmd_trace(trace_args);
    if (selftest->parsed()) return cmd_selftest(st_trials, st_seed, st_json, st_fault);
    if (bench->parsed()) return cmd_bench(bench_mod, bench_trials, bench_seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const safegcd::VerifyError& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 1;
  } catch (const safegcd::refmath::NotInvertibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
