// SPDX-License-Identifier: MIT
#include "safegcd/verify.hpp"

#include <atomic>
#include <sstream>

namespace safegcd {

namespace {
std::atomic<bool> g_verify{false};

std::string make_message(const char* cond, const char* file, int line) {
  std::ostringstream os;
  os << "verification failed: " << cond << " at " << file << ":" << line;
  return os.str();
}
}  // namespace

VerifyError::VerifyError(const char* cond, const char* file, int line)
    : std::logic_error(make_message(cond, file, line)) {}

bool verify_enabled() noexcept { return g_verify.load(std::memory_order_relaxed); }

void set_verify(bool on) noexcept { g_verify.store(on, std::memory_order_relaxed); }

namespace detail {
void verify_fail(const char* cond, const char* file, int line) {
  throw VerifyError(cond, file, line);
}
}  // namespace detail

}  // namespace safegcd
