// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace safegcd {

// Thrown by SAFEGCD_VERIFY_CHECK when verification is enabled and a
// condition fails. Deriving from logic_error: a firing check always means
// a broken precondition or a bug, never a data-dependent condition.
class VerifyError : public std::logic_error {
 public:
  VerifyError(const char* cond, const char* file, int line);
};

// Runtime switch for the verification checks. Off by default so the
// library keeps plain variable-time release behavior; tests and the
// --verify CLI flag turn it on.
bool verify_enabled() noexcept;
void set_verify(bool on) noexcept;

// Scoped enable/restore, used by test drivers.
class VerifyGuard {
 public:
  explicit VerifyGuard(bool on) : prev_(verify_enabled()) { set_verify(on); }
  ~VerifyGuard() { set_verify(prev_); }
  VerifyGuard(const VerifyGuard&) = delete;
  VerifyGuard& operator=(const VerifyGuard&) = delete;

 private:
  bool prev_;
};

namespace detail {
[[noreturn]] void verify_fail(const char* cond, const char* file, int line);
}  // namespace detail

}  // namespace safegcd

#define SAFEGCD_VERIFY_CHECK(cond)                                   \
  do {                                                               \
    if (::safegcd::verify_enabled() && !(cond)) {                    \
      ::safegcd::detail::verify_fail(#cond, __FILE__, __LINE__);     \
    }                                                                \
  } while (0)
