// SPDX-License-Identifier: MIT
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace safegcd {

// Arbitrary-precision signed integer used by the reference model and the
// oracles. The limb kernels never touch this type.
using Int = boost::multiprecision::cpp_int;

inline bool is_odd(const Int& x) { return x % 2 != 0; }

}  // namespace safegcd
