// SPDX-License-Identifier: MIT
#pragma once

#include <string>

#include "safegcd/modinv64.hpp"
#include "safegcd/oracles.hpp"

namespace safegcd::selftest {
struct CriterionResult;
}

namespace safegcd::jsonio {

// JSON renderings used by the CLI. 64-bit register words appear as
// 16-digit hex strings; small counters and eta are plain numbers.
std::string batch_record_json(const BatchTraceRecord& rec);
std::string iteration_record_json(const ModinvIterationRecord& rec,
                                  bool include_batch);
std::string differential_report_json(const oracles::DifferentialReport& rep);
std::string criterion_result_json(const selftest::CriterionResult& res);

}  // namespace safegcd::jsonio
