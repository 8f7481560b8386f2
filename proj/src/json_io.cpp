// SPDX-License-Identifier: MIT
#include "safegcd/json_io.hpp"

#include <json.hpp>

#include "safegcd/selftest.hpp"
#include "safegcd/signed62.hpp"

namespace safegcd::jsonio {

namespace {

using nlohmann::json;

json limbs_hex(const Signed62& v, int len) {
  json arr = json::array();
  for (int i = 0; i < len; ++i) {
    arr.push_back(format_hex_u64(static_cast<std::uint64_t>(v.limbs[i])));
  }
  return arr;
}

json batch_record(const BatchTraceRecord& rec) {
  return json{{"i", rec.i},
              {"j", rec.j},
              {"eta", rec.eta},
              {"f", format_hex_u64(rec.f)},
              {"g", format_hex_u64(rec.g)},
              {"u", format_hex_u64(rec.u)},
              {"v", format_hex_u64(rec.v)},
              {"q", format_hex_u64(rec.q)},
              {"r", format_hex_u64(rec.r)},
              {"zeros", rec.zeros},
              {"limit", rec.limit},
              {"mask", format_hex_u64(rec.mask)},
              {"w", format_hex_u64(rec.w)}};
}

json iteration_record(const ModinvIterationRecord& rec, bool include_batch) {
  json obj{{"iteration", rec.iteration},
           {"eta_in", rec.eta_in},
           {"eta_out", rec.eta_out},
           {"len_in", rec.len_in},
           {"len_out", rec.len_out},
           {"g_zero", rec.g_zero},
           {"t",
            {{"u", rec.t.u}, {"v", rec.t.v}, {"q", rec.t.q}, {"r", rec.t.r}}},
           {"f", limbs_hex(rec.f_after, rec.len_in)},
           {"g", limbs_hex(rec.g_after, rec.len_in)},
           {"d", limbs_hex(rec.d_after, kLimbCount)},
           {"e", limbs_hex(rec.e_after, kLimbCount)}};
  if (include_batch) {
    json steps = json::array();
    for (const auto& b : rec.batch.records) steps.push_back(batch_record(b));
    obj["batch"] = std::move(steps);
  }
  return obj;
}

}  // namespace

std::string batch_record_json(const BatchTraceRecord& rec) {
  return batch_record(rec).dump();
}

std::string iteration_record_json(const ModinvIterationRecord& rec,
                                  bool include_batch) {
  return iteration_record(rec, include_batch).dump();
}

std::string differential_report_json(const oracles::DifferentialReport& rep) {
  json obj{{"pass", rep.pass},
           {"seed", rep.seed},
           {"trials", rep.trials},
           {"checked_inputs", rep.checked_inputs},
           {"skipped_inputs", rep.skipped_inputs},
           {"batches_checked", rep.batches_checked},
           {"bound_violations", rep.bound_violations},
           {"max_outer_iterations", rep.max_outer_iterations},
           {"max_abs_eta", rep.max_abs_eta},
           {"modulus_prime", rep.modulus_prime}};
  if (rep.failure) {
    obj["failure"] = json{{"stage", rep.failure->stage},
                          {"trial", rep.failure->trial},
                          {"iteration", rep.failure->iteration},
                          {"detail", rep.failure->detail},
                          {"x", format_hex(rep.failure->x)}};
  }
  return obj.dump();
}

std::string criterion_result_json(const selftest::CriterionResult& res) {
  return json{{"id", res.id},
              {"name", res.name},
              {"pass", res.pass},
              {"detail", res.detail}}
      .dump();
}

}  // namespace safegcd::jsonio
