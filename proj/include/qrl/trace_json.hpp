#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "reducer.hpp"

namespace qrl {

using ordered_json = nlohmann::ordered_json;

inline constexpr char const* trace_schema = "qrl-trace/1";

inline ordered_json literals_json(std::span<Literal const> lits) {
  auto arr = ordered_json::array();
  for (auto u : lits) arr.push_back(u.to_signed_string());
  return arr;
}

inline ordered_json trace_to_json(ReductionTrace const& trace) {
  ordered_json j;
  j["schema"] = trace_schema;
  j["verdict"] = trace.verdict ? "TRUE" : "FALSE";
  auto steps = ordered_json::array();
  for (auto const& s : trace.steps) {
    ordered_json step;
    step["literal"] = s.chosen.to_signed_string();
    step["quantifier"] = std::string(1, quantifier_letter(s.quantifier));
    step["s_set"] = literals_json(s.s_set);
    auto ids = ordered_json::array();
    for (auto id : s.covered) ids.push_back(to_int(id));
    step["removed_clause_ids"] = std::move(ids);
    step["size_before"] = s.size_before;
    step["size_after"] = s.size_after;
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  j["final_clause_count"] = trace.final_clause_count;
  return j;
}

/// qrl-trace/1 document, two-space indented, trailing newline.
inline std::string write_trace(ReductionTrace const& trace) { return trace_to_json(trace).dump(2) + "\n"; }

} // namespace qrl
