#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "closure.hpp"
#include "formula.hpp"
#include "oracle.hpp"
#include "reducer.hpp"

namespace qrl {

/// Claim checks whose failure is recorded as a finding.
enum class FindingKind {
  verdict_mismatch,       // some scan policy's verdict differs from the oracles
  rho_truth_forward,      // F true but rho_z(F) false
  rho_truth_backward,     // rho_z(F) true but F false
  reduced_not_false,      // a reduced formula with clauses evaluates to true
  property_1,             // S(z) holds a complementary pair
  property_2_existential, // property (2) fails with an existential witness
  property_2_universal,   // property (2) fails with a universal witness
  psi_truth,              // F true but psi(F) false
  psi_lemma,              // [S_psi(z)] over surviving clauses escapes C_F(z), F reduced
  psi_reducedness,        // F reduced but psi(F) not reduced
};

inline constexpr std::array<FindingKind, 10> all_finding_kinds{
    FindingKind::verdict_mismatch,       FindingKind::rho_truth_forward,
    FindingKind::rho_truth_backward,     FindingKind::reduced_not_false,
    FindingKind::property_1,             FindingKind::property_2_existential,
    FindingKind::property_2_universal,   FindingKind::psi_truth,
    FindingKind::psi_lemma,              FindingKind::psi_reducedness,
};

inline char const* finding_name(FindingKind k) {
  switch (k) {
  case FindingKind::verdict_mismatch: return "verdict-mismatch";
  case FindingKind::rho_truth_forward: return "rho-truth-forward";
  case FindingKind::rho_truth_backward: return "rho-truth-backward";
  case FindingKind::reduced_not_false: return "reduced-not-false";
  case FindingKind::property_1: return "property-1";
  case FindingKind::property_2_existential: return "property-2-existential";
  case FindingKind::property_2_universal: return "property-2-universal";
  case FindingKind::psi_truth: return "psi-truth";
  case FindingKind::psi_lemma: return "psi-lemma";
  case FindingKind::psi_reducedness: return "psi-reducedness";
  }
  return "unknown";
}

inline std::optional<FindingKind> parse_finding(std::string_view name) {
  for (auto k : all_finding_kinds)
    if (name == finding_name(k)) return k;
  return std::nullopt;
}

inline bool is_psi_finding(FindingKind k) {
  return k == FindingKind::psi_truth || k == FindingKind::psi_lemma || k == FindingKind::psi_reducedness;
}

struct Finding {
  FindingKind kind;
  std::string detail;
};

struct PolicyOutcome {
  ScanPolicy policy;
  bool verdict = false;
  std::size_t steps = 0;
};

struct DiffResult {
  Formula instance;
  bool paper_verdict = false;                 // ascending policy
  std::optional<bool> recursive_verdict;      // nullopt: refused
  std::optional<bool> elimination_verdict;    // nullopt: refused
  std::optional<bool> oracle_verdict;         // nullopt unless both oracles answered
  std::optional<bool> agree;                  // only when oracle_verdict is known
  bool policies_diverge = false;
  std::vector<PolicyOutcome> policy_verdicts;
  std::vector<PropertyReport> property_violations;
  std::vector<Finding> findings;
  std::size_t redundant_root_literals = 0;

  bool has(FindingKind k) const {
    return std::any_of(findings.begin(), findings.end(), [&](Finding const& f) { return f.kind == k; });
  }

  /// Distinct finding kinds in enum order.
  std::vector<FindingKind> kinds() const {
    std::vector<FindingKind> out;
    for (auto k : all_finding_kinds)
      if (has(k)) out.push_back(k);
    return out;
  }
};

/// Ascending, descending and three seeded random scan orders.
inline std::vector<ScanPolicy> standard_policies() {
  return {ScanPolicy::ascending(), ScanPolicy::descending(), ScanPolicy::seeded_random(1),
          ScanPolicy::seeded_random(2), ScanPolicy::seeded_random(3)};
}

namespace detail {

inline void property_findings(Formula const& f, DiffResult& out) {
  ClosureEngine engine(f);
  bool p1 = false, p2e = false, p2a = false;
  for (auto v : f.occurring_vars()) {
    for (bool positive : {true, false}) {
      Literal const z(v, positive);
      auto const c = engine.closure(z);
      auto r1 = check_property_1(c);
      if (!r1.holds()) {
        r1.witness_quantifier = f.prefix().quantifier(r1.witness->var());
        out.property_violations.push_back(r1);
        if (!p1) out.findings.push_back({FindingKind::property_1, "pivot " + z.to_string()});
        p1 = true;
      }
      auto const r2 = check_property_2(f, c);
      if (!r2.holds()) {
        out.property_violations.push_back(r2);
        bool const universal = r2.witness_quantifier == Quantifier::universal;
        auto& seen = universal ? p2a : p2e;
        if (!seen)
          out.findings.push_back({universal ? FindingKind::property_2_universal
                                            : FindingKind::property_2_existential,
                                  "pivot " + z.to_string() + ", witness " + r2.witness->to_string()});
        seen = true;
      }
    }
  }
}

inline bool has_property_finding(Formula const& f, FindingKind kind) {
  DiffResult scratch;
  property_findings(f, scratch);
  return scratch.has(kind);
}

/// Every redundant literal at the root, with the truth of rho_z(F).
inline void rho_findings(Formula const& f, bool root_value, OracleLimits const& limits, DiffResult& out) {
  ClosureEngine engine(f);
  bool forward = false, backward = false;
  for (auto v : f.occurring_vars()) {
    for (bool positive : {true, false}) {
      Literal const z(v, positive);
      if (!engine.is_redundant(z)) continue;
      ++out.redundant_root_literals;
      auto const reduced = apply_rho_detailed(engine, z).result;
      bool const value = eval_recursive(reduced, limits).value;
      if (root_value && !value && !forward) {
        out.findings.push_back({FindingKind::rho_truth_forward, "z = " + z.to_string()});
        forward = true;
      }
      if (!root_value && value && !backward) {
        out.findings.push_back({FindingKind::rho_truth_backward, "z = " + z.to_string()});
        backward = true;
      }
    }
  }
}

} // namespace detail

/// Decide under every standard policy, evaluate both oracles, and run all
/// claim checks that apply to the instance. Oracle refusals are recorded; an
/// oracle disagreement is an InvariantError.
inline DiffResult run_differential(Formula const& f, OracleLimits const& limits = {}) {
  DiffResult r;
  r.instance = f;

  std::vector<ReductionTrace> traces;
  for (auto const& policy : standard_policies()) {
    traces.push_back(decide(f, {policy, false}));
    r.policy_verdicts.push_back({policy, traces.back().verdict, traces.back().steps.size()});
  }
  r.paper_verdict = r.policy_verdicts.front().verdict;
  r.policies_diverge = std::any_of(r.policy_verdicts.begin(), r.policy_verdicts.end(),
                                   [&](PolicyOutcome const& p) { return p.verdict != r.paper_verdict; });

  try {
    r.recursive_verdict = eval_recursive(f, limits).value;
  } catch (OracleRefusal const&) {
  }
  try {
    r.elimination_verdict = eval_elimination(f, limits).value;
  } catch (OracleRefusal const&) {
  }
  if (r.recursive_verdict && r.elimination_verdict) {
    if (*r.recursive_verdict != *r.elimination_verdict)
      throw InvariantError("oracles disagree on an instance");
    r.oracle_verdict = r.recursive_verdict;
  }

  if (r.oracle_verdict) {
    r.agree = std::all_of(r.policy_verdicts.begin(), r.policy_verdicts.end(),
                          [&](PolicyOutcome const& p) { return p.verdict == *r.oracle_verdict; });
    if (!*r.agree) {
      std::string detail;
      for (auto const& p : r.policy_verdicts)
        if (p.verdict != *r.oracle_verdict) detail += (detail.empty() ? "" : ",") + p.policy.name();
      r.findings.push_back({FindingKind::verdict_mismatch, detail});
    }
  }

  detail::property_findings(f, r);

  if (r.oracle_verdict) {
    detail::rho_findings(f, *r.oracle_verdict, limits, r);
    for (auto const& t : traces) {
      if (t.final_formula.num_clauses() == 0) continue;
      if (eval_recursive(t.final_formula, limits).value) {
        r.findings.push_back({FindingKind::reduced_not_false, "policy " + t.policy.name()});
        break;
      }
    }
  }

  std::stable_sort(r.findings.begin(), r.findings.end(),
                   [](Finding const& a, Finding const& b) { return a.kind < b.kind; });
  return r;
}

/// Outcome of the psi construction checks on one instance. The formula is
/// pruned first so the innermost prefix variable occurs; nullopt when the
/// construction's preconditions still fail.
inline std::optional<PsiLemmaReport> run_psi_check(Formula const& f, OracleLimits const& limits = {}) {
  auto const g = prune_prefix(f);
  if (g.prefix().empty()) return std::nullopt;
  auto const x = g.prefix().innermost().var;
  for (auto const& c : g.clauses())
    if (c.is_tautology_on(x)) return std::nullopt;
  return check_psi_lemma(g, limits);
}

inline std::vector<FindingKind> psi_finding_kinds(PsiLemmaReport const& r) {
  std::vector<FindingKind> out;
  if (!r.truth_preserved()) out.push_back(FindingKind::psi_truth);
  if (r.in_claim_context() && !r.lemma_surviving) out.push_back(FindingKind::psi_lemma);
  if (r.in_claim_context() && !r.psi_reduced) out.push_back(FindingKind::psi_reducedness);
  return out;
}

/// Recompute only what is needed to decide whether `f` exhibits `kind`.
/// Agrees with run_differential / run_psi_check on every formula within the
/// oracle limits; used as the shrinking predicate and for bank validation.
inline bool has_finding(Formula const& f, FindingKind kind, OracleLimits const& limits = {}) {
  switch (kind) {
  case FindingKind::verdict_mismatch: {
    bool const truth = eval_recursive(f, limits).value;
    for (auto const& policy : standard_policies())
      if (decide(f, {policy, false}).verdict != truth) return true;
    return false;
  }
  case FindingKind::rho_truth_forward:
  case FindingKind::rho_truth_backward: {
    DiffResult scratch;
    detail::rho_findings(f, eval_recursive(f, limits).value, limits, scratch);
    return scratch.has(kind);
  }
  case FindingKind::reduced_not_false:
    for (auto const& policy : standard_policies()) {
      auto const t = decide(f, {policy, false});
      if (t.final_formula.num_clauses() > 0 && eval_recursive(t.final_formula, limits).value) return true;
    }
    return false;
  case FindingKind::property_1:
  case FindingKind::property_2_existential:
  case FindingKind::property_2_universal: return detail::has_property_finding(f, kind);
  case FindingKind::psi_truth:
  case FindingKind::psi_lemma:
  case FindingKind::psi_reducedness: {
    auto const r = run_psi_check(f, limits);
    if (!r) return false;
    auto const kinds = psi_finding_kinds(*r);
    return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
  }
  }
  return false;
}

} // namespace qrl
