#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "bank.hpp"
#include "differential.hpp"
#include "generator.hpp"
#include "oracle.hpp"
#include "shrink.hpp"

namespace qrl {

struct CampaignOptions {
  GenParams params;
  std::size_t count = 0;
  std::size_t workers = 1;
  std::optional<std::filesystem::path> bank;
  OracleLimits limits;
  bool shrink = true;
};

/// One banked counterexample produced from instance `index` for `kind`.
struct FindingRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  FindingKind kind{};
  std::string hash;            // of the shrunk, persisted instance
  std::string original_hash;   // of the generated instance
  std::vector<std::string> violated_invariants;   // of the shrunk instance
  std::optional<bool> oracle_verdict;              // of the shrunk instance

  friend bool operator==(FindingRecord const&, FindingRecord const&) = default;
};

namespace detail {

/// Runs fn(i) for i in [0, count) on `workers` threads. The first exception
/// thrown by any call is rethrown after all threads finish.
template <class Fn>
void for_each_index(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (;;) {
        auto const i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

inline GenParams instance_params(GenParams const& base, std::size_t index) {
  auto p = base;
  p.seed = base.seed + index;
  return p;
}

struct ShrunkFinding {
  FindingKind kind{};
  Formula formula;
  std::vector<std::string> violated;
  bool paper_verdict = false;
  std::optional<bool> oracle_verdict;
};

struct Percentiles {
  double p50 = 0, p90 = 0, p99 = 0, max = 0;
};

inline Percentiles percentiles(std::vector<double> v) {
  Percentiles p;
  if (v.empty()) return p;
  std::sort(v.begin(), v.end());
  auto at = [&](double q) { return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))]; };
  p.p50 = at(0.5);
  p.p90 = at(0.9);
  p.p99 = at(0.99);
  p.max = v.back();
  return p;
}

inline nlohmann::ordered_json timing_json(std::vector<double> const& ms, double wall) {
  auto const p = percentiles(ms);
  nlohmann::ordered_json t;
  t["wall_seconds"] = wall;
  t["instance_ms"] = {{"p50", p.p50}, {"p90", p.p90}, {"p99", p.p99}, {"max", p.max}};
  return t;
}

inline std::vector<std::string> names_of(std::vector<FindingKind> const& kinds) {
  std::vector<std::string> out;
  for (auto k : kinds) out.emplace_back(finding_name(k));
  return out;
}

/// Persist shrunk findings of one instance in order; returns their records.
inline void persist_findings(CampaignOptions const& options, std::size_t index, Formula const& original,
                             std::vector<ShrunkFinding> const& shrunk, std::optional<CounterexampleBank> const& bank,
                             std::vector<FindingRecord>& out) {
  if (shrunk.empty()) return;
  auto const params = instance_params(options.params, index);
  auto const original_hash = formula_hash(original);
  for (auto const& s : shrunk) {
    CounterexampleMeta meta;
    meta.seed = params.seed;
    meta.params = params.to_json();
    meta.paper_verdict = s.paper_verdict;
    meta.oracle_verdict = s.oracle_verdict;
    meta.violated_invariants = s.violated;
    meta.shrunk_from = original_hash;
    auto const hash = bank ? bank->persist(s.formula, meta) : formula_hash(s.formula);
    out.push_back({index, params.seed, s.kind, hash, original_hash, s.violated, s.oracle_verdict});
  }
}

inline ShrinkPredicate finding_predicate(FindingKind kind, OracleLimits const& limits) {
  return [kind, limits](Formula const& g) {
    try {
      return has_finding(g, kind, limits);
    } catch (OracleRefusal const&) {
      return false;
    }
  };
}

} // namespace detail

struct FuzzReport {
  GenParams params;
  std::size_t count = 0;
  std::size_t instances = 0;
  std::size_t refusals = 0;
  std::size_t agreements = 0;
  std::size_t disagreements = 0;
  std::size_t policy_divergence = 0;
  std::size_t clean = 0;
  std::size_t with_findings = 0;
  std::size_t redundant_root_literals = 0;
  std::vector<std::pair<FindingKind, std::size_t>> per_invariant;   // instances per kind
  std::vector<FindingRecord> findings;
  std::vector<double> instance_ms;
  double wall_seconds = 0;

  std::size_t count_of(FindingKind k) const {
    for (auto const& [kind, n] : per_invariant)
      if (kind == k) return n;
    return 0;
  }

  /// Agreement over instances where both oracles answered.
  double agreement_rate() const {
    auto const decided = instances - refusals;
    return decided == 0 ? 0.0 : static_cast<double>(agreements) / static_cast<double>(decided);
  }

  /// qrl-report/1. Everything except the "timing" member is a deterministic
  /// function of (params, count).
  nlohmann::ordered_json to_json(bool with_timing = true) const {
    nlohmann::ordered_json j;
    j["schema"] = "qrl-report/1";
    j["params"] = params.to_json();
    j["count"] = count;
    j["instances"] = instances;
    j["refusals"] = refusals;
    j["agreements"] = agreements;
    j["disagreements"] = disagreements;
    j["agreement_rate"] = agreement_rate();
    j["policy_divergence"] = policy_divergence;
    j["clean_instances"] = clean;
    j["instances_with_findings"] = with_findings;
    j["redundant_root_literals"] = redundant_root_literals;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (auto const& [kind, n] : per_invariant) per[finding_name(kind)] = n;
    j["per_invariant"] = per;
    auto arr = nlohmann::ordered_json::array();
    for (auto const& f : findings) {
      nlohmann::ordered_json e;
      e["index"] = f.index;
      e["seed"] = f.seed;
      e["invariant"] = finding_name(f.kind);
      e["hash"] = f.hash;
      e["shrunk_from"] = f.original_hash;
      arr.push_back(std::move(e));
    }
    j["findings"] = std::move(arr);
    if (with_timing) j["timing"] = detail::timing_json(instance_ms, wall_seconds);
    return j;
  }
};

/// Differential campaign over instances seed+0 .. seed+count-1. Findings are
/// shrunk on the workers and persisted afterwards in instance order, so the
/// report and the bank contents do not depend on `workers`.
inline FuzzReport campaign(CampaignOptions const& options) {
  if (options.count > 0) options.params.check();
  auto const start = std::chrono::steady_clock::now();

  struct Outcome {
    bool refused = false;
    bool agree = false;
    bool diverge = false;
    std::size_t redundant = 0;
    std::vector<FindingKind> kinds;
    std::optional<Formula> original;
    std::vector<detail::ShrunkFinding> shrunk;
    double ms = 0;
  };
  std::vector<Outcome> outcomes(options.count);

  detail::for_each_index(options.count, options.workers, [&](std::size_t i) {
    auto const t0 = std::chrono::steady_clock::now();
    auto const f = gen_random(detail::instance_params(options.params, i));
    auto const r = run_differential(f, options.limits);
    auto& o = outcomes[i];
    o.refused = !r.oracle_verdict.has_value();
    o.agree = r.agree.value_or(false);
    o.diverge = r.policies_diverge;
    o.redundant = r.redundant_root_literals;
    o.kinds = r.kinds();
    if (!o.kinds.empty()) {
      o.original = f;
      for (auto k : o.kinds) {
        detail::ShrunkFinding s;
        s.kind = k;
        s.formula = options.shrink ? shrink(f, detail::finding_predicate(k, options.limits)) : f;
        auto const sr = run_differential(s.formula, options.limits);
        s.violated = detail::names_of(sr.kinds());
        s.paper_verdict = sr.paper_verdict;
        s.oracle_verdict = sr.oracle_verdict;
        o.shrunk.push_back(std::move(s));
      }
    }
    o.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  FuzzReport report;
  report.params = options.params;
  report.count = options.count;
  for (auto k : all_finding_kinds)
    if (!is_psi_finding(k)) report.per_invariant.emplace_back(k, 0);

  std::optional<CounterexampleBank> bank;
  if (options.bank && options.count > 0) bank.emplace(*options.bank);

  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto const& o = outcomes[i];
    ++report.instances;
    if (o.refused) ++report.refusals;
    else if (o.agree) ++report.agreements;
    else ++report.disagreements;
    if (o.diverge) ++report.policy_divergence;
    report.redundant_root_literals += o.redundant;
    if (o.kinds.empty()) ++report.clean;
    else ++report.with_findings;
    for (auto k : o.kinds)
      for (auto& [kind, n] : report.per_invariant)
        if (kind == k) ++n;
    if (o.original) detail::persist_findings(options, i, *o.original, o.shrunk, bank, report.findings);
    report.instance_ms.push_back(o.ms);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

struct PsiReport {
  GenParams params;
  std::size_t count = 0;
  std::size_t instances = 0;
  std::size_t skipped = 0;                    // construction preconditions fail
  std::size_t truth_holds = 0;                // phi true and psi true
  std::size_t truth_vacuous = 0;              // phi false
  std::size_t truth_violations = 0;
  std::size_t phi_reduced = 0;
  std::size_t claim_context = 0;              // phi reduced with at least one clause
  std::size_t lemma_surviving_violations = 0; // over all evaluated instances
  std::size_t lemma_surviving_violations_in_context = 0;
  std::size_t lemma_full_violations = 0;
  std::size_t lemma_full_violations_in_context = 0;
  std::size_t reducedness_holds = 0;          // phi reduced and psi reduced
  std::size_t reducedness_violations = 0;     // phi reduced, psi not
  std::vector<FindingRecord> findings;
  std::vector<double> instance_ms;
  double wall_seconds = 0;

  nlohmann::ordered_json to_json(bool with_timing = true) const {
    nlohmann::ordered_json j;
    j["schema"] = "qrl-psi-report/1";
    j["params"] = params.to_json();
    j["count"] = count;
    j["instances"] = instances;
    j["skipped_precondition"] = skipped;
    j["truth_preservation"] = {{"holds", truth_holds}, {"vacuous", truth_vacuous}, {"violated", truth_violations}};
    j["lemma_surviving"] = {{"violated", lemma_surviving_violations},
                            {"violated_reduced_phi", lemma_surviving_violations_in_context}};
    j["lemma_full"] = {{"violated", lemma_full_violations},
                       {"violated_reduced_phi", lemma_full_violations_in_context}};
    j["reducedness"] = {{"phi_reduced", phi_reduced},
                        {"claim_context", claim_context},
                        {"holds", reducedness_holds},
                        {"violated", reducedness_violations}};
    auto arr = nlohmann::ordered_json::array();
    for (auto const& f : findings)
      arr.push_back({{"index", f.index}, {"seed", f.seed}, {"invariant", finding_name(f.kind)},
                     {"hash", f.hash}, {"shrunk_from", f.original_hash}});
    j["findings"] = std::move(arr);
    if (with_timing) j["timing"] = detail::timing_json(instance_ms, wall_seconds);
    return j;
  }
};

/// Campaign over the psi construction checks: truth preservation, the
/// inclusion lemma and preservation of reducedness.
inline PsiReport psi_campaign(CampaignOptions const& options) {
  if (options.count > 0) options.params.check();
  auto const start = std::chrono::steady_clock::now();

  struct Outcome {
    std::optional<PsiLemmaReport> report;
    std::vector<FindingKind> kinds;
    std::optional<Formula> original;
    std::vector<detail::ShrunkFinding> shrunk;
    double ms = 0;
  };
  std::vector<Outcome> outcomes(options.count);

  detail::for_each_index(options.count, options.workers, [&](std::size_t i) {
    auto const t0 = std::chrono::steady_clock::now();
    auto const f = gen_random(detail::instance_params(options.params, i));
    auto& o = outcomes[i];
    o.report = run_psi_check(f, options.limits);
    if (o.report) o.kinds = psi_finding_kinds(*o.report);
    if (!o.kinds.empty()) {
      o.original = f;
      for (auto k : o.kinds) {
        detail::ShrunkFinding s;
        s.kind = k;
        s.formula = options.shrink ? shrink(f, detail::finding_predicate(k, options.limits)) : f;
        auto const sr = run_psi_check(s.formula, options.limits);
        if (sr) s.violated = detail::names_of(psi_finding_kinds(*sr));
        s.paper_verdict = decide(s.formula).verdict;
        auto const rec = eval_recursive(s.formula, options.limits).value;
        auto const elim = eval_elimination(s.formula, options.limits).value;
        if (rec != elim) throw InvariantError("oracles disagree on a shrunk instance");
        s.oracle_verdict = rec;
        o.shrunk.push_back(std::move(s));
      }
    }
    o.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  PsiReport report;
  report.params = options.params;
  report.count = options.count;
  std::optional<CounterexampleBank> bank;
  if (options.bank && options.count > 0) bank.emplace(*options.bank);

  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto const& o = outcomes[i];
    ++report.instances;
    report.instance_ms.push_back(o.ms);
    if (!o.report) {
      ++report.skipped;
      continue;
    }
    auto const& r = *o.report;
    if (!r.phi_true) ++report.truth_vacuous;
    else if (r.psi_true) ++report.truth_holds;
    else ++report.truth_violations;
    if (r.phi_reduced) ++report.phi_reduced;
    if (r.in_claim_context()) {
      ++report.claim_context;
      if (r.psi_reduced) ++report.reducedness_holds;
      else ++report.reducedness_violations;
    }
    if (!r.lemma_surviving) {
      ++report.lemma_surviving_violations;
      if (r.in_claim_context()) ++report.lemma_surviving_violations_in_context;
    }
    if (!r.lemma_full) {
      ++report.lemma_full_violations;
      if (r.in_claim_context()) ++report.lemma_full_violations_in_context;
    }
    if (o.original) detail::persist_findings(options, i, *o.original, o.shrunk, bank, report.findings);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

} // namespace qrl
