#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "closure.hpp"
#include "errors.hpp"
#include "formula.hpp"
#include "random.hpp"

namespace qrl {

/// Order in which find_redundant visits the occurring variables.
struct ScanPolicy {
  enum class Mode { ascending, descending, seeded_random };

  Mode mode = Mode::ascending;
  std::uint64_t seed = 0;

  static ScanPolicy ascending() { return {Mode::ascending, 0}; }
  static ScanPolicy descending() { return {Mode::descending, 0}; }
  static ScanPolicy seeded_random(std::uint64_t seed) { return {Mode::seeded_random, seed}; }

  std::string name() const {
    switch (mode) {
    case Mode::ascending: return "ascending";
    case Mode::descending: return "descending";
    case Mode::seeded_random: return "random:" + std::to_string(seed);
    }
    return "?";
  }

  /// Accepts "ascending", "descending" and "random:<seed>".
  static std::optional<ScanPolicy> parse(std::string const& text) {
    if (text == "ascending" || text == "asc") return ascending();
    if (text == "descending" || text == "desc") return descending();
    if (text.rfind("random:", 0) == 0) {
      try {
        std::size_t used = 0;
        auto const seed = std::stoull(text.substr(7), &used);
        if (used == text.size() - 7) return seeded_random(seed);
      } catch (std::exception const&) {
      }
    }
    return std::nullopt;
  }

  friend bool operator==(ScanPolicy const&, ScanPolicy const&) = default;
};

/// Occurring variables of `f` in the order `policy` visits them at `step`.
/// Ascending is prefix order, outermost first.
inline std::vector<Var> scan_order(Formula const& f, ScanPolicy const& policy, std::size_t step = 0) {
  auto vars = f.occurring_vars();
  switch (policy.mode) {
  case ScanPolicy::Mode::ascending: break;
  case ScanPolicy::Mode::descending: std::reverse(vars.begin(), vars.end()); break;
  case ScanPolicy::Mode::seeded_random: {
    Rng rng(splitmix64(policy.seed) ^ static_cast<std::uint64_t>(step));
    rng.shuffle(std::span<Var>(vars));
    break;
  }
  }
  return vars;
}

inline std::optional<Literal> find_redundant(ClosureEngine& engine, ScanPolicy const& policy,
                                             std::size_t step = 0) {
  for (auto v : scan_order(engine.formula(), policy, step)) {
    for (bool positive : {true, false}) {
      Literal const z(v, positive);
      if (engine.is_redundant(z)) return z;
    }
  }
  return std::nullopt;
}

/// First redundant literal in policy order; nullopt iff `f` is reduced.
inline std::optional<Literal> find_redundant(Formula const& f, ScanPolicy const& policy,
                                             std::size_t step = 0) {
  ClosureEngine engine(f);
  return find_redundant(engine, policy, step);
}

inline bool is_reduced(Formula const& f) { return !find_redundant(f, ScanPolicy::ascending()); }

/// Result of one rho application together with the closure it removed.
struct RhoApplication {
  Formula result;
  ClosureResult removed;       // C(z) for existential z, C(~z) for universal z
  std::size_t literal_deletions = 0;
  bool negation_survived = false;
};

inline RhoApplication apply_rho_detailed(ClosureEngine& engine, Literal z) {
  auto const& f = engine.formula();
  if (!engine.is_redundant(z))
    throw PreconditionError("apply_rho: " + z.to_string() + " is not redundant");

  RhoApplication app;
  if (f.prefix().is_existential(z.var())) {
    app.removed = engine.closure(z);
    app.result = f.without_clauses(app.removed.covered);
  } else {
    app.removed = engine.closure(negate(z));
    auto const remaining = f.without_clauses(app.removed.covered);
    app.literal_deletions = remaining.occurrences()[z].size();
    app.result = remaining.without_literal(z);
    app.negation_survived = !app.result.occurrences()[negate(z)].empty();
  }
  return app;
}

/// rho_z: drop C(z) when z is existential; drop C(~z) and delete z from the
/// remaining clauses when z is universal. The prefix is left untouched.
inline Formula apply_rho(Formula const& f, Literal z) {
  ClosureEngine engine(f);
  return apply_rho_detailed(engine, z).result;
}

/// Drop prefix entries of variables that no longer occur.
inline Formula prune_prefix(Formula const& f) {
  std::vector<PrefixEntry> kept;
  for (auto const& e : f.prefix().entries())
    if (f.occurs(e.var)) kept.push_back(e);
  if (kept.size() == f.prefix().size()) return f;
  return f.with_prefix(Prefix(std::move(kept)));
}

struct ReductionStep {
  Literal chosen;
  Quantifier quantifier = Quantifier::existential;
  std::vector<Literal> s_set;       // the closure whose clauses were removed
  std::vector<ClauseId> covered;    // ids actually removed
  std::size_t literal_deletions = 0;
  std::size_t size_before = 0;
  std::size_t size_after = 0;
  bool negation_survived = false;
};

struct ReductionTrace {
  std::vector<ReductionStep> steps;
  bool verdict = false;
  std::size_t final_clause_count = 0;
  std::size_t initial_size = 0;
  std::size_t initial_vars = 0;
  std::size_t closures_computed = 0;
  std::size_t max_closure_iterations = 0;
  bool stopped_early = false;
  ScanPolicy policy;
  Formula final_formula;
};

struct DecideOptions {
  ScanPolicy policy = ScanPolicy::ascending();
  bool early_exit = false;
};

/// Reduce until no redundant literal remains; TRUE iff no clause survives.
///
/// Structural bounds are checked on every run and reported as InvariantError:
/// strict size decrease per step, at most size(f) steps, closure iterations
/// within closure_iteration_cap, and empty clauses persisting to a FALSE
/// verdict.
inline ReductionTrace decide(Formula const& f, DecideOptions const& options = {}) {
  if (auto const v = validate(f); !v.empty())
    throw PreconditionError("decide: invalid formula: " + v.front().describe());

  ReductionTrace trace;
  trace.policy = options.policy;
  trace.initial_size = size(f);
  trace.initial_vars = f.num_vars();

  Formula current = prune_prefix(f);
  bool saw_empty_clause = false;

  for (std::size_t step = 0;; ++step) {
    auto const empties = static_cast<std::size_t>(
        std::count_if(current.clauses().begin(), current.clauses().end(),
                      [](Clause const& c) { return c.empty(); }));
    saw_empty_clause = saw_empty_clause || empties > 0;
    if (options.early_exit && empties > 0) {
      trace.stopped_early = true;
      break;
    }

    ClosureEngine engine(current);
    auto const z = find_redundant(engine, options.policy, step);
    if (!z) {
      trace.closures_computed += engine.closures_computed();
      trace.max_closure_iterations = std::max(trace.max_closure_iterations, engine.max_iterations());
      break;
    }

    auto app = apply_rho_detailed(engine, *z);
    auto next = prune_prefix(app.result);
    trace.closures_computed += engine.closures_computed();
    trace.max_closure_iterations = std::max(trace.max_closure_iterations, engine.max_iterations());

    ReductionStep s;
    s.chosen = *z;
    s.quantifier = current.prefix().quantifier(z->var());
    s.s_set = std::move(app.removed.s_set);
    s.covered = std::move(app.removed.covered);
    s.literal_deletions = app.literal_deletions;
    s.size_before = size(current);
    s.size_after = size(next);
    s.negation_survived = app.negation_survived;

    if (s.size_after >= s.size_before)
      throw InvariantError("rho_" + z->to_string() + " did not shrink the formula (" +
                           std::to_string(s.size_before) + " -> " + std::to_string(s.size_after) + ")");
    auto const empties_after = static_cast<std::size_t>(
        std::count_if(next.clauses().begin(), next.clauses().end(),
                      [](Clause const& c) { return c.empty(); }));
    if (empties_after < empties)
      throw InvariantError("rho_" + z->to_string() + " removed an empty clause");

    trace.steps.push_back(std::move(s));
    if (trace.steps.size() > trace.initial_size)
      throw InvariantError("decide exceeded size(F) = " + std::to_string(trace.initial_size) + " steps");
    current = std::move(next);
  }

  trace.final_clause_count = current.num_clauses();
  trace.verdict = !trace.stopped_early && current.num_clauses() == 0;
  if (saw_empty_clause && trace.verdict)
    throw InvariantError("an empty clause appeared but the verdict is TRUE");
  if (trace.max_closure_iterations > closure_iteration_cap(trace.initial_vars))
    throw InvariantError("closure iterations exceeded 2 * vars + 1");
  trace.final_formula = std::move(current);
  return trace;
}

} // namespace qrl
