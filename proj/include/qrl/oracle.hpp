#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "closure.hpp"
#include "errors.hpp"
#include "formula.hpp"
#include "reducer.hpp"

namespace qrl {

/// Resource limits for the exponential oracles. A formula over the limits is
/// refused, never answered approximately.
struct OracleLimits {
  std::size_t max_vars = 30;
  std::size_t max_literals = 1'000'000;

  /// The recursive evaluator packs assignments into 64-bit masks.
  static constexpr std::size_t hard_max_vars = 62;

  /// Parses "vars,literals"; returns nullopt on malformed text.
  static std::optional<OracleLimits> parse(std::string const& text) {
    auto const comma = text.find(',');
    if (comma == std::string::npos) return std::nullopt;
    try {
      std::size_t used_a = 0, used_b = 0;
      auto const a = std::stoull(text.substr(0, comma), &used_a);
      auto const rest = text.substr(comma + 1);
      auto const b = std::stoull(rest, &used_b);
      if (used_a != comma || used_b != rest.size()) return std::nullopt;
      return OracleLimits{static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
    } catch (std::exception const&) {
      return std::nullopt;
    }
  }

  /// Defaults overridden by QRL_ORACLE_LIMITS when it is set and well-formed.
  static OracleLimits from_env() {
    if (char const* v = std::getenv("QRL_ORACLE_LIMITS"))
      if (auto parsed = parse(v)) return *parsed;
    return {};
  }
};

enum class OracleMethod { recursive, elimination };

inline char const* method_name(OracleMethod m) {
  return m == OracleMethod::recursive ? "recursive" : "elimination";
}

struct OracleVerdict {
  bool value = false;
  OracleMethod method = OracleMethod::recursive;
  std::uint64_t work = 0;   // expansion nodes or elimination work
};

namespace detail {

struct MaskClause {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

/// Game-tree expansion over the prefix. Bit i of a mask is the variable at
/// prefix position i + 1. Variables absent from every remaining clause are
/// skipped, since both cofactors are identical.
class RecursiveEvaluator {
public:
  RecursiveEvaluator(std::vector<bool> existential, std::size_t max_clauses)
      : existential_(std::move(existential)), levels_(existential_.size() + 1) {
    for (auto& level : levels_) level.reserve(max_clauses);
  }

  bool run(std::span<MaskClause const> clauses) { return eval(0, clauses); }
  std::uint64_t nodes() const { return nodes_; }

private:
  bool eval(std::size_t depth, std::span<MaskClause const> clauses) {
    ++nodes_;
    if (clauses.empty()) return true;
    std::uint64_t used = 0;
    for (auto const& c : clauses) used |= c.pos | c.neg;
    while (depth < existential_.size() && ((used >> depth) & 1u) == 0) ++depth;
    if (depth >= existential_.size()) throw InvariantError("recursive oracle ran out of variables");

    auto const bit = std::uint64_t{1} << depth;
    bool const exists = existential_[depth];
    for (int value = 0; value < 2; ++value) {
      auto& out = levels_[depth];
      out.clear();
      bool conflict = false;
      for (auto const& c : clauses) {
        if (((value != 0 ? c.pos : c.neg) & bit) != 0) continue;
        MaskClause const reduced{c.pos & ~bit, c.neg & ~bit};
        if (reduced.pos == 0 && reduced.neg == 0) {
          conflict = true;
          break;
        }
        out.push_back(reduced);
      }
      bool const r = !conflict && eval(depth + 1, out);
      if (exists && r) return true;
      if (!exists && !r) return false;
    }
    return !exists;
  }

  std::vector<bool> existential_;
  std::vector<std::vector<MaskClause>> levels_;
  std::uint64_t nodes_ = 0;
};

} // namespace detail

/// Exact evaluation by recursive expansion of the prefix: an existential
/// variable is the OR of its cofactors, a universal one the AND.
inline OracleVerdict eval_recursive(Formula const& f, OracleLimits const& limits = {}) {
  auto const& prefix = f.prefix();
  auto const max_vars = std::min(limits.max_vars, OracleLimits::hard_max_vars);
  if (prefix.size() > max_vars)
    throw OracleRefusal("recursive oracle: " + std::to_string(prefix.size()) +
                        " variables exceed the limit of " + std::to_string(max_vars));

  std::vector<bool> existential;
  for (auto const& e : prefix.entries()) existential.push_back(e.quantifier == Quantifier::existential);

  std::vector<detail::MaskClause> clauses;
  clauses.reserve(f.num_clauses());
  bool has_empty = false;
  for (auto const& c : f.clauses()) {
    detail::MaskClause m;
    for (auto u : c.lits) {
      auto const bit = std::uint64_t{1} << (prefix.position(u.var()) - 1);
      (u.positive() ? m.pos : m.neg) |= bit;
    }
    has_empty = has_empty || c.empty();
    clauses.push_back(m);
  }
  if (has_empty) return {false, OracleMethod::recursive, 1};

  detail::RecursiveEvaluator evaluator(std::move(existential), clauses.size());
  bool const value = evaluator.run(clauses);
  return {value, OracleMethod::recursive, evaluator.nodes()};
}

/// Eliminate the innermost variable exactly.
///
/// Existential x: keep clauses without x and add every non-tautological
/// resolvent on x that is not already present. Universal x: delete x and ~x
/// from every clause. Clauses tautological on x are dropped in both cases.
/// Throws OracleRefusal when the result would exceed `literal_budget`.
inline Formula eliminate_innermost(Formula const& f, std::size_t literal_budget = SIZE_MAX) {
  auto const& prefix = f.prefix();
  if (prefix.empty()) throw PreconditionError("eliminate_innermost: empty prefix");
  auto const x = prefix.innermost();
  Literal const pos(x.var, true), neg(x.var, false);

  std::vector<PrefixEntry> entries(prefix.entries().begin(), prefix.entries().end() - 1);
  std::vector<Clause> out;
  std::size_t literals = 0;
  auto charge = [&](std::size_t n) {
    literals += n;
    if (literals > literal_budget)
      throw OracleRefusal("elimination oracle: clause growth exceeds " + std::to_string(literal_budget) +
                          " literals");
  };

  if (x.quantifier == Quantifier::universal) {
    for (auto const& c : f.clauses()) {
      if (c.is_tautology_on(x.var)) continue;
      Clause r = c;
      std::erase_if(r.lits, [&](Literal u) { return u.var() == x.var; });
      charge(r.lits.size());
      out.push_back(std::move(r));
    }
    return Formula(Prefix(std::move(entries)), std::move(out), f.next_id());
  }

  std::vector<Clause const*> with_pos, with_neg;
  std::set<std::vector<Literal>> present;
  for (auto const& c : f.clauses()) {
    bool const p = c.contains(pos), n = c.contains(neg);
    if (p && n) continue;
    if (p) {
      with_pos.push_back(&c);
    } else if (n) {
      with_neg.push_back(&c);
    } else {
      charge(c.lits.size());
      present.insert(c.lits);
      out.push_back(c);
    }
  }

  auto next_id = f.next_id();
  std::vector<Literal> merged;
  for (auto const* p : with_pos) {
    for (auto const* n : with_neg) {
      merged.clear();
      for (auto u : p->lits)
        if (u != pos) merged.push_back(u);
      for (auto u : n->lits)
        if (u != neg) merged.push_back(u);
      auto r = make_clause(ClauseId{next_id}, merged);
      if (r.is_tautology() || present.contains(r.lits)) continue;
      charge(r.lits.size());
      present.insert(r.lits);
      ++next_id;
      out.push_back(std::move(r));
    }
  }
  return Formula(Prefix(std::move(entries)), std::move(out), next_id);
}

/// Exact evaluation by eliminating variables innermost first.
inline OracleVerdict eval_elimination(Formula const& f, OracleLimits const& limits = {}) {
  if (auto const v = validate(f); !v.empty())
    throw MalformedFormula("elimination oracle: " + v.front().describe());
  if (f.num_occurrences() > limits.max_literals)
    throw OracleRefusal("elimination oracle: input exceeds the literal cap");

  OracleVerdict verdict{false, OracleMethod::elimination, 0};
  Formula current = f;
  for (;;) {
    if (current.has_empty_clause()) {
      verdict.value = false;
      return verdict;
    }
    if (current.num_clauses() == 0) {
      verdict.value = true;
      return verdict;
    }
    if (current.prefix().empty())
      throw InvariantError("elimination oracle: clauses remain over an empty prefix");
    current = eliminate_innermost(current, limits.max_literals);
    verdict.work += 1 + current.num_clauses();
  }
}

/// Parent clause ids of one added clause C0_i v C1_j, and its id in psi.
struct PsiResolvent {
  ClauseId negative_parent{};
  ClauseId positive_parent{};
  ClauseId id{};
};

struct PsiResult {
  Formula psi;
  Var pivot_var = 0;
  std::vector<ClauseId> removed;
  std::vector<PsiResolvent> added;   // pairs whose merged clause duplicates an earlier one share its id
  std::vector<ClauseId> survivors;   // original clauses carried over into psi
};

/// Remove the clauses containing the innermost variable x, add every
/// C0_i v C1_j (the negative-side remainder joined with the positive-side
/// remainder), and drop x from the prefix. The same construction is used for
/// both quantifiers.
inline PsiResult build_psi(Formula const& f) {
  auto const& prefix = f.prefix();
  if (prefix.empty()) throw PreconditionError("build_psi: empty prefix");
  auto const x = prefix.innermost().var;
  Literal const pos(x, true), neg(x, false);
  if (!f.occurs(x)) throw PreconditionError("build_psi: innermost variable does not occur");

  PsiResult r;
  r.pivot_var = x;
  std::vector<Clause const*> c0, c1;
  std::vector<Clause> out;
  for (auto const& c : f.clauses()) {
    if (c.is_tautology_on(x)) throw PreconditionError("build_psi: clause tautological on the pivot");
    if (c.contains(pos)) {
      c1.push_back(&c);
      r.removed.push_back(c.id);
    } else if (c.contains(neg)) {
      c0.push_back(&c);
      r.removed.push_back(c.id);
    } else {
      out.push_back(c);
      r.survivors.push_back(c.id);
    }
  }
  std::sort(r.removed.begin(), r.removed.end());

  auto next_id = f.next_id();
  std::vector<std::pair<std::vector<Literal>, ClauseId>> seen;
  for (auto const* a : c0) {
    for (auto const* b : c1) {
      std::vector<Literal> lits;
      for (auto u : a->lits)
        if (u != neg) lits.push_back(u);
      for (auto u : b->lits)
        if (u != pos) lits.push_back(u);
      auto clause = make_clause(ClauseId{next_id}, std::move(lits));
      auto it = std::find_if(seen.begin(), seen.end(),
                             [&](auto const& s) { return s.first == clause.lits; });
      if (it != seen.end()) {
        r.added.push_back({a->id, b->id, it->second});
        continue;
      }
      seen.emplace_back(clause.lits, clause.id);
      r.added.push_back({a->id, b->id, clause.id});
      out.push_back(std::move(clause));
      ++next_id;
    }
  }

  std::vector<PrefixEntry> entries(prefix.entries().begin(), prefix.entries().end() - 1);
  r.psi = Formula(Prefix(std::move(entries)), std::move(out), next_id);
  return r;
}

struct PsiLemmaReport {
  Var pivot_var = 0;
  // (a) [S_psi(z)]_phi inside C_phi(z), restricted to surviving original clauses
  bool lemma_surviving = true;
  std::optional<Literal> lemma_surviving_witness;
  // (a') the same inclusion over all clauses of phi
  bool lemma_full = true;
  std::optional<Literal> lemma_full_witness;
  // (b)
  bool phi_true = false;
  bool psi_true = false;
  // (c)
  bool phi_reduced = false;
  bool psi_reduced = false;
  bool phi_nonempty = false;

  bool truth_preserved() const { return !phi_true || psi_true; }
  bool reducedness_preserved() const { return !phi_reduced || psi_reduced; }
  /// The falsity argument applies to reduced formulas with at least one clause.
  bool in_claim_context() const { return phi_reduced && phi_nonempty; }
};

inline PsiLemmaReport check_psi_lemma(Formula const& f, OracleLimits const& limits = {}) {
  auto const psi = build_psi(f);
  PsiLemmaReport report;
  report.pivot_var = psi.pivot_var;
  report.phi_nonempty = f.num_clauses() > 0;

  ClosureEngine phi_engine(f);
  ClosureEngine psi_engine(psi.psi);
  auto const& survivors = psi.survivors;
  for (auto const& e : psi.psi.prefix().entries()) {
    for (bool positive : {true, false}) {
      Literal const z(e.var, positive);
      auto const s_psi = psi_engine.closure(z);
      auto const c_phi = phi_engine.closure(z);
      for (auto id : clauses_with_any(f, s_psi.s_set)) {
        if (c_phi.covers(id)) continue;
        if (report.lemma_full) {
          report.lemma_full = false;
          report.lemma_full_witness = z;
        }
        if (report.lemma_surviving && std::binary_search(survivors.begin(), survivors.end(), id)) {
          report.lemma_surviving = false;
          report.lemma_surviving_witness = z;
        }
      }
    }
  }

  report.phi_true = eval_recursive(f, limits).value;
  report.psi_true = eval_recursive(psi.psi, limits).value;
  report.phi_reduced = is_reduced(f);
  report.psi_reduced = is_reduced(psi.psi);
  return report;
}

} // namespace qrl
