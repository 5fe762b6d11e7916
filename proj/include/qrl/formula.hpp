#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "literal.hpp"

namespace qrl {

enum class ClauseId : std::uint32_t {};

constexpr std::uint32_t to_int(ClauseId id) { return static_cast<std::uint32_t>(id); }

/// A set of literals. Literals are kept sorted by code; `make_clause` also
/// removes duplicates. A raw aggregate may hold duplicates, which `validate`
/// reports.
struct Clause {
  ClauseId id{};
  std::vector<Literal> lits;

  bool empty() const { return lits.empty(); }
  std::size_t width() const { return lits.size(); }

  bool contains(Literal u) const {
    return std::binary_search(lits.begin(), lits.end(), u);
  }

  bool is_tautology() const {
    for (std::size_t i = 1; i < lits.size(); ++i)
      if (lits[i].var() == lits[i - 1].var() && lits[i] != lits[i - 1]) return true;
    return false;
  }

  bool is_tautology_on(Var x) const {
    return contains(Literal(x, true)) && contains(Literal(x, false));
  }

  friend bool operator==(Clause const&, Clause const&) = default;
};

inline Clause make_clause(ClauseId id, std::vector<Literal> lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  return Clause{id, std::move(lits)};
}

struct PrefixEntry {
  Var var = 0;
  Quantifier quantifier = Quantifier::existential;

  friend bool operator==(PrefixEntry const&, PrefixEntry const&) = default;
};

/// Quantifier prefix, outermost first. Positions are 1-based and always
/// contiguous because they are derived from the entry order.
class Prefix {
public:
  Prefix() = default;

  explicit Prefix(std::vector<PrefixEntry> entries) : entries_(std::move(entries)) {
    Var max_var = 0;
    for (auto const& e : entries_) max_var = std::max(max_var, e.var);
    position_.assign(static_cast<std::size_t>(max_var) + 1, 0);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      auto& slot = position_[entries_[i].var];
      if (slot == 0) slot = static_cast<std::uint32_t>(i + 1);
    }
  }

  std::span<PrefixEntry const> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool binds(Var v) const { return v < position_.size() && position_[v] != 0; }

  /// 1-based position of `v`; throws MalformedFormula for unbound variables.
  std::size_t position(Var v) const {
    if (!binds(v))
      throw MalformedFormula("variable " + std::to_string(v) + " is not bound by the prefix");
    return position_[v];
  }

  Quantifier quantifier(Var v) const { return entries_[position(v) - 1].quantifier; }

  bool is_existential(Var v) const { return quantifier(v) == Quantifier::existential; }

  PrefixEntry const& innermost() const {
    if (entries_.empty()) throw PreconditionError("empty prefix has no innermost variable");
    return entries_.back();
  }

  Var max_var() const { return position_.empty() ? 0 : static_cast<Var>(position_.size() - 1); }

  friend bool operator==(Prefix const& a, Prefix const& b) { return a.entries_ == b.entries_; }

private:
  std::vector<PrefixEntry> entries_;
  std::vector<std::uint32_t> position_;
};

/// u <= v iff u's variable is existential or pos(u) <= pos(v). Polarities are
/// irrelevant.
inline bool literal_leq(Literal u, Literal v, Prefix const& p) {
  auto const pu = p.position(u.var());
  auto const pv = p.position(v.var());
  return p.quantifier(u.var()) == Quantifier::existential || pu <= pv;
}

/// Literal -> ids of clauses containing it, ids ascending.
class OccurrenceIndex {
public:
  OccurrenceIndex() = default;

  static OccurrenceIndex build(std::span<Clause const> clauses) {
    OccurrenceIndex index;
    for (auto const& c : clauses)
      for (auto u : c.lits) index.add(u, c.id);
    for (auto& list : index.lists_) std::sort(list.begin(), list.end());
    return index;
  }

  std::span<ClauseId const> operator[](Literal u) const {
    if (u.code() >= lists_.size()) return {};
    return lists_[u.code()];
  }

  void add(Literal u, ClauseId id) {
    if (u.code() >= lists_.size()) lists_.resize(u.code() + 2);
    lists_[u.code()].push_back(id);
  }

  void erase(Literal u) {
    if (u.code() < lists_.size()) lists_[u.code()].clear();
  }

  friend bool operator==(OccurrenceIndex const& a, OccurrenceIndex const& b) {
    auto const n = std::max(a.lists_.size(), b.lists_.size());
    for (std::size_t i = 0; i < n; ++i) {
      auto const la = a[Literal::from_code(static_cast<std::uint32_t>(i))];
      auto const lb = b[Literal::from_code(static_cast<std::uint32_t>(i))];
      if (!std::equal(la.begin(), la.end(), lb.begin(), lb.end())) return false;
    }
    return true;
  }

private:
  std::vector<std::vector<ClauseId>> lists_;
};

/// Prenex CNF formula: prefix, clause matrix in id order, occurrence index.
///
/// Values are never mutated after construction; derivations build new
/// formulas. Surviving clauses keep their ids and new clauses draw ids from
/// `next_id()`, so an id is never reused along a derivation chain.
class Formula {
public:
  Formula() = default;

  Formula(Prefix prefix, std::vector<Clause> clauses, std::optional<std::uint32_t> next_id = {})
      : prefix_(std::move(prefix)), clauses_(std::move(clauses)) {
    std::stable_sort(clauses_.begin(), clauses_.end(),
                     [](Clause const& a, Clause const& b) { return a.id < b.id; });
    for (auto& c : clauses_) std::sort(c.lits.begin(), c.lits.end());
    occ_ = OccurrenceIndex::build(clauses_);
    finish(next_id);
  }

  /// Trusts `occ` as given. Intended for tests that need an inconsistent
  /// index; `validate` reports the mismatch.
  static Formula with_index(Prefix prefix, std::vector<Clause> clauses, OccurrenceIndex occ) {
    Formula f(std::move(prefix), std::move(clauses));
    f.occ_ = std::move(occ);
    return f;
  }

  /// Clauses are numbered 1..m in the given order.
  static Formula from_lists(std::vector<PrefixEntry> prefix,
                            std::vector<std::vector<std::int64_t>> const& clauses) {
    std::vector<Clause> cs;
    cs.reserve(clauses.size());
    std::uint32_t id = 1;
    for (auto const& c : clauses) {
      std::vector<Literal> lits;
      for (auto v : c) lits.push_back(Literal::from_dimacs(v));
      cs.push_back(make_clause(ClauseId{id++}, std::move(lits)));
    }
    return Formula(Prefix(std::move(prefix)), std::move(cs));
  }

  Prefix const& prefix() const { return prefix_; }
  std::span<Clause const> clauses() const { return clauses_; }
  OccurrenceIndex const& occurrences() const { return occ_; }

  std::size_t num_vars() const { return prefix_.size(); }
  std::size_t num_clauses() const { return clauses_.size(); }
  std::size_t num_occurrences() const { return num_occurrences_; }
  std::uint32_t next_id() const { return next_id_; }

  /// Largest variable index in the prefix or the matrix.
  Var max_var() const { return std::max(prefix_.max_var(), max_clause_var_); }

  bool has_empty_clause() const {
    return std::any_of(clauses_.begin(), clauses_.end(), [](Clause const& c) { return c.empty(); });
  }

  std::optional<std::size_t> index_of(ClauseId id) const {
    auto it = std::lower_bound(clauses_.begin(), clauses_.end(), id,
                               [](Clause const& c, ClauseId x) { return c.id < x; });
    if (it == clauses_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - clauses_.begin());
  }

  bool occurs(Var v) const {
    return !occ_[Literal(v, true)].empty() || !occ_[Literal(v, false)].empty();
  }

  /// Prefix variables with at least one occurrence, outermost first.
  std::vector<Var> occurring_vars() const {
    std::vector<Var> out;
    for (auto const& e : prefix_.entries())
      if (occurs(e.var)) out.push_back(e.var);
    return out;
  }

  /// Same prefix; clauses whose ids appear in `ids` (sorted) are dropped.
  Formula without_clauses(std::span<ClauseId const> ids) const {
    std::vector<Clause> kept;
    kept.reserve(clauses_.size());
    for (auto const& c : clauses_)
      if (!std::binary_search(ids.begin(), ids.end(), c.id)) kept.push_back(c);
    return Formula(prefix_, std::move(kept), next_id_);
  }

  /// Same prefix; every occurrence of exactly `u` is deleted.
  Formula without_literal(Literal u) const {
    std::vector<Clause> out(clauses_.begin(), clauses_.end());
    for (auto& c : out) std::erase(c.lits, u);
    return Formula(prefix_, std::move(out), next_id_);
  }

  Formula with_prefix(Prefix p) const { return Formula(std::move(p), clauses_, next_id_); }

  /// Equal prefixes and equal clause literal sequences in order; ids ignored.
  friend bool structurally_equal(Formula const& a, Formula const& b) {
    if (!(a.prefix_ == b.prefix_) || a.clauses_.size() != b.clauses_.size()) return false;
    for (std::size_t i = 0; i < a.clauses_.size(); ++i)
      if (a.clauses_[i].lits != b.clauses_[i].lits) return false;
    return true;
  }

  friend bool operator==(Formula const& a, Formula const& b) {
    return a.prefix_ == b.prefix_ && a.clauses_ == b.clauses_;
  }

private:
  void finish(std::optional<std::uint32_t> next_id) {
    std::uint32_t max_id = 0;
    num_occurrences_ = 0;
    max_clause_var_ = 0;
    for (auto const& c : clauses_) {
      max_id = std::max(max_id, to_int(c.id));
      num_occurrences_ += c.lits.size();
      for (auto u : c.lits) max_clause_var_ = std::max(max_clause_var_, u.var());
    }
    next_id_ = std::max(next_id.value_or(0), max_id + 1);
  }

  Prefix prefix_;
  std::vector<Clause> clauses_;
  OccurrenceIndex occ_;
  std::size_t num_occurrences_ = 0;
  Var max_clause_var_ = 0;
  std::uint32_t next_id_ = 1;
};

/// [{u}]: ids of clauses containing exactly `u`.
inline std::vector<ClauseId> clauses_with_literal(Formula const& f, Literal u) {
  auto const ids = f.occurrences()[u];
  return {ids.begin(), ids.end()};
}

/// [S]: ids of clauses containing any literal of `s`, ascending.
inline std::vector<ClauseId> clauses_with_any(Formula const& f, std::span<Literal const> s) {
  std::vector<ClauseId> out;
  for (auto u : s) {
    auto const ids = f.occurrences()[u];
    out.insert(out.end(), ids.begin(), ids.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Size measure: prefix variables + clauses + literal occurrences.
inline std::size_t size(Formula const& f) {
  return f.num_vars() + f.num_clauses() + f.num_occurrences();
}

struct Violation {
  enum class Kind {
    unbound_variable,
    duplicate_prefix_variable,
    zero_variable,
    occ_mismatch,
    duplicate_literal,
    duplicate_clause_id,
  };

  Kind kind;
  Var var = 0;
  std::optional<ClauseId> clause;

  std::string describe() const {
    auto const where = clause ? " in clause " + std::to_string(to_int(*clause)) : std::string();
    switch (kind) {
    case Kind::unbound_variable: return "unbound-variable(x" + std::to_string(var) + ")" + where;
    case Kind::duplicate_prefix_variable:
      return "duplicate-prefix-variable(x" + std::to_string(var) + ")";
    case Kind::zero_variable: return "zero-variable" + where;
    case Kind::occ_mismatch: return "occ-mismatch";
    case Kind::duplicate_literal: return "duplicate-literal(x" + std::to_string(var) + ")" + where;
    case Kind::duplicate_clause_id: return "duplicate-clause-id" + where;
    }
    return "unknown";
  }

  friend bool operator==(Violation const&, Violation const&) = default;
};

/// Empty iff every Formula invariant holds.
inline std::vector<Violation> validate(Formula const& f) {
  std::vector<Violation> out;
  auto const& prefix = f.prefix();

  std::vector<Var> seen;
  for (auto const& e : prefix.entries()) {
    if (e.var == 0) out.push_back({Violation::Kind::zero_variable, 0, std::nullopt});
    if (std::find(seen.begin(), seen.end(), e.var) != seen.end())
      out.push_back({Violation::Kind::duplicate_prefix_variable, e.var, std::nullopt});
    seen.push_back(e.var);
  }

  std::vector<ClauseId> ids;
  for (auto const& c : f.clauses()) {
    ids.push_back(c.id);
    for (std::size_t i = 0; i < c.lits.size(); ++i) {
      auto const u = c.lits[i];
      if (u.var() == 0) {
        out.push_back({Violation::Kind::zero_variable, 0, c.id});
        continue;
      }
      if (!prefix.binds(u.var())) {
        bool const reported = std::any_of(c.lits.begin(), c.lits.begin() + static_cast<std::ptrdiff_t>(i),
                                          [&](Literal w) { return w.var() == u.var(); });
        if (!reported) out.push_back({Violation::Kind::unbound_variable, u.var(), c.id});
      }
      if (i > 0 && c.lits[i - 1] == u)
        out.push_back({Violation::Kind::duplicate_literal, u.var(), c.id});
    }
  }
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (ids[i] == ids[i - 1]) out.push_back({Violation::Kind::duplicate_clause_id, 0, ids[i]});

  if (!(OccurrenceIndex::build(f.clauses()) == f.occurrences()))
    out.push_back({Violation::Kind::occ_mismatch, 0, std::nullopt});
  return out;
}

} // namespace qrl
