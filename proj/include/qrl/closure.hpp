#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "formula.hpp"

namespace qrl {

/// Fixpoint S(z), its covered clauses C(z) = [S(z)], and the per-round
/// additions that produced it.
struct ClosureResult {
  Literal pivot;
  std::vector<Literal> s_set;          // sorted
  std::vector<ClauseId> covered;       // sorted
  std::vector<std::vector<Literal>> rounds;
  std::size_t iterations = 0;          // closure steps evaluated, including the final empty one

  bool contains(Literal u) const { return std::binary_search(s_set.begin(), s_set.end(), u); }
  bool covers(ClauseId id) const { return std::binary_search(covered.begin(), covered.end(), id); }
};

/// Iteration cap for the closure fixpoint over a prefix of `num_vars`
/// variables. Every productive round adds at least one of the 2 * num_vars
/// literals, and the final round adds none.
constexpr std::size_t closure_iteration_cap(std::size_t num_vars) { return 2 * num_vars + 1; }

/// One step of the closure: the existential literals u != ~z with z <= u,
/// [{u}] not inside [S] and [{~u}] inside [S]. Literals already in `s` may be
/// returned; callers take the union.
///
/// Direct transcription of the set conditions, O(|F|) per candidate. The
/// incremental engine below is what the reducer uses.
inline std::vector<Literal> closure_step(Formula const& f, std::span<Literal const> s, Literal z) {
  auto const& prefix = f.prefix();
  (void)prefix.position(z.var());

  auto const covered = clauses_with_any(f, s);
  auto inside = [&](Literal u) {
    auto const ids = f.occurrences()[u];
    return std::all_of(ids.begin(), ids.end(), [&](ClauseId id) {
      return std::binary_search(covered.begin(), covered.end(), id);
    });
  };

  std::vector<Literal> out;
  for (auto const& e : prefix.entries()) {
    if (e.quantifier != Quantifier::existential) continue;
    for (bool positive : {true, false}) {
      Literal const u(e.var, positive);
      if (u == negate(z) || !literal_leq(z, u, prefix)) continue;
      if (!inside(u) && inside(negate(u))) out.push_back(u);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Incremental closure computation over one immutable formula.
///
/// Keeps, per literal, the number of its clauses not yet covered by the
/// current set. A literal u becomes a candidate exactly when the count of ~u
/// reaches zero, so each closure costs time proportional to the clauses it
/// covers plus the pure literals of the formula. Workspace is reused across
/// pivots; the engine is not thread-safe, but separate engines are.
class ClosureEngine {
public:
  explicit ClosureEngine(Formula const& f) : f_(f) {
    auto const& prefix = f.prefix();
    auto const max_var = f.max_var();
    num_lits_ = 2 * (static_cast<std::size_t>(max_var) + 1);

    existential_.assign(max_var + 1, 0);
    position_.assign(max_var + 1, 0);
    for (auto const& e : prefix.entries()) {
      if (position_[e.var] != 0) continue;
      position_[e.var] = static_cast<std::uint32_t>(prefix.position(e.var));
      existential_[e.var] = e.quantifier == Quantifier::existential ? 1 : 0;
    }

    auto const clauses = f.clauses();
    clause_lits_.resize(clauses.size());
    clause_ids_.resize(clauses.size());
    occ_.assign(num_lits_, {});
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      clause_ids_[i] = clauses[i].id;
      for (auto u : clauses[i].lits) {
        clause_lits_[i].push_back(u.code());
        occ_[u.code()].push_back(static_cast<std::uint32_t>(i));
      }
    }
    initial_uncovered_.resize(num_lits_);
    for (std::size_t l = 0; l < num_lits_; ++l)
      initial_uncovered_[l] = static_cast<std::uint32_t>(occ_[l].size());
    for (std::size_t l = 0; l < num_lits_; ++l)
      if (initial_uncovered_[l] > 0 && initial_uncovered_[l ^ 1u] == 0)
        pure_.push_back(static_cast<std::uint32_t>(l));

    uncovered_ = initial_uncovered_;
    covered_.assign(clauses.size(), 0);
    in_set_.assign(num_lits_, 0);
  }

  ClosureEngine(ClosureEngine const&) = delete;
  ClosureEngine& operator=(ClosureEngine const&) = delete;

  Formula const& formula() const { return f_; }

  ClosureResult closure(Literal z) {
    run(z, true);
    ClosureResult r;
    r.pivot = z;
    for (auto l : members_) r.s_set.push_back(Literal::from_code(l));
    std::sort(r.s_set.begin(), r.s_set.end());
    for (auto c : touched_clauses_) r.covered.push_back(clause_ids_[c]);
    std::sort(r.covered.begin(), r.covered.end());
    r.rounds = std::move(rounds_);
    for (auto& round : r.rounds) std::sort(round.begin(), round.end());
    r.iterations = iterations_;
    reset();
    return r;
  }

  /// [{~z}] inside C(z). Requires z's variable to occur in the formula.
  bool is_redundant(Literal z) {
    if (!f_.occurs(z.var()))
      throw PreconditionError("redundancy is only defined for occurring variables; x" +
                              std::to_string(z.var()) + " does not occur");
    run(z, false);
    bool const redundant = uncovered_[negate(z).code()] == 0;
    reset();
    return redundant;
  }

  /// Iterations used by the most recent closure computation.
  std::size_t last_iterations() const { return last_iterations_; }
  std::size_t closures_computed() const { return closures_computed_; }
  std::size_t max_iterations() const { return max_iterations_; }

private:
  bool bound(Var v) const { return v < position_.size() && position_[v] != 0; }

  bool admissible(std::uint32_t u, Literal z) const {
    Var const v = u >> 1;
    if (!bound(v) || !existential_[v]) return false;
    if (u == negate(z).code() || in_set_[u]) return false;
    if (!existential_[z.var()] && position_[z.var()] > position_[v]) return false;
    return uncovered_[u] > 0 && uncovered_[u ^ 1u] == 0;
  }

  void cover(std::uint32_t u, std::vector<std::uint32_t>& next) {
    for (auto c : occ_[u]) {
      if (covered_[c]) continue;
      covered_[c] = 1;
      touched_clauses_.push_back(c);
      for (auto l : clause_lits_[c]) {
        if (uncovered_[l] == initial_uncovered_[l]) touched_lits_.push_back(l);
        if (--uncovered_[l] == 0) next.push_back(l ^ 1u);
      }
    }
  }

  void run(Literal z, bool record_rounds) {
    if (!bound(z.var()))
      throw MalformedFormula("pivot x" + std::to_string(z.var()) + " is not bound by the prefix");
    ++closures_computed_;
    auto const cap = closure_iteration_cap(f_.num_vars());

    members_.assign(1, z.code());
    in_set_[z.code()] = 1;
    rounds_.clear();

    std::vector<std::uint32_t> candidates(pure_.begin(), pure_.end());
    std::vector<std::uint32_t> next;
    if (z.code() < num_lits_) cover(z.code(), candidates);

    iterations_ = 0;
    std::vector<std::uint32_t> added;
    for (;;) {
      if (++iterations_ > cap)
        throw InvariantError("closure of " + z.to_string() + " exceeded " + std::to_string(cap) +
                             " iterations");
      added.clear();
      for (auto u : candidates) {
        if (!admissible(u, z)) continue;
        in_set_[u] = 1;
        added.push_back(u);
      }
      if (added.empty()) break;
      if (record_rounds) {
        auto& round = rounds_.emplace_back();
        for (auto u : added) round.push_back(Literal::from_code(u));
      }
      next.clear();
      for (auto u : added) {
        members_.push_back(u);
        cover(u, next);
      }
      candidates.swap(next);
    }
    last_iterations_ = iterations_;
    max_iterations_ = std::max(max_iterations_, iterations_);
  }

  void reset() {
    for (auto l : touched_lits_) uncovered_[l] = initial_uncovered_[l];
    for (auto c : touched_clauses_) covered_[c] = 0;
    for (auto l : members_) in_set_[l] = 0;
    touched_lits_.clear();
    touched_clauses_.clear();
    members_.clear();
  }

  Formula const& f_;
  std::size_t num_lits_ = 0;
  std::vector<std::uint8_t> existential_;
  std::vector<std::uint32_t> position_;
  std::vector<std::vector<std::uint32_t>> clause_lits_;
  std::vector<ClauseId> clause_ids_;
  std::vector<std::vector<std::uint32_t>> occ_;
  std::vector<std::uint32_t> initial_uncovered_;
  std::vector<std::uint32_t> pure_;

  std::vector<std::uint32_t> uncovered_;
  std::vector<std::uint8_t> covered_;
  std::vector<std::uint8_t> in_set_;
  std::vector<std::uint32_t> touched_lits_;
  std::vector<std::uint32_t> touched_clauses_;
  std::vector<std::uint32_t> members_;
  std::vector<std::vector<Literal>> rounds_;
  std::size_t iterations_ = 0;
  std::size_t last_iterations_ = 0;
  std::size_t closures_computed_ = 0;
  std::size_t max_iterations_ = 0;
};

inline ClosureResult closure(Formula const& f, Literal z) {
  ClosureEngine engine(f);
  return engine.closure(z);
}

inline bool is_redundant(Formula const& f, Literal z) {
  ClosureEngine engine(f);
  return engine.is_redundant(z);
}

enum class Property { p1, p2 };

inline char const* property_name(Property p) { return p == Property::p1 ? "P1" : "P2"; }

struct PropertyReport {
  Property property = Property::p1;
  Literal pivot;
  std::optional<Literal> witness;
  std::optional<Quantifier> witness_quantifier;

  bool holds() const { return !witness.has_value(); }
};

/// (1): S(z) holds no complementary pair.
inline PropertyReport check_property_1(ClosureResult const& c) {
  PropertyReport r{Property::p1, c.pivot, std::nullopt, std::nullopt};
  for (auto u : c.s_set) {
    if (u.positive() && c.contains(negate(u))) {
      r.witness = u;
      break;
    }
  }
  return r;
}

inline PropertyReport check_property_1(Formula const& f, Literal z) {
  auto r = check_property_1(closure(f, z));
  if (r.witness) r.witness_quantifier = f.prefix().quantifier(r.witness->var());
  return r;
}

/// (2): for u != z with z <= u, [{u}] inside C(z) implies [{~u}] inside C(z).
/// Candidates are scanned outermost variable first, positive literal first.
inline PropertyReport check_property_2(Formula const& f, ClosureResult const& c) {
  PropertyReport r{Property::p2, c.pivot, std::nullopt, std::nullopt};
  auto const& prefix = f.prefix();
  auto inside = [&](Literal u) {
    auto const ids = f.occurrences()[u];
    return std::all_of(ids.begin(), ids.end(), [&](ClauseId id) { return c.covers(id); });
  };
  for (auto const& e : prefix.entries()) {
    for (bool positive : {true, false}) {
      Literal const u(e.var, positive);
      if (u == c.pivot || !literal_leq(c.pivot, u, prefix)) continue;
      if (inside(u) && !inside(negate(u))) {
        r.witness = u;
        r.witness_quantifier = e.quantifier;
        return r;
      }
    }
  }
  return r;
}

inline PropertyReport check_property_2(Formula const& f, Literal z) {
  return check_property_2(f, closure(f, z));
}

} // namespace qrl
