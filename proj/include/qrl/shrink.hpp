#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "formula.hpp"

namespace qrl {

using ShrinkPredicate = std::function<bool(Formula const&)>;

struct ShrinkStats {
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  std::size_t sweeps = 0;
};

namespace detail {

inline std::vector<Clause> clause_copy(Formula const& f) { return {f.clauses().begin(), f.clauses().end()}; }

inline std::vector<PrefixEntry> prefix_copy(Formula const& f) {
  return {f.prefix().entries().begin(), f.prefix().entries().end()};
}

} // namespace detail

/// Greedy fixpoint minimisation of `f` under a deterministic `keep`.
///
/// Passes, in order: drop a clause; drop one literal from a clause of width
/// at least two; drop a variable with all its occurrences (only if no clause
/// becomes empty); turn a universal quantifier existential. A move is kept
/// iff `keep` still holds. Sweeps repeat until one full sweep keeps nothing,
/// so no single move on the result preserves `keep`. Moves never create an
/// empty clause or an unbound variable.
inline Formula shrink(Formula const& f, ShrinkPredicate const& keep, ShrinkStats* stats = nullptr) {
  if (!keep(f)) throw PreconditionError("shrink: predicate does not hold on the input");

  ShrinkStats local;
  auto& st = stats ? *stats : local;
  Formula current = f;

  auto attempt = [&](Formula candidate) {
    ++st.attempts;
    if (!keep(candidate)) return false;
    ++st.accepted;
    current = std::move(candidate);
    return true;
  };

  for (bool progress = true; progress;) {
    progress = false;
    ++st.sweeps;

    for (std::size_t i = 0; i < current.num_clauses();) {
      auto clauses = detail::clause_copy(current);
      clauses.erase(clauses.begin() + static_cast<std::ptrdiff_t>(i));
      if (attempt(Formula(current.prefix(), std::move(clauses), current.next_id())))
        progress = true;
      else
        ++i;
    }

    for (std::size_t i = 0; i < current.num_clauses(); ++i) {
      for (std::size_t j = 0; j < current.clauses()[i].width() && current.clauses()[i].width() >= 2;) {
        auto clauses = detail::clause_copy(current);
        clauses[i].lits.erase(clauses[i].lits.begin() + static_cast<std::ptrdiff_t>(j));
        if (attempt(Formula(current.prefix(), std::move(clauses), current.next_id())))
          progress = true;
        else
          ++j;
      }
    }

    for (std::size_t k = 0; k < current.num_vars();) {
      auto const v = current.prefix().entries()[k].var;
      auto clauses = detail::clause_copy(current);
      bool empties = false;
      for (auto& c : clauses) {
        bool const had = !c.empty();
        std::erase_if(c.lits, [&](Literal u) { return u.var() == v; });
        empties = empties || (had && c.empty());
      }
      auto entries = detail::prefix_copy(current);
      entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(k));
      if (!empties && attempt(Formula(Prefix(std::move(entries)), std::move(clauses), current.next_id())))
        progress = true;
      else
        ++k;
    }

    for (std::size_t k = 0; k < current.num_vars(); ++k) {
      if (current.prefix().entries()[k].quantifier != Quantifier::universal) continue;
      auto entries = detail::prefix_copy(current);
      entries[k].quantifier = Quantifier::existential;
      if (attempt(current.with_prefix(Prefix(std::move(entries))))) progress = true;
    }
  }
  return current;
}

} // namespace qrl
