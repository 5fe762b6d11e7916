#pragma once

// Fixtures and reference implementations used as independent oracles by the
// tests. Nothing here calls into the closure engine, the reducer or the
// library oracles.

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <qrl/qrl.hpp>

namespace qrl::testing {

inline Formula f_a() { return Formula::from_lists({{1, Quantifier::existential}}, {{1}}); }
inline Formula f_b() { return Formula::from_lists({{1, Quantifier::universal}}, {{1}}); }
inline Formula f_c() { return Formula::from_lists({{1, Quantifier::existential}}, {{1}, {-1}}); }
inline Formula f_d() {
  return Formula::from_lists({{1, Quantifier::universal}, {2, Quantifier::existential}}, {{1, 2}, {-1, -2}});
}
inline Formula f_e() {
  return Formula::from_lists({{1, Quantifier::universal}, {2, Quantifier::existential}},
                             {{1, 2}, {-1, -2}, {1, -2}});
}

inline constexpr char const* f_d_text = "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n";

inline Literal lit(std::int64_t d) { return Literal::from_dimacs(d); }
inline ClauseId cid(std::uint32_t i) { return ClauseId{i}; }

inline std::vector<ClauseId> ids(std::initializer_list<std::uint32_t> xs) {
  std::vector<ClauseId> out;
  for (auto x : xs) out.push_back(ClauseId{x});
  return out;
}

inline std::vector<Literal> lits(std::initializer_list<std::int64_t> xs) {
  std::vector<Literal> out;
  for (auto x : xs) out.push_back(Literal::from_dimacs(x));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string data_path(std::string const& name) { return std::string(QRL_DATA_DIR) + "/" + name; }

/// Truth by enumerating complete assignments: for each prefix position the
/// value is the OR (existential) or AND (universal) over both values of that
/// variable, and a complete assignment is checked clause by clause. No
/// simplification, no skipping of unused variables.
class BruteForce {
public:
  explicit BruteForce(Formula const& f) : f_(f), value_(f.max_var() + 1, false) {}

  bool eval() { return eval(0); }

private:
  bool eval(std::size_t depth) {
    auto const entries = f_.prefix().entries();
    if (depth == entries.size()) return satisfied();
    auto const v = entries[depth].var;
    bool const exists = entries[depth].quantifier == Quantifier::existential;
    value_[v] = false;
    bool const r0 = eval(depth + 1);
    value_[v] = true;
    bool const r1 = eval(depth + 1);
    return exists ? (r0 || r1) : (r0 && r1);
  }

  bool satisfied() const {
    for (auto const& c : f_.clauses()) {
      bool sat = false;
      for (auto u : c.lits) sat = sat || value_[u.var()] == u.positive();
      if (!sat) return false;
    }
    return true;
  }

  Formula const& f_;
  std::vector<bool> value_;
};

inline bool brute_force(Formula const& f) { return BruteForce(f).eval(); }

/// Reference closure transcribed from the set definitions: occurrence sets
/// are recomputed by scanning the clauses, and the step is iterated exactly
/// |F| times as in the definition S(z) = S^{|F|}(z).
struct NaiveClosure {
  Formula const& f;

  std::set<std::uint32_t> occ(std::set<Literal> const& s) const {
    std::set<std::uint32_t> out;
    for (auto const& c : f.clauses())
      for (auto u : c.lits)
        if (s.contains(u)) out.insert(to_int(c.id));
    return out;
  }

  static bool subset(std::set<std::uint32_t> const& a, std::set<std::uint32_t> const& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  }

  bool leq(Literal u, Literal v) const {
    auto const& p = f.prefix();
    return p.quantifier(u.var()) == Quantifier::existential || p.position(u.var()) <= p.position(v.var());
  }

  std::set<Literal> step(std::set<Literal> const& s, Literal z) const {
    std::set<Literal> out;
    auto const covered = occ(s);
    for (auto const& e : f.prefix().entries()) {
      if (e.quantifier != Quantifier::existential) continue;
      for (bool positive : {false, true}) {
        Literal const u(e.var, positive);
        if (u == negate(z) || !leq(z, u)) continue;
        if (subset(occ({u}), covered)) continue;
        if (!subset(occ({negate(u)}), covered)) continue;
        out.insert(u);
      }
    }
    return out;
  }

  std::set<Literal> s_set(Literal z) const {
    std::set<Literal> s{z};
    for (std::size_t k = 0; k < size(f); ++k) {
      auto const add = step(s, z);
      s.insert(add.begin(), add.end());
    }
    return s;
  }

  bool redundant(Literal z) const { return subset(occ({negate(z)}), occ(s_set(z))); }
};

inline std::vector<Literal> sorted(std::set<Literal> const& s) { return {s.begin(), s.end()}; }

inline std::vector<ClauseId> sorted_ids(std::set<std::uint32_t> const& s) {
  std::vector<ClauseId> out;
  for (auto x : s) out.push_back(ClauseId{x});
  return out;
}

/// Small random instances for property tests.
inline GenParams small_params(std::uint64_t seed, QuantPattern pattern = QuantPattern::random(0.5)) {
  Rng rng(seed ^ 0x5eedull);
  GenParams p;
  p.n_vars = static_cast<std::size_t>(rng.between(2, 7));
  p.n_clauses = static_cast<std::size_t>(rng.between(0, 10));
  p.width_min = 1;
  p.width_max = std::min<std::size_t>(3, p.n_vars);
  p.pattern = pattern;
  p.seed = seed;
  return p;
}

} // namespace qrl::testing
