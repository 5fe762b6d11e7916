#include <gtest/gtest.h>

#include "support.hpp"

namespace qrl {
namespace {

using namespace qrl::testing;

TEST(EvalRecursive, Fixtures) {
  EXPECT_TRUE(eval_recursive(f_a()).value);
  EXPECT_FALSE(eval_recursive(f_b()).value);
  EXPECT_FALSE(eval_recursive(f_c()).value);
  EXPECT_TRUE(eval_recursive(f_d()).value);
  EXPECT_FALSE(eval_recursive(f_e()).value);
  EXPECT_EQ(eval_recursive(f_a()).method, OracleMethod::recursive);
}

TEST(EvalRecursive, RefusesOverTheLimit) {
  GenParams p;
  p.n_vars = 31;
  p.n_clauses = 5;
  auto const f = gen_random(p);
  EXPECT_THROW(eval_recursive(f), OracleRefusal);
  EXPECT_THROW(eval_recursive(f_d(), {1, 1000}), OracleRefusal);
  OracleLimits wide{100, 1000};
  p.n_vars = 63;
  EXPECT_THROW(eval_recursive(gen_random(p), wide), OracleRefusal);
}

TEST(EvalRecursive, WorkIsBoundedByTheExpansionTree) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto const f = gen_random(small_params(seed));
    auto const v = eval_recursive(f);
    EXPECT_LE(v.work, std::uint64_t{1} << (f.num_vars() + 1));
  }
}

TEST(EliminateInnermost, Fixtures) {
  auto const b = eliminate_innermost(f_b());
  EXPECT_TRUE(b.prefix().empty());
  ASSERT_EQ(b.num_clauses(), 1u);
  EXPECT_TRUE(b.clauses()[0].empty());

  auto const a = eliminate_innermost(f_a());
  EXPECT_TRUE(a.prefix().empty());
  EXPECT_EQ(a.num_clauses(), 0u);

  auto const d = eliminate_innermost(f_d());
  EXPECT_EQ(d.prefix().size(), 1u);
  EXPECT_EQ(d.num_clauses(), 0u);

  EXPECT_THROW(eliminate_innermost(Formula()), PreconditionError);
}

TEST(EliminateInnermost, PreservesTruth) {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto params = small_params(seed, seed % 2 ? QuantPattern::random(0.5) : QuantPattern::alternating());
    params.allow_tautologies = seed % 4 == 0;
    auto const f = gen_random(params);
    if (f.prefix().empty()) continue;
    auto const g = eliminate_innermost(f);
    EXPECT_EQ(g.num_vars() + 1, f.num_vars());
    EXPECT_TRUE(validate(g).empty());
    EXPECT_FALSE(g.occurs(f.prefix().innermost().var));
    EXPECT_EQ(brute_force(g), brute_force(f)) << "seed " << seed;
  }
}

TEST(EvalElimination, Fixtures) {
  EXPECT_TRUE(eval_elimination(f_d()).value);
  EXPECT_FALSE(eval_elimination(f_e()).value);
  EXPECT_FALSE(eval_elimination(f_c()).value);
  EXPECT_TRUE(eval_elimination(f_a()).value);
  EXPECT_FALSE(eval_elimination(f_b()).value);
}

TEST(EvalElimination, RefusesOverTheLiteralBudget) {
  GenParams p;
  p.n_vars = 20;
  p.n_clauses = 80;
  p.width_min = 3;
  p.width_max = 3;
  p.pattern = QuantPattern::random(0.0);
  auto const f = gen_random(p);
  EXPECT_THROW(eval_elimination(f, {30, 50}), OracleRefusal);
}

TEST(Oracles, AgreeWithBruteForceAndEachOther) {
  for (std::uint64_t seed = 1; seed <= 2000; ++seed) {
    auto params = small_params(seed, seed % 2 ? QuantPattern::random(0.5) : QuantPattern::alternating());
    params.allow_empty_clauses = seed % 9 == 0;
    params.allow_tautologies = seed % 5 == 0;
    auto const f = gen_random(params);
    bool const truth = brute_force(f);
    ASSERT_EQ(eval_recursive(f).value, truth) << "seed " << seed;
    ASSERT_EQ(eval_elimination(f).value, truth) << "seed " << seed;
  }
}

TEST(BuildPsi, Fixtures) {
  auto const d = build_psi(f_d());
  EXPECT_EQ(d.pivot_var, 2u);
  EXPECT_EQ(d.removed, ids({1, 2}));
  ASSERT_EQ(d.added.size(), 1u);
  EXPECT_EQ(d.added[0].negative_parent, cid(2));
  EXPECT_EQ(d.added[0].positive_parent, cid(1));
  ASSERT_EQ(d.psi.num_clauses(), 1u);
  EXPECT_EQ(d.psi.clauses()[0].lits, lits({1, -1}));
  ASSERT_EQ(d.psi.prefix().size(), 1u);
  EXPECT_EQ(d.psi.prefix().entries()[0], (PrefixEntry{1, Quantifier::universal}));

  auto const c = build_psi(f_c());
  EXPECT_EQ(c.removed, ids({1, 2}));
  ASSERT_EQ(c.psi.num_clauses(), 1u);
  EXPECT_TRUE(c.psi.clauses()[0].empty());
  EXPECT_TRUE(c.psi.prefix().empty());

  auto const a = build_psi(f_a());
  EXPECT_EQ(a.removed, ids({1}));
  EXPECT_TRUE(a.added.empty());
  EXPECT_EQ(a.psi.num_clauses(), 0u);
  EXPECT_TRUE(a.psi.prefix().empty());
}

TEST(BuildPsi, Preconditions) {
  auto const taut = Formula::from_lists({{1, Quantifier::existential}}, {{1, -1}});
  EXPECT_THROW(build_psi(taut), PreconditionError);
  auto const unused = Formula::from_lists({{1, Quantifier::existential}, {2, Quantifier::universal}}, {{1}});
  EXPECT_THROW(build_psi(unused), PreconditionError);
}

TEST(BuildPsi, StructureOnRandomFormulas) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto const f = prune_prefix(gen_random(small_params(seed)));
    if (f.prefix().empty()) continue;
    auto const x = f.prefix().innermost().var;
    auto const r = build_psi(f);
    EXPECT_FALSE(r.psi.prefix().binds(x));
    EXPECT_FALSE(r.psi.occurs(x));
    auto const n1 = f.occurrences()[Literal(x, true)].size();
    auto const n0 = f.occurrences()[Literal(x, false)].size();
    EXPECT_EQ(r.removed.size(), n0 + n1);
    EXPECT_EQ(r.added.size(), n0 * n1);
    EXPECT_EQ(r.survivors.size() + r.removed.size(), f.num_clauses());
    for (auto id : r.survivors) EXPECT_TRUE(r.psi.index_of(id).has_value());
    for (auto const& res : r.added) {
      auto const at = r.psi.index_of(res.id);
      ASSERT_TRUE(at.has_value());
      std::vector<Literal> want;
      for (auto u : f.clauses()[*f.index_of(res.negative_parent)].lits)
        if (u.var() != x) want.push_back(u);
      for (auto u : f.clauses()[*f.index_of(res.positive_parent)].lits)
        if (u.var() != x) want.push_back(u);
      std::sort(want.begin(), want.end());
      want.erase(std::unique(want.begin(), want.end()), want.end());
      EXPECT_EQ(r.psi.clauses()[*at].lits, want);
    }
  }
}

TEST(CheckPsiLemma, Fixtures) {
  auto const d = check_psi_lemma(f_d());
  EXPECT_TRUE(d.phi_true);
  EXPECT_TRUE(d.psi_true);
  EXPECT_TRUE(d.truth_preserved());

  auto const c = check_psi_lemma(f_c());
  EXPECT_FALSE(c.phi_true);
  EXPECT_TRUE(c.truth_preserved());
  EXPECT_TRUE(c.phi_reduced);

  auto const e = check_psi_lemma(f_e());
  EXPECT_FALSE(e.phi_true);
  EXPECT_EQ(e.pivot_var, 2u);
  EXPECT_FALSE(e.phi_reduced);
}

TEST(CheckPsiLemma, TruthAndReducednessMatchIndependentEvaluation) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto const r = run_psi_check(gen_random(small_params(seed)));
    if (!r) continue;
    auto const g = prune_prefix(gen_random(small_params(seed)));
    auto const psi = build_psi(g).psi;
    EXPECT_EQ(r->phi_true, brute_force(g));
    EXPECT_EQ(r->psi_true, brute_force(psi));
    EXPECT_EQ(r->phi_reduced, is_reduced(g));
    EXPECT_EQ(r->psi_reduced, is_reduced(psi));
  }
}

TEST(CheckPsiLemma, UniversalPivotPreservesTruth) {
  // Psi over a universal innermost x is implied by the x = 0 and x = 1 cofactors.
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto params = small_params(seed);
    params.pattern = QuantPattern::fixed(std::string(params.n_vars - 1, 'e') + "a");
    auto const r = run_psi_check(gen_random(params));
    if (r) EXPECT_TRUE(r->truth_preserved());
  }
}

TEST(OracleLimits, Parse) {
  auto const l = OracleLimits::parse("12,345");
  ASSERT_TRUE(l.has_value());
  EXPECT_EQ(l->max_vars, 12u);
  EXPECT_EQ(l->max_literals, 345u);
  EXPECT_FALSE(OracleLimits::parse("12").has_value());
  EXPECT_FALSE(OracleLimits::parse("a,b").has_value());
  EXPECT_FALSE(OracleLimits::parse("1,2x").has_value());
}

} // namespace
} // namespace qrl
