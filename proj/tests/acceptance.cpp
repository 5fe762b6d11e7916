// Acceptance suite: one PASS/FAIL line per criterion, exit 0 iff all pass.
//
//   qrl_acceptance [--bank DIR] [--scale F]
//
// --scale multiplies every instance count (default 1.0); values below 1 are
// for quick local runs and are reported as such.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

namespace {

using namespace qrl;
using namespace qrl::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::size_t scaled(std::size_t n, double scale) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * scale)));
}

/// Instance i of a mixed stream: up to 10 variables, up to 20 clauses,
/// alternating, random(0.5) and random(0.25) prefixes.
GenParams mixed_params(std::uint64_t seed) {
  Rng rng(splitmix64(seed));
  GenParams p;
  p.n_vars = static_cast<std::size_t>(rng.between(1, 10));
  p.n_clauses = static_cast<std::size_t>(rng.between(0, 20));
  p.width_min = 1;
  p.width_max = std::min<std::size_t>(p.n_vars, static_cast<std::size_t>(rng.between(1, 4)));
  switch (rng.below(3)) {
  case 0: p.pattern = QuantPattern::alternating(); break;
  case 1: p.pattern = QuantPattern::random(0.5); break;
  default: p.pattern = QuantPattern::random(0.25); break;
  }
  p.allow_tautologies = rng.below(10) == 0;
  p.allow_empty_clauses = rng.below(20) == 0;
  p.seed = seed;
  return p;
}

// 1 -------------------------------------------------------------------------

Outcome criterion_fixtures() {
  std::vector<std::string> bad;
  auto expect = [&](bool ok, std::string const& what) {
    if (!ok) bad.push_back(what);
  };
  expect(decide(f_a()).verdict, "F_A");
  expect(!decide(f_b()).verdict, "F_B");
  expect(!decide(f_c()).verdict, "F_C");
  expect(decide(f_d()).verdict, "F_D");
  expect(!decide(f_e()).verdict, "F_E");
  auto const d = closure(f_d(), lit(1));
  expect(d.s_set == lits({1, -2}) && d.covered == ids({1, 2}), "closure(F_D, x1)");
  auto const e = closure(f_e(), lit(-1));
  expect(e.s_set == lits({-1}) && e.covered == ids({2}), "closure(F_E, ~x1)");
  std::string detail = "5 verdicts and 2 closures";
  for (auto const& b : bad) detail += "; wrong: " + b;
  return {bad.empty(), detail};
}

// 2 -------------------------------------------------------------------------

Outcome criterion_oracles(std::size_t count) {
  std::size_t agree = 0, refused = 0, truths = 0;
  for (std::size_t i = 0; i < count; ++i) {
    auto const f = gen_random(mixed_params(1'000'000 + i));
    try {
      bool const r = eval_recursive(f).value;
      bool const e = eval_elimination(f).value;
      if (r == e) ++agree;
      truths += r ? 1 : 0;
    } catch (OracleRefusal const&) {
      ++refused;
    }
  }
  std::ostringstream s;
  s << agree << "/" << count << " agree, " << refused << " refused, " << truths << " TRUE";
  return {agree == count, s.str()};
}

// 3 and 7 -------------------------------------------------------------------

struct CampaignConfig {
  GenParams params;
  std::size_t count;
};

std::vector<CampaignConfig> differential_configs(double scale) {
  auto make = [](std::size_t n, std::size_t m, std::size_t wmax, QuantPattern q, std::uint64_t seed) {
    GenParams p;
    p.n_vars = n;
    p.n_clauses = m;
    p.width_min = 1;
    p.width_max = wmax;
    p.pattern = q;
    p.seed = seed;
    return p;
  };
  std::vector<CampaignConfig> configs{
      {make(8, 12, 3, QuantPattern::alternating(), 1), 25'000},
      {make(8, 12, 3, QuantPattern::random(0.5), 1'000'001), 25'000},
      {make(10, 10, 3, QuantPattern::alternating(), 2'000'001), 15'000},
      {make(10, 14, 3, QuantPattern::random(0.5), 3'000'001), 15'000},
      {make(6, 8, 2, QuantPattern::random(0.5), 4'000'001), 10'000},
      {make(10, 20, 4, QuantPattern::alternating(), 5'000'001), 10'000},
  };
  for (auto& s : configs) s.count = scaled(s.count, scale);
  return configs;
}

struct DifferentialRun {
  std::vector<FuzzReport> reports;
  double seconds = 0;
};

DifferentialRun run_differential_campaigns(std::vector<CampaignConfig> const& configs, std::size_t workers,
                                           std::optional<fs::path> const& bank) {
  DifferentialRun run;
  auto const t0 = Clock::now();
  for (auto const& s : configs) {
    CampaignOptions o;
    o.params = s.params;
    o.count = s.count;
    o.workers = workers;
    o.bank = bank;
    run.reports.push_back(campaign(o));
  }
  run.seconds = seconds_since(t0);
  return run;
}

Outcome criterion_differential(DifferentialRun const& run, fs::path const& bank) {
  std::size_t instances = 0, clean = 0, classified = 0, unclassified = 0, refusals = 0, disagreements = 0;
  std::map<std::string, std::size_t> per_kind;
  std::map<std::string, BankCheck> checks;
  bool saw_alternating = false, saw_random_half = false;

  for (auto const& r : run.reports) {
    saw_alternating = saw_alternating || r.params.pattern.kind == QuantPattern::Kind::alternating;
    saw_random_half = saw_random_half ||
                      (r.params.pattern.kind == QuantPattern::Kind::random && r.params.pattern.p_universal == 0.5);
    instances += r.instances;
    refusals += r.refusals;
    disagreements += r.disagreements;
    clean += r.clean;
    for (auto const& [k, n] : r.per_invariant) per_kind[finding_name(k)] += n;

    std::map<std::size_t, bool> instance_ok;
    for (auto const& f : r.findings) {
      auto it = checks.find(f.hash);
      if (it == checks.end()) it = checks.emplace(f.hash, validate_bank_entry(bank / (f.hash + ".qdimacs"))).first;
      bool const names_kind = std::ranges::count(f.violated_invariants, std::string(finding_name(f.kind))) > 0;
      bool const ok = it->second.ok() && names_kind && f.oracle_verdict.has_value();
      auto [slot, inserted] = instance_ok.emplace(f.index, ok);
      if (!inserted) slot->second = slot->second && ok;
    }
    for (auto const& [index, ok] : instance_ok) (ok ? classified : unclassified) += 1;
    // An instance with findings but no banked record is unclassified.
    if (instance_ok.size() != r.with_findings) unclassified += r.with_findings - std::min(r.with_findings, instance_ok.size());
  }
  unclassified += refusals;

  std::size_t bank_ok = 0;
  for (auto const& [h, c] : checks) bank_ok += c.ok() ? 1 : 0;

  std::ostringstream s;
  s << instances << " instances in " << std::fixed << std::setprecision(1) << run.seconds << " s: " << clean
    << " clean, " << classified << " with banked counterexamples, " << unclassified << " unclassified; "
    << refusals << " refusals, " << disagreements << " verdict disagreements; " << checks.size()
    << " distinct bank entries, " << bank_ok << " re-validated; per invariant:";
  for (auto const& [k, n] : per_kind) s << " " << k << "=" << n;
  bool const pass = instances >= 100'000 && unclassified == 0 && clean + classified == instances &&
                    bank_ok == checks.size() && saw_alternating && saw_random_half;
  return {pass, s.str()};
}

Outcome criterion_determinism(DifferentialRun const& first, std::vector<CampaignConfig> const& configs,
                              std::size_t workers) {
  auto const second = run_differential_campaigns(configs, workers, std::nullopt);
  std::size_t same = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    auto const& a = first.reports[i];
    auto const& b = second.reports[i];
    if (a.to_json(false).dump() == b.to_json(false).dump() && a.findings == b.findings) ++same;
  }
  std::ostringstream s;
  s << same << "/" << configs.size() << " campaigns identical with " << workers << " workers vs 1";
  return {same == configs.size(), s.str()};
}

// 4 -------------------------------------------------------------------------

Outcome criterion_psi(std::size_t count_per_config, fs::path const& bank) {
  std::vector<GenParams> configs;
  for (auto pattern : {QuantPattern::alternating(), QuantPattern::random(0.5)}) {
    GenParams p;
    p.n_vars = 7;
    p.n_clauses = 6;
    p.width_min = 2;
    p.width_max = 3;
    p.pattern = pattern;
    p.seed = 7'000'001 + configs.size() * 1'000'000;
    configs.push_back(p);
  }
  std::size_t instances = 0, skipped = 0, holds = 0, vacuous = 0, violated = 0, claim = 0, lemma_all = 0,
              lemma_claim = 0, lemma_full_claim = 0, red_holds = 0, red_violated = 0, banked = 0, bank_ok = 0;
  for (auto const& p : configs) {
    CampaignOptions o;
    o.params = p;
    o.count = count_per_config;
    o.bank = bank;
    auto const r = psi_campaign(o);
    instances += r.instances;
    skipped += r.skipped;
    holds += r.truth_holds;
    vacuous += r.truth_vacuous;
    violated += r.truth_violations;
    claim += r.claim_context;
    lemma_all += r.lemma_surviving_violations;
    lemma_claim += r.lemma_surviving_violations_in_context;
    lemma_full_claim += r.lemma_full_violations_in_context;
    red_holds += r.reducedness_holds;
    red_violated += r.reducedness_violations;
    std::set<std::string> hashes;
    for (auto const& f : r.findings) hashes.insert(f.hash);
    for (auto const& h : hashes) {
      ++banked;
      bank_ok += validate_bank_entry(bank / (h + ".qdimacs")).ok() ? 1 : 0;
    }
  }
  std::ostringstream s;
  s << instances << " instances (" << skipped << " outside the construction's preconditions); truth: " << holds
    << " hold, " << vacuous << " vacuous, " << violated << " violated; lemma (surviving clauses): " << lemma_all
    << " violated overall, " << lemma_claim << " with reduced nonempty phi (full-clause form: " << lemma_full_claim
    << "); reducedness over " << claim << " reduced nonempty phi: " << red_holds << " preserved, " << red_violated
    << " lost; " << banked << " distinct bank entries, " << bank_ok << " re-validated";
  bool const pass = instances >= 10'000 && holds + vacuous + violated + skipped == instances &&
                    red_holds + red_violated == claim && bank_ok == banked;
  return {pass, s.str()};
}

// 5 -------------------------------------------------------------------------

Outcome criterion_bounds(std::size_t count) {
  std::size_t runs = 0, violations = 0, with_empty = 0;
  std::string first;
  for (std::size_t i = 0; i < count; ++i) {
    auto const f = gen_random(mixed_params(9'000'000 + i));
    for (auto const& policy : standard_policies()) {
      ++runs;
      try {
        auto const t = decide(f, {policy, false});
        bool ok = t.steps.size() <= size(f) && t.max_closure_iterations <= closure_iteration_cap(f.num_vars());
        std::size_t prev = size(prune_prefix(f));
        bool empty_seen = f.has_empty_clause();
        for (auto const& st : t.steps) {
          ok = ok && st.size_before == prev && st.size_after < st.size_before;
          prev = st.size_after;
        }
        empty_seen = empty_seen || t.final_formula.has_empty_clause();
        if (empty_seen) {
          ++with_empty;
          ok = ok && !t.verdict;
        }
        if (!ok) {
          ++violations;
          if (first.empty()) first = "seed " + std::to_string(9'000'000 + i) + " " + policy.name();
        }
      } catch (InvariantError const& e) {
        ++violations;
        if (first.empty()) first = e.what();
      }
    }
  }
  std::ostringstream s;
  s << runs << " decide runs, " << violations << " bound violations, " << with_empty
    << " runs with an empty clause all FALSE";
  if (!first.empty()) s << "; first: " << first;
  return {violations == 0, s.str()};
}

// 6 -------------------------------------------------------------------------

Outcome criterion_parser(std::size_t round_trips, std::size_t byte_strings) {
  std::size_t rt_ok = 0;
  for (std::size_t i = 0; i < round_trips; ++i) {
    auto const f = gen_random(mixed_params(11'000'000 + i));
    auto const text = write_qdimacs(f);
    auto const once = parse_qdimacs(text);
    if (!std::holds_alternative<Formula>(once)) continue;
    auto const& g = std::get<Formula>(once);
    auto const twice = parse_qdimacs(write_qdimacs(g));
    if (structurally_equal(f, g) && std::holds_alternative<Formula>(twice) &&
        structurally_equal(std::get<Formula>(twice), g) && write_qdimacs(g) == text)
      ++rt_ok;
  }

  Rng rng(12'345);
  static constexpr char alphabet[] = "pcnfea0123456789- \n\t";
  std::size_t diagnosed = 0, accepted = 0, bad = 0;
  for (std::size_t i = 0; i < byte_strings; ++i) {
    std::string text;
    auto const mode = rng.below(3);
    if (mode > 0) text = "p cnf " + std::to_string(rng.below(8)) + " " + std::to_string(rng.below(5)) + "\n";
    auto const len = rng.below(120);
    for (std::uint64_t k = 0; k < len; ++k)
      text += mode == 2 ? alphabet[rng.below(sizeof alphabet - 1)] : static_cast<char>(rng.below(256));
    auto const r = parse_qdimacs(text, {rng.coin()});
    if (auto const* d = std::get_if<ParseDiagnostic>(&r)) {
      d->line >= 1 ? ++diagnosed : ++bad;
    } else {
      validate(std::get<Formula>(r)).empty() ? ++accepted : ++bad;
    }
  }
  std::ostringstream s;
  s << rt_ok << "/" << round_trips << " round trips; " << byte_strings << " random inputs: " << diagnosed
    << " line-numbered diagnostics, " << accepted << " valid formulas, " << bad << " neither";
  return {rt_ok == round_trips && bad == 0 && diagnosed + accepted == byte_strings, s.str()};
}

// 8 -------------------------------------------------------------------------

Outcome criterion_bench() {
  BenchOptions o;
  o.max_size = 10'000;
  o.samples = 3;
  auto const r = run_bench(o);
  std::size_t largest = 0;
  for (auto const& s : r.samples) largest = std::max(largest, s.size);
  std::ostringstream s;
  s << r.samples.size() << " samples of " << r.family << " up to size " << largest << ", bounds "
    << (r.bounds_hold ? "hold" : "VIOLATED") << ", fitted time exponent ";
  if (r.exponent) s << std::fixed << std::setprecision(2) << *r.exponent;
  else s << "n/a";
  s << " (advisory)";
  return {r.bounds_hold && largest >= 5'000 && !r.samples.empty(), s.str()};
}

} // namespace

int main(int argc, char** argv) {
  fs::path bank = fs::temp_directory_path() / "qrl-acceptance-bank";
  double scale = 1.0;
  for (int i = 1; i < argc; ++i) {
    std::string const a = argv[i];
    if (a == "--bank" && i + 1 < argc) bank = argv[++i];
    else if (a == "--scale" && i + 1 < argc) scale = std::stod(argv[++i]);
    else {
      std::cerr << "usage: qrl_acceptance [--bank DIR] [--scale F]\n";
      return 1;
    }
  }
  fs::create_directories(bank);
  if (scale != 1.0) std::cout << "note: instance counts scaled by " << scale << "\n";

  int failures = 0;
  auto report = [&](int n, char const* title, std::function<Outcome()> const& fn) {
    auto const t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (std::exception const& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " [" << title << "] " << o.detail << " ("
              << std::fixed << std::setprecision(1) << seconds_since(t0) << " s)" << std::endl;
  };

  report(1, "hand-trace fixtures", criterion_fixtures);
  report(2, "oracle soundness", [&] { return criterion_oracles(scaled(50'000, scale)); });

  auto const configs = differential_configs(scale);
  DifferentialRun first;
  report(3, "differential campaign", [&] {
    first = run_differential_campaigns(configs, 1, bank);
    return criterion_differential(first, bank);
  });
  report(4, "psi claim checks", [&] { return criterion_psi(scaled(5'000, scale), bank); });
  report(5, "structural bounds", [&] { return criterion_bounds(scaled(20'000, scale)); });
  report(6, "parser robustness", [&] { return criterion_parser(scaled(1'000, scale), scaled(100'000, scale)); });
  report(7, "determinism", [&] {
    if (first.reports.size() != configs.size()) return Outcome{false, "criterion 3 did not complete"};
    return criterion_determinism(first, configs, 3);
  });
  report(8, "bench advisory", criterion_bench);

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
