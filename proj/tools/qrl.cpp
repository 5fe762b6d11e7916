// qrl: command-line front end for the literal-closure reduction procedure,
// its oracles and the differential fuzzing harness.
//
// Exit codes: 10 TRUE, 20 FALSE, 0 success, 1 usage or input error,
// 2 invariant failure or finding, 3 oracle refusal.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <qrl/qrl.hpp>

namespace {

constexpr int exit_true = 10;
constexpr int exit_false = 20;
constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_finding = 2;
constexpr int exit_refused = 3;

/// Thrown to leave a subcommand with a specific exit code.
struct Exit {
  int code;
};

struct LimitFlags {
  std::optional<std::size_t> vars;
  std::optional<std::size_t> literals;

  void add(CLI::App& app) {
    app.add_option("--oracle-vars", vars, "oracle variable limit (default 30)");
    app.add_option("--oracle-literals", literals, "elimination literal budget (default 1000000)");
  }

  /// Flags override QRL_ORACLE_LIMITS, which overrides the defaults.
  qrl::OracleLimits resolve() const {
    if (char const* env = std::getenv("QRL_ORACLE_LIMITS"); env && !qrl::OracleLimits::parse(env)) {
      std::cerr << "qrl: QRL_ORACLE_LIMITS must be \"vars,literals\", got \"" << env << "\"\n";
      throw Exit{exit_input};
    }
    auto limits = qrl::OracleLimits::from_env();
    if (vars) limits.max_vars = *vars;
    if (literals) limits.max_literals = *literals;
    return limits;
  }
};

qrl::Formula load(std::string const& path, bool lenient) {
  std::string text;
  try {
    text = qrl::read_file(path);
  } catch (qrl::Error const& e) {
    std::cerr << "qrl: " << e.what() << "\n";
    throw Exit{exit_input};
  }
  auto result = qrl::parse_qdimacs(text, {lenient});
  if (auto const* d = std::get_if<qrl::ParseDiagnostic>(&result)) {
    std::cerr << path << ":" << d->line << ":" << d->column << ": " << qrl::parse_error_name(d->kind) << ": "
              << d->message << "\n";
    throw Exit{exit_input};
  }
  return std::get<qrl::Formula>(std::move(result));
}

char const* truth(bool v) { return v ? "TRUE" : "FALSE"; }

int verdict_exit(bool v) { return v ? exit_true : exit_false; }

// solve ---------------------------------------------------------------------

struct SolveArgs {
  std::string file;
  std::string policy = "ascending";
  std::string trace;
  bool early_exit = false;
  bool lenient = false;
};

int run_solve(SolveArgs const& a) {
  auto const policy = qrl::ScanPolicy::parse(a.policy);
  if (!policy) {
    std::cerr << "qrl: unknown policy '" << a.policy << "' (ascending, descending, random:<seed>)\n";
    return exit_input;
  }
  auto const f = load(a.file, a.lenient);
  auto const trace = qrl::decide(f, {*policy, a.early_exit});
  std::cout << "s cnf " << (trace.verdict ? 1 : 0) << "\n";
  std::cout << "c steps " << trace.steps.size() << " closures " << trace.closures_computed << " final-clauses "
            << trace.final_clause_count << "\n";
  if (!a.trace.empty()) qrl::write_file_atomic(a.trace, qrl::write_trace(trace));
  return verdict_exit(trace.verdict);
}

// oracle --------------------------------------------------------------------

struct OracleArgs {
  std::string file;
  std::string method = "recursive";
  bool lenient = false;
  LimitFlags limits;
};

int run_oracle(OracleArgs const& a) {
  if (a.method != "recursive" && a.method != "elimination") {
    std::cerr << "qrl: unknown method '" << a.method << "' (recursive, elimination)\n";
    return exit_input;
  }
  auto const limits = a.limits.resolve();
  auto const f = load(a.file, a.lenient);
  try {
    auto const v = a.method == "recursive" ? qrl::eval_recursive(f, limits) : qrl::eval_elimination(f, limits);
    std::cout << "s cnf " << (v.value ? 1 : 0) << "\n";
    std::cout << "c method " << qrl::method_name(v.method) << " work " << v.work << "\n";
    return verdict_exit(v.value);
  } catch (qrl::OracleRefusal const& e) {
    std::cout << "s cnf refused\n";
    std::cerr << "qrl: oracle refused: " << e.what() << "\n";
    return exit_refused;
  }
}

// check ---------------------------------------------------------------------

struct CheckArgs {
  std::string file;
  std::string bank;
  bool lenient = false;
  LimitFlags limits;
};

int run_check(CheckArgs const& a) {
  auto const limits = a.limits.resolve();
  auto const f = load(a.file, a.lenient);
  auto const r = qrl::run_differential(f, limits);

  std::cout << "paper " << truth(r.paper_verdict) << "\n";
  for (auto const& p : r.policy_verdicts)
    std::cout << "policy " << p.policy.name() << " " << truth(p.verdict) << " steps " << p.steps << "\n";
  std::cout << "recursive " << (r.recursive_verdict ? truth(*r.recursive_verdict) : "REFUSED") << "\n";
  std::cout << "elimination " << (r.elimination_verdict ? truth(*r.elimination_verdict) : "REFUSED") << "\n";
  if (!r.oracle_verdict) {
    std::cout << "agreement unknown\n";
    std::cerr << "qrl: oracle refused; instance exceeds the oracle limits\n";
    return exit_refused;
  }
  std::cout << "agreement " << (*r.agree ? "yes" : "no") << "\n";

  auto kinds = r.kinds();
  std::optional<qrl::PsiLemmaReport> psi;
  try {
    psi = qrl::run_psi_check(f, limits);
  } catch (qrl::OracleRefusal const&) {
  }
  if (psi)
    for (auto k : qrl::psi_finding_kinds(*psi)) kinds.push_back(k);

  for (auto k : qrl::all_finding_kinds) {
    bool const psi_kind = qrl::is_psi_finding(k);
    std::cout << "invariant " << qrl::finding_name(k) << " ";
    if (psi_kind && !psi) {
      std::cout << "n/a\n";
      continue;
    }
    bool const violated = std::find(kinds.begin(), kinds.end(), k) != kinds.end();
    std::cout << (violated ? "VIOLATED" : "holds");
    for (auto const& fd : r.findings)
      if (fd.kind == k && !fd.detail.empty()) std::cout << " (" << fd.detail << ")";
    std::cout << "\n";
  }
  if (psi)
    std::cout << "psi pivot x" << psi->pivot_var << " lemma-full " << (psi->lemma_full ? "holds" : "VIOLATED")
              << " phi-reduced " << (psi->phi_reduced ? "yes" : "no") << "\n";

  if (kinds.empty()) return exit_ok;
  if (!a.bank.empty()) {
    qrl::CounterexampleMeta meta;
    meta.params = {{"source", a.file}};
    meta.paper_verdict = r.paper_verdict;
    meta.oracle_verdict = r.oracle_verdict;
    std::sort(kinds.begin(), kinds.end());
    for (auto k : kinds) meta.violated_invariants.emplace_back(qrl::finding_name(k));
    auto const hash = qrl::CounterexampleBank(a.bank).persist(f, meta);
    std::cout << "persisted " << hash << "\n";
  }
  return exit_finding;
}

// fuzz ----------------------------------------------------------------------

struct FuzzArgs {
  std::size_t vars = 8;
  std::size_t clauses = 12;
  std::string widths = "1..3";
  std::string pattern = "alternating";
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string bank;
  bool tautologies = false;
  bool empty_clauses = false;
  bool no_shrink = false;
  bool psi = false;
  bool no_timing = false;
  LimitFlags limits;
};

std::optional<std::pair<std::size_t, std::size_t>> parse_widths(std::string const& text) {
  auto const dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      std::size_t used = 0;
      auto const w = std::stoull(text, &used);
      if (used != text.size()) return std::nullopt;
      return std::pair{static_cast<std::size_t>(w), static_cast<std::size_t>(w)};
    }
    std::size_t ua = 0, ub = 0;
    auto const lo = std::stoull(text.substr(0, dots), &ua);
    auto const rest = text.substr(dots + 2);
    auto const hi = std::stoull(rest, &ub);
    if (ua != dots || ub != rest.size()) return std::nullopt;
    return std::pair{static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
  } catch (std::exception const&) {
    return std::nullopt;
  }
}

int run_fuzz(FuzzArgs const& a) {
  auto const widths = parse_widths(a.widths);
  auto const pattern = qrl::QuantPattern::parse(a.pattern);
  if (!widths) {
    std::cerr << "qrl: --widths must be N or MIN..MAX\n";
    return exit_input;
  }
  if (!pattern) {
    std::cerr << "qrl: --pattern must be alternating, random:<p> or fixed:<a|e letters>\n";
    return exit_input;
  }
  qrl::CampaignOptions o;
  o.params.n_vars = a.vars;
  o.params.n_clauses = a.clauses;
  o.params.width_min = widths->first;
  o.params.width_max = widths->second;
  o.params.pattern = *pattern;
  o.params.allow_tautologies = a.tautologies;
  o.params.allow_empty_clauses = a.empty_clauses;
  o.params.seed = a.seed;
  o.count = a.count;
  o.workers = a.workers;
  o.limits = a.limits.resolve();
  o.shrink = !a.no_shrink;
  if (!a.bank.empty()) o.bank = a.bank;
  try {
    o.params.check();
  } catch (qrl::PreconditionError const& e) {
    std::cerr << "qrl: " << e.what() << "\n";
    return exit_input;
  }
  if (a.psi) {
    auto const report = qrl::psi_campaign(o);
    std::cout << report.to_json(!a.no_timing).dump(2) << "\n";
    return report.findings.empty() ? exit_ok : exit_finding;
  }
  auto const report = qrl::campaign(o);
  std::cout << report.to_json(!a.no_timing).dump(2) << "\n";
  return report.findings.empty() ? exit_ok : exit_finding;
}

// shrink --------------------------------------------------------------------

struct ShrinkArgs {
  std::string file;
  std::string invariant;
  bool lenient = false;
  LimitFlags limits;
};

/// "has-clause" keeps any formula with at least one clause; every other name
/// is a finding kind.
std::optional<qrl::ShrinkPredicate> shrink_predicate(std::string const& name, qrl::OracleLimits const& limits) {
  if (name == "has-clause") return [](qrl::Formula const& g) { return g.num_clauses() > 0; };
  auto const kind = qrl::parse_finding(name);
  if (!kind) return std::nullopt;
  return qrl::detail::finding_predicate(*kind, limits);
}

int run_shrink(ShrinkArgs const& a) {
  auto const limits = a.limits.resolve();
  auto const keep = shrink_predicate(a.invariant, limits);
  if (!keep) {
    std::cerr << "qrl: unknown invariant '" << a.invariant << "'; expected has-clause or one of:";
    for (auto k : qrl::all_finding_kinds) std::cerr << " " << qrl::finding_name(k);
    std::cerr << "\n";
    return exit_input;
  }
  auto const f = load(a.file, a.lenient);
  qrl::ShrinkStats stats;
  try {
    auto const g = qrl::shrink(f, *keep, &stats);
    std::cout << qrl::write_qdimacs(g);
  } catch (qrl::PreconditionError const& e) {
    std::cerr << "qrl: " << e.what() << "\n";
    return exit_input;
  }
  std::cerr << "c shrink attempts " << stats.attempts << " accepted " << stats.accepted << " sweeps "
            << stats.sweeps << "\n";
  return exit_ok;
}

// bench ---------------------------------------------------------------------

int run_bench_cmd(qrl::BenchOptions const& o) {
  if (!qrl::BenchFamily::find(o.family)) {
    std::cerr << "qrl: unknown family '" << o.family << "'; expected one of:";
    for (auto const& f : qrl::BenchFamily::all()) std::cerr << " " << f.name;
    std::cerr << "\n";
    return exit_input;
  }
  auto const report = qrl::run_bench(o);
  std::cout << report.to_json().dump(2) << "\n";
  return report.bounds_hold ? exit_ok : exit_finding;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"qrl: literal-closure QBF reduction, exact oracles and a differential fuzzer"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "decide a QDIMACS formula by reduction; exit 10 TRUE, 20 FALSE");
  solve_cmd->add_option("file", solve.file, "QDIMACS input")->required();
  solve_cmd->add_option("--policy", solve.policy, "ascending | descending | random:<seed>");
  solve_cmd->add_option("--trace", solve.trace, "write a qrl-trace/1 JSON trace to this path");
  solve_cmd->add_flag("--early-exit", solve.early_exit, "stop with FALSE as soon as an empty clause appears");
  solve_cmd->add_flag("--lenient", solve.lenient, "bind free variables and relax block rules");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "evaluate exactly; exit 10 TRUE, 20 FALSE, 3 refused");
  oracle_cmd->add_option("file", oracle.file, "QDIMACS input")->required();
  oracle_cmd->add_option("--method", oracle.method, "recursive | elimination");
  oracle_cmd->add_flag("--lenient", oracle.lenient, "bind free variables and relax block rules");
  oracle.limits.add(*oracle_cmd);

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "differential check of one instance; exit 0 clean, 2 finding");
  check_cmd->add_option("file", check.file, "QDIMACS input")->required();
  check_cmd->add_option("--bank", check.bank, "persist the instance here when a check fails");
  check_cmd->add_flag("--lenient", check.lenient, "bind free variables and relax block rules");
  check.limits.add(*check_cmd);

  FuzzArgs fuzz;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "differential campaign; prints a qrl-report/1 JSON report");
  fuzz_cmd->add_option("--vars", fuzz.vars, "variables per instance");
  fuzz_cmd->add_option("--clauses", fuzz.clauses, "clauses per instance");
  fuzz_cmd->add_option("--widths", fuzz.widths, "clause width N or MIN..MAX");
  fuzz_cmd->add_option("--pattern", fuzz.pattern, "alternating | random:<p> | fixed:<letters>");
  fuzz_cmd->add_option("--count", fuzz.count, "number of instances");
  fuzz_cmd->add_option("--seed", fuzz.seed, "instance i uses seed + i");
  fuzz_cmd->add_option("--workers", fuzz.workers, "worker threads (does not affect results)");
  fuzz_cmd->add_option("--bank", fuzz.bank, "counterexample bank directory");
  fuzz_cmd->add_flag("--allow-tautologies", fuzz.tautologies, "draw clause variables with replacement");
  fuzz_cmd->add_flag("--allow-empty-clauses", fuzz.empty_clauses, "allow width 0");
  fuzz_cmd->add_flag("--no-shrink", fuzz.no_shrink, "bank findings without minimising them");
  fuzz_cmd->add_flag("--psi", fuzz.psi, "run the psi construction checks instead");
  fuzz_cmd->add_flag("--no-timing", fuzz.no_timing, "omit the timing member from the report");
  fuzz.limits.add(*fuzz_cmd);

  ShrinkArgs shrink;
  auto* shrink_cmd = app.add_subcommand("shrink", "minimise an instance while an invariant stays violated");
  shrink_cmd->add_option("file", shrink.file, "QDIMACS input")->required();
  shrink_cmd->add_option("--invariant", shrink.invariant, "finding name, or has-clause")->required();
  shrink_cmd->add_flag("--lenient", shrink.lenient, "bind free variables and relax block rules");
  shrink.limits.add(*shrink_cmd);

  qrl::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "scaling measurement of the reduction procedure (advisory)");
  bench_cmd->add_option("--family", bench.family, "random3-alternating | random3-random | random3-existential");
  bench_cmd->add_option("--max-size", bench.max_size, "largest target size");
  bench_cmd->add_option("--min-size", bench.min_size, "smallest target size");
  bench_cmd->add_option("--samples", bench.samples, "instances per size");
  bench_cmd->add_option("--seed", bench.seed, "first seed per size");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*oracle_cmd) return run_oracle(oracle);
    if (*check_cmd) return run_check(check);
    if (*fuzz_cmd) return run_fuzz(fuzz);
    if (*shrink_cmd) return run_shrink(shrink);
    if (*bench_cmd) return run_bench_cmd(bench);
  } catch (Exit const& e) {
    return e.code;
  } catch (qrl::OracleRefusal const& e) {
    std::cerr << "qrl: oracle refused: " << e.what() << "\n";
    return exit_refused;
  } catch (qrl::PreconditionError const& e) {
    std::cerr << "qrl: " << e.what() << "\n";
    return exit_input;
  } catch (qrl::MalformedFormula const& e) {
    std::cerr << "qrl: malformed formula: " << e.what() << "\n";
    return exit_input;
  } catch (qrl::InvariantError const& e) {
    std::cerr << "qrl: internal invariant failed: " << e.what() << "\n";
    return exit_finding;
  } catch (std::exception const& e) {
    std::cerr << "qrl: " << e.what() << "\n";
    return exit_finding;
  }
  return exit_input;
}
