#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "generator.hpp"
#include "reducer.hpp"

namespace qrl {

/// A scalable instance family: random 3-CNF with twice as many clauses as
/// variables, under a fixed quantifier pattern.
struct BenchFamily {
  std::string name;
  QuantPattern pattern;

  static std::vector<BenchFamily> all() {
    return {{"random3-alternating", QuantPattern::alternating()},
            {"random3-random", QuantPattern::random(0.5)},
            {"random3-existential", QuantPattern::random(0.0)}};
  }

  static std::optional<BenchFamily> find(std::string const& name) {
    for (auto const& f : all())
      if (f.name == name) return f;
    return std::nullopt;
  }

  static constexpr std::size_t clause_ratio = 2;
  static constexpr std::size_t width = 3;

  /// size = n + m + 3m = 9n for n variables.
  static std::size_t vars_for_size(std::size_t target) { return std::max<std::size_t>(width, target / 9); }

  GenParams params(std::size_t n_vars, std::uint64_t seed) const {
    GenParams p;
    p.n_vars = n_vars;
    p.n_clauses = clause_ratio * n_vars;
    p.width_min = width;
    p.width_max = width;
    p.pattern = pattern;
    p.seed = seed;
    return p;
  }
};

struct BenchSample {
  std::size_t size = 0;
  std::size_t vars = 0;
  std::size_t clauses = 0;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  std::size_t closures = 0;
  std::size_t max_closure_iterations = 0;
  bool verdict = false;
  double ms = 0;

  bool steps_within_size() const { return steps <= size; }
  bool iterations_within_cap() const { return max_closure_iterations <= closure_iteration_cap(vars); }
};

struct BenchOptions {
  std::string family = "random3-alternating";
  std::size_t min_size = 32;
  std::size_t max_size = 10000;
  std::size_t samples = 3;        // per size
  std::uint64_t seed = 1;
};

struct BenchReport {
  std::string family;
  std::vector<BenchSample> samples;
  std::optional<double> exponent;   // least-squares slope of log(ms) on log(size)
  bool bounds_hold = true;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "qrl-bench/1";
    j["family"] = family;
    auto rows = nlohmann::ordered_json::array();
    for (auto const& s : samples) {
      nlohmann::ordered_json r;
      r["size"] = s.size;
      r["vars"] = s.vars;
      r["clauses"] = s.clauses;
      r["seed"] = s.seed;
      r["verdict"] = s.verdict ? "TRUE" : "FALSE";
      r["steps"] = s.steps;
      r["closures"] = s.closures;
      r["max_closure_iterations"] = s.max_closure_iterations;
      r["closure_iteration_cap"] = closure_iteration_cap(s.vars);
      r["ms"] = s.ms;
      rows.push_back(std::move(r));
    }
    j["samples"] = std::move(rows);
    if (exponent) j["fitted_exponent"] = *exponent;
    else j["fitted_exponent"] = nullptr;
    j["bounds_hold"] = bounds_hold;
    return j;
  }
};

/// Least-squares slope of log(y) against log(x) over points with x, y > 0.
inline std::optional<double> fit_exponent(std::vector<std::pair<double, double>> const& points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (auto const& [x, y] : points) {
    if (!(x > 0 && y > 0)) continue;
    double const lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  double const den = static_cast<double>(n) * sxx - sx * sx;
  if (n < 2 || std::abs(den) < 1e-12) return std::nullopt;
  return (static_cast<double>(n) * sxy - sx * sy) / den;
}

/// Target sizes max_size, max_size/2, ... down to min_size (ascending in the
/// report); `samples` seeds per size.
inline BenchReport run_bench(BenchOptions const& options) {
  auto const family = BenchFamily::find(options.family);
  if (!family) throw PreconditionError("unknown bench family '" + options.family + "'");
  BenchReport report;
  report.family = family->name;
  if (options.samples == 0) return report;

  std::vector<std::size_t> targets;
  for (auto t = options.max_size; t >= std::max<std::size_t>(options.min_size, 1); t /= 2) targets.push_back(t);
  std::reverse(targets.begin(), targets.end());

  std::vector<std::pair<double, double>> points;
  for (auto const target : targets) {
    auto const n = BenchFamily::vars_for_size(target);
    for (std::size_t k = 0; k < options.samples; ++k) {
      auto const params = family->params(n, options.seed + k);
      auto const f = gen_random(params);
      auto const t0 = std::chrono::steady_clock::now();
      auto const trace = decide(f);
      auto const t1 = std::chrono::steady_clock::now();
      BenchSample s;
      s.size = size(f);
      s.vars = f.num_vars();
      s.clauses = f.num_clauses();
      s.seed = params.seed;
      s.steps = trace.steps.size();
      s.closures = trace.closures_computed;
      s.max_closure_iterations = trace.max_closure_iterations;
      s.verdict = trace.verdict;
      s.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      report.bounds_hold = report.bounds_hold && s.steps_within_size() && s.iterations_within_cap();
      points.emplace_back(static_cast<double>(s.size), s.ms);
      report.samples.push_back(s);
    }
  }
  report.exponent = fit_exponent(points);
  return report;
}

} // namespace qrl
