#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "formula.hpp"
#include "random.hpp"

namespace qrl {

struct QuantPattern {
  enum class Kind { random, alternating, fixed };

  Kind kind = Kind::alternating;
  double p_universal = 0.5;
  std::string letters;   // FIXED: one of 'a' / 'e' per variable, outermost first

  static QuantPattern random(double p) { return {Kind::random, p, {}}; }
  /// a, e, a, e, ... starting with a universal outermost variable.
  static QuantPattern alternating() { return {Kind::alternating, 0.5, {}}; }
  static QuantPattern fixed(std::string letters) { return {Kind::fixed, 0.5, std::move(letters)}; }

  /// "alternating", "random:<p>" or "fixed:<letters>".
  std::string to_string() const {
    switch (kind) {
    case Kind::random: {
      nlohmann::json p = p_universal;
      return "random:" + p.dump();
    }
    case Kind::alternating: return "alternating";
    case Kind::fixed: return "fixed:" + letters;
    }
    return "?";
  }

  static std::optional<QuantPattern> parse(std::string const& text) {
    if (text == "alternating") return alternating();
    if (text.rfind("fixed:", 0) == 0) {
      auto letters = text.substr(6);
      for (char c : letters)
        if (c != 'a' && c != 'e') return std::nullopt;
      return fixed(std::move(letters));
    }
    if (text.rfind("random:", 0) == 0) {
      try {
        std::size_t used = 0;
        auto const p = std::stod(text.substr(7), &used);
        if (used != text.size() - 7 || !(p >= 0.0 && p <= 1.0)) return std::nullopt;
        return random(p);
      } catch (std::exception const&) {
        return std::nullopt;
      }
    }
    return std::nullopt;
  }
};

struct GenParams {
  std::size_t n_vars = 8;
  std::size_t n_clauses = 12;
  std::size_t width_min = 1;
  std::size_t width_max = 3;
  QuantPattern pattern = QuantPattern::alternating();
  bool allow_tautologies = false;
  bool allow_empty_clauses = false;
  std::uint64_t seed = 1;

  /// Throws PreconditionError when no formula satisfies the parameters.
  void check() const {
    if (width_min < 1 || width_min > width_max)
      throw PreconditionError("widths must satisfy 1 <= min <= max");
    if (n_clauses > 0 && width_max > n_vars)
      throw PreconditionError("clause width " + std::to_string(width_max) + " exceeds " +
                              std::to_string(n_vars) + " variables");
    if (pattern.kind == QuantPattern::Kind::fixed && pattern.letters.size() != n_vars)
      throw PreconditionError("fixed quantifier pattern must have one letter per variable");
    if (pattern.kind == QuantPattern::Kind::random && !(pattern.p_universal >= 0.0 && pattern.p_universal <= 1.0))
      throw PreconditionError("universal probability must lie in [0, 1]");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["n_vars"] = n_vars;
    j["n_clauses"] = n_clauses;
    j["width_min"] = width_min;
    j["width_max"] = width_max;
    j["quant_pattern"] = pattern.to_string();
    j["allow_tautologies"] = allow_tautologies;
    j["allow_empty_clauses"] = allow_empty_clauses;
    j["seed"] = seed;
    return j;
  }

  static GenParams from_json(nlohmann::ordered_json const& j) {
    GenParams p;
    p.n_vars = j.at("n_vars").get<std::size_t>();
    p.n_clauses = j.at("n_clauses").get<std::size_t>();
    p.width_min = j.at("width_min").get<std::size_t>();
    p.width_max = j.at("width_max").get<std::size_t>();
    auto pattern = QuantPattern::parse(j.at("quant_pattern").get<std::string>());
    if (!pattern) throw PreconditionError("bad quant_pattern in parameters");
    p.pattern = *pattern;
    p.allow_tautologies = j.at("allow_tautologies").get<bool>();
    p.allow_empty_clauses = j.at("allow_empty_clauses").get<bool>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
  }
};

/// Random prenex CNF formula, a pure function of `params` (seed included).
///
/// The prefix binds x1..xn in index order. Each clause draws its width
/// uniformly from [width_min, width_max] (0 is added to the range when empty
/// clauses are allowed), then distinct variables without replacement and a
/// fair polarity per literal. With allow_tautologies, variables are drawn
/// with replacement, so a clause may repeat a variable in either polarity.
inline Formula gen_random(GenParams const& params) {
  params.check();
  Rng rng(params.seed);

  std::vector<PrefixEntry> prefix;
  for (std::size_t i = 0; i < params.n_vars; ++i) {
    Quantifier q = Quantifier::existential;
    switch (params.pattern.kind) {
    case QuantPattern::Kind::random:
      q = rng.unit() < params.pattern.p_universal ? Quantifier::universal : Quantifier::existential;
      break;
    case QuantPattern::Kind::alternating:
      q = i % 2 == 0 ? Quantifier::universal : Quantifier::existential;
      break;
    case QuantPattern::Kind::fixed:
      q = params.pattern.letters[i] == 'a' ? Quantifier::universal : Quantifier::existential;
      break;
    }
    prefix.push_back({static_cast<Var>(i + 1), q});
  }

  std::vector<Var> pool(params.n_vars);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<Var>(i + 1);

  std::vector<Clause> clauses;
  for (std::size_t c = 0; c < params.n_clauses; ++c) {
    std::size_t width = 0;
    if (params.allow_empty_clauses) {
      auto const k = rng.below(params.width_max - params.width_min + 2);
      width = k == 0 ? 0 : params.width_min + k - 1;
    } else {
      width = static_cast<std::size_t>(rng.between(params.width_min, params.width_max));
    }
    std::vector<Literal> lits;
    for (std::size_t k = 0; k < width; ++k) {
      Var v = 0;
      if (params.allow_tautologies) {
        v = static_cast<Var>(rng.between(1, params.n_vars));
      } else {
        // partial Fisher-Yates: pool[0..k) holds the variables drawn so far
        auto const j = k + static_cast<std::size_t>(rng.below(pool.size() - k));
        std::swap(pool[k], pool[j]);
        v = pool[k];
      }
      lits.emplace_back(v, rng.coin());
    }
    clauses.push_back(make_clause(ClauseId{static_cast<std::uint32_t>(c + 1)}, std::move(lits)));
  }
  return Formula(Prefix(std::move(prefix)), std::move(clauses));
}

} // namespace qrl
