#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "formula.hpp"

namespace qrl {

enum class ParseErrorKind {
  missing_header,
  bad_header,
  bad_token,
  variable_out_of_range,
  unterminated_clause,
  duplicate_quantification,
  free_variable,
  clause_count_mismatch,
  quantifier_order,
  empty_quantifier_block,
};

inline char const* parse_error_name(ParseErrorKind k) {
  switch (k) {
  case ParseErrorKind::missing_header: return "missing-header";
  case ParseErrorKind::bad_header: return "bad-header";
  case ParseErrorKind::bad_token: return "bad-token";
  case ParseErrorKind::variable_out_of_range: return "variable-out-of-range";
  case ParseErrorKind::unterminated_clause: return "unterminated-clause";
  case ParseErrorKind::duplicate_quantification: return "duplicate-quantification";
  case ParseErrorKind::free_variable: return "free-variable";
  case ParseErrorKind::clause_count_mismatch: return "clause-count-mismatch";
  case ParseErrorKind::quantifier_order: return "quantifier-order";
  case ParseErrorKind::empty_quantifier_block: return "empty-quantifier-block";
  }
  return "unknown";
}

struct ParseDiagnostic {
  std::size_t line = 0;     // 1-based
  std::size_t column = 0;   // 1-based
  ParseErrorKind kind = ParseErrorKind::bad_token;
  std::string message;

  std::string to_string() const {
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
           parse_error_name(kind) + ": " + message;
  }
};

struct ParseOptions {
  /// Lenient mode binds free variables existentially (outermost, ascending),
  /// merges adjacent same-quantifier lines, ignores empty quantifier blocks
  /// and tolerates a clause count different from the header.
  bool lenient = false;
};

using ParseResult = std::variant<Formula, ParseDiagnostic>;

/// Variable indices above this are rejected in the header.
inline constexpr std::int64_t max_qdimacs_vars = std::int64_t{1} << 24;

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i >= line.size()) break;
    auto const start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  auto const* first = s.data();
  auto const* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

} // namespace detail

/// Parse QDIMACS text. Never throws on malformed input; every rejection is a
/// single diagnostic with a line number.
inline ParseResult parse_qdimacs(std::string_view text, ParseOptions const& options = {}) {
  auto fail = [](std::size_t line, std::size_t col, ParseErrorKind kind, std::string msg) -> ParseResult {
    return ParseDiagnostic{line, col, kind, std::move(msg)};
  };

  bool have_header = false;
  std::int64_t nvars = 0, nclauses = 0;
  std::vector<PrefixEntry> prefix;
  std::vector<std::uint8_t> quantified;
  std::optional<Quantifier> last_block;
  bool in_matrix = false;

  std::vector<Clause> clauses;
  std::vector<Literal> pending;
  bool clause_open = false;
  std::size_t clause_line = 0, clause_col = 0;
  std::vector<std::size_t> clause_lines;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto const eol = text.find('\n', pos);
    auto const line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    auto const tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    auto const head = tokens.front().text;
    if (head.front() == 'c') continue;

    if (!have_header) {
      if (head != "p")
        return fail(line_no, tokens.front().column, ParseErrorKind::missing_header,
                    "expected 'p cnf <vars> <clauses>' before any other line");
      if (tokens.size() != 4 || tokens[1].text != "cnf")
        return fail(line_no, tokens.front().column, ParseErrorKind::bad_header,
                    "header must be 'p cnf <vars> <clauses>'");
      auto const v = detail::to_int(tokens[2].text);
      auto const m = detail::to_int(tokens[3].text);
      if (!v || *v < 0 || *v > max_qdimacs_vars)
        return fail(line_no, tokens[2].column, ParseErrorKind::bad_header, "invalid variable count");
      if (!m || *m < 0)
        return fail(line_no, tokens[3].column, ParseErrorKind::bad_header, "invalid clause count");
      nvars = *v;
      nclauses = *m;
      quantified.assign(static_cast<std::size_t>(nvars) + 1, 0);
      have_header = true;
      continue;
    }

    if (head == "p")
      return fail(line_no, tokens.front().column, ParseErrorKind::bad_header, "duplicate header");

    if (head == "e" || head == "a") {
      auto const q = head == "e" ? Quantifier::existential : Quantifier::universal;
      if (in_matrix || clause_open)
        return fail(line_no, tokens.front().column, ParseErrorKind::quantifier_order,
                    "quantifier line after the first clause");
      if (last_block == q && !options.lenient)
        return fail(line_no, tokens.front().column, ParseErrorKind::quantifier_order,
                    "adjacent quantifier lines with the same quantifier");
      bool terminated = false;
      std::size_t block_size = 0;
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        auto const& t = tokens[i];
        if (terminated)
          return fail(line_no, t.column, ParseErrorKind::bad_token, "token after terminating 0");
        auto const v = detail::to_int(t.text);
        if (!v) return fail(line_no, t.column, ParseErrorKind::bad_token, "expected an integer");
        if (*v == 0) {
          terminated = true;
          continue;
        }
        if (*v < 0 || *v > nvars)
          return fail(line_no, t.column, ParseErrorKind::variable_out_of_range,
                      "variable " + std::string(t.text) + " outside 1.." + std::to_string(nvars));
        auto const var = static_cast<Var>(*v);
        if (quantified[var])
          return fail(line_no, t.column, ParseErrorKind::duplicate_quantification,
                      "variable " + std::to_string(var) + " quantified twice");
        quantified[var] = 1;
        prefix.push_back({var, q});
        ++block_size;
      }
      if (!terminated)
        return fail(line_no, line.size() + 1, ParseErrorKind::unterminated_clause,
                    "quantifier line not terminated by 0");
      if (block_size == 0) {
        if (!options.lenient)
          return fail(line_no, tokens.front().column, ParseErrorKind::empty_quantifier_block,
                      "quantifier line binds no variable");
        continue;
      }
      last_block = q;
      continue;
    }

    for (auto const& t : tokens) {
      auto const v = detail::to_int(t.text);
      if (!v) return fail(line_no, t.column, ParseErrorKind::bad_token, "expected an integer literal");
      if (!clause_open) {
        clause_open = true;
        clause_line = line_no;
        clause_col = t.column;
        in_matrix = true;
      }
      if (*v == 0) {
        clauses.push_back(make_clause(ClauseId{static_cast<std::uint32_t>(clauses.size() + 1)}, pending));
        clause_lines.push_back(clause_line);
        pending.clear();
        clause_open = false;
        continue;
      }
      auto const mag = *v < 0 ? -*v : *v;
      if (*v == INT64_MIN || mag > nvars)
        return fail(line_no, t.column, ParseErrorKind::variable_out_of_range,
                    "literal " + std::string(t.text) + " outside +-1.." + std::to_string(nvars));
      pending.push_back(Literal::from_dimacs(*v));
    }
  }

  if (!have_header)
    return fail(line_no == 0 ? 1 : line_no, 1, ParseErrorKind::missing_header, "no 'p cnf' header");
  if (clause_open)
    return fail(clause_line, clause_col, ParseErrorKind::unterminated_clause, "clause not terminated by 0");
  if (!options.lenient && static_cast<std::int64_t>(clauses.size()) != nclauses)
    return fail(line_no, 1, ParseErrorKind::clause_count_mismatch,
                "header declares " + std::to_string(nclauses) + " clauses, found " +
                    std::to_string(clauses.size()));

  std::vector<Var> free_vars;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    for (auto u : clauses[i].lits) {
      if (quantified[u.var()]) continue;
      if (!options.lenient)
        return fail(clause_lines[i], 1, ParseErrorKind::free_variable,
                    "variable " + std::to_string(u.var()) + " is not quantified");
      quantified[u.var()] = 1;
      free_vars.push_back(u.var());
    }
  }
  if (!free_vars.empty()) {
    std::sort(free_vars.begin(), free_vars.end());
    std::vector<PrefixEntry> bound;
    for (auto v : free_vars) bound.push_back({v, Quantifier::existential});
    bound.insert(bound.end(), prefix.begin(), prefix.end());
    prefix = std::move(bound);
  }
  return Formula(Prefix(std::move(prefix)), std::move(clauses));
}

inline Formula parse_qdimacs_or_throw(std::string_view text, ParseOptions const& options = {}) {
  auto r = parse_qdimacs(text, options);
  if (auto const* d = std::get_if<ParseDiagnostic>(&r)) throw MalformedFormula(d->to_string());
  return std::get<Formula>(std::move(r));
}

/// Canonical text: header, maximal quantifier blocks outermost first, clauses
/// in id order, literals by ascending variable with the negative one first.
inline std::string write_qdimacs(Formula const& f) {
  if (auto const v = validate(f); !v.empty())
    throw MalformedFormula("write_qdimacs: " + v.front().describe());

  std::string out = "p cnf " + std::to_string(f.max_var()) + " " + std::to_string(f.num_clauses()) + "\n";
  auto const entries = f.prefix().entries();
  for (std::size_t i = 0; i < entries.size();) {
    auto const q = entries[i].quantifier;
    out += quantifier_letter(q);
    for (; i < entries.size() && entries[i].quantifier == q; ++i) {
      out += ' ';
      out += std::to_string(entries[i].var);
    }
    out += " 0\n";
  }
  for (auto const& c : f.clauses()) {
    for (auto u : c.lits) {
      out += std::to_string(u.to_dimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

} // namespace qrl
