#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include "errors.hpp"

namespace qrl {

using Var = std::uint32_t;

enum class Quantifier : std::uint8_t { universal, existential };

constexpr char quantifier_letter(Quantifier q) {
  return q == Quantifier::universal ? 'a' : 'e';
}

/// x^a with a = 1 for x and a = 0 for the negation.
///
/// Encoded as 2 * var + a, so sorting by code orders literals by variable and
/// puts the negative literal first.
class Literal {
public:
  constexpr Literal() = default;
  constexpr Literal(Var var, bool positive)
      : code_(2 * var + (positive ? 1u : 0u)) {}

  static constexpr Literal from_code(std::uint32_t code) {
    Literal l;
    l.code_ = code;
    return l;
  }

  static Literal from_dimacs(std::int64_t value) {
    if (value == 0) throw PreconditionError("literal 0 is not a literal");
    auto const var = static_cast<Var>(value < 0 ? -value : value);
    return Literal(var, value > 0);
  }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool positive() const { return (code_ & 1u) != 0; }
  constexpr unsigned polarity() const { return code_ & 1u; }
  constexpr std::uint32_t code() const { return code_; }

  std::int64_t to_dimacs() const {
    return positive() ? static_cast<std::int64_t>(var())
                      : -static_cast<std::int64_t>(var());
  }

  /// "+3" / "-3"
  std::string to_signed_string() const {
    return (positive() ? "+" : "-") + std::to_string(var());
  }

  /// "x3" / "~x3"
  std::string to_string() const {
    return (positive() ? "x" : "~x") + std::to_string(var());
  }

  constexpr auto operator<=>(Literal const&) const = default;

private:
  std::uint32_t code_ = 0;
};

constexpr Literal negate(Literal u) { return Literal::from_code(u.code() ^ 1u); }

} // namespace qrl

template <>
struct std::hash<qrl::Literal> {
  std::size_t operator()(qrl::Literal l) const noexcept {
    return std::hash<std::uint32_t>{}(l.code());
  }
};
