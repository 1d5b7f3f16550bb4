#pragma once

// Arithmetic expressions over the coordinates, used for sources and
// boundary data in experiment configurations.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Names: x, y, x1 (= x), x2 (= y), r (= |x|). Functions: min, max, pos
// (positive part), abs, powf (= a ^ b).

#include <memory>
#include <string>
#include <string_view>

#include "ifb/field.hpp"

namespace ifb {

class Expression {
 public:
  struct Node;

  Expression();

  /// ParseError on malformed text and on expressions that could leave the
  /// reals: a divisor that is not a nonzero constant, or a power whose base
  /// is not provably nonnegative (integer exponents excepted) or, for a
  /// negative exponent, not provably positive.
  static Expression parse(std::string_view text);

  double operator()(const Point& p) const;
  bool is_constant() const;
  const std::string& source() const { return source_; }
  PointFunction function() const;

  bool operator==(const Expression& other) const { return source_ == other.source_; }

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

/// Parses and evaluates a constant expression such as "1/64"; ParseError
/// when it mentions a coordinate.
double eval_constant(std::string_view text);

}  // namespace ifb
