#include "ifb/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "ifb/error.hpp"

namespace ifb {

enum class Op { constant, x, y, r, add, sub, mul, div, neg, pow, min, max, pos, abs };

struct Expression::Node {
  Op op = Op::constant;
  double value = 0.0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
  bool constant = true;
  bool nonnegative = false;
  bool positive = false;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

double eval(const Expression::Node& n, const Point& p) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::x: return p[0];
    case Op::y: return p[1];
    case Op::r: return std::hypot(p[0], p[1]);
    case Op::add: return eval(*n.a, p) + eval(*n.b, p);
    case Op::sub: return eval(*n.a, p) - eval(*n.b, p);
    case Op::mul: return eval(*n.a, p) * eval(*n.b, p);
    case Op::div: return eval(*n.a, p) / eval(*n.b, p);
    case Op::neg: return -eval(*n.a, p);
    case Op::pow: return std::pow(eval(*n.a, p), eval(*n.b, p));
    case Op::min: return std::min(eval(*n.a, p), eval(*n.b, p));
    case Op::max: return std::max(eval(*n.a, p), eval(*n.b, p));
    case Op::pos: return std::max(eval(*n.a, p), 0.0);
    case Op::abs: return std::abs(eval(*n.a, p));
  }
  return 0.0;
}

NodePtr leaf(Op op, double value = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = value;
  n->constant = op == Op::constant;
  n->nonnegative = op == Op::r || (n->constant && value >= 0.0);
  n->positive = n->constant && value > 0.0;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::ParseError, "column " + std::to_string(pos_ + 1) + ": " + message);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->constant = a->constant && (!b || b->constant);
    const bool an = a->nonnegative;
    const bool bn = b && b->nonnegative;
    switch (op) {
      case Op::add:
        n->nonnegative = an && bn;
        n->positive = n->nonnegative && (a->positive || b->positive);
        break;
      case Op::mul:
      case Op::div:
        n->nonnegative = an && bn;
        n->positive = a->positive && b->positive;
        break;
      case Op::pow:
        n->nonnegative = an;
        n->positive = a->positive;
        break;
      case Op::min:
        n->nonnegative = an && bn;
        n->positive = a->positive && b->positive;
        break;
      case Op::max:
        n->nonnegative = an || bn;
        n->positive = a->positive || b->positive;
        break;
      case Op::pos:
      case Op::abs:
        n->nonnegative = true;
        break;
      default:
        break;
    }
    n->a = std::move(a);
    n->b = std::move(b);
    if (n->constant) {
      const double v = eval(*n, Point{});
      if (!std::isfinite(v)) fail("constant subexpression is not finite");
      return leaf(Op::constant, v);
    }
    return n;
  }

  NodePtr expr() {
    NodePtr n = term();
    while (true) {
      if (accept('+')) {
        n = binary(Op::add, n, term());
      } else if (accept('-')) {
        n = binary(Op::sub, n, term());
      } else {
        return n;
      }
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    while (true) {
      if (accept('*')) {
        n = binary(Op::mul, n, unary());
      } else if (accept('/')) {
        NodePtr d = unary();
        if (!d->constant || d->value == 0.0) fail("divisor must be a nonzero constant");
        n = binary(Op::div, n, d);
      } else {
        return n;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      NodePtr a = unary();
      if (a->constant) return leaf(Op::constant, -a->value);
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::neg;
      n->constant = false;
      n->a = std::move(a);
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power_of(NodePtr base, NodePtr exponent) {
    if (exponent->constant) {
      const double e = exponent->value;
      const bool integer = e == std::floor(e);
      if (e < 0.0 && !base->positive) fail("negative exponent needs a provably positive base");
      if (!integer && !base->nonnegative) fail("fractional exponent needs a provably nonnegative base");
    } else if (!base->positive) {
      fail("variable exponent needs a provably positive base");
    }
    NodePtr n = binary(Op::pow, base, exponent);
    if (!n->constant && exponent->constant && exponent->value == std::floor(exponent->value) &&
        std::fmod(exponent->value, 2.0) == 0.0) {
      auto copy = std::make_shared<Expression::Node>(*n);
      copy->nonnegative = true;
      return copy;
    }
    return n;
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return power_of(base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return leaf(Op::constant, value);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string id(text_.substr(start, pos_ - start));
    if (id == "x" || id == "x1") return leaf(Op::x);
    if (id == "y" || id == "x2") return leaf(Op::y);
    if (id == "r") return leaf(Op::r);
    if (id == "pi") return leaf(Op::constant, 3.14159265358979323846);
    std::vector<NodePtr> args;
    if (!accept('(')) fail("unknown name '" + id + "'");
    args.push_back(expr());
    while (accept(',')) args.push_back(expr());
    expect(')');
    const auto arity = [&](std::size_t n) {
      if (args.size() != n) fail(id + " takes " + std::to_string(n) + " argument(s)");
    };
    if (id == "min" || id == "max") {
      arity(2);
      return binary(id == "min" ? Op::min : Op::max, args[0], args[1]);
    }
    if (id == "pos" || id == "abs") {
      arity(1);
      return binary(id == "pos" ? Op::pos : Op::abs, args[0], nullptr);
    }
    if (id == "powf") {
      arity(2);
      return power_of(args[0], args[1]);
    }
    fail("unknown function '" + id + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Expression::Expression() : source_("0"), root_(leaf(Op::constant, 0.0)) {}

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.source_ = trim(text);
  if (e.source_.empty()) throw Error(ErrorCode::ParseError, "empty expression");
  e.root_ = Parser(e.source_).parse();
  return e;
}

double Expression::operator()(const Point& p) const { return eval(*root_, p); }

bool Expression::is_constant() const { return root_->constant; }

PointFunction Expression::function() const {
  return [root = root_](const Point& p) { return eval(*root, p); };
}

double eval_constant(std::string_view text) {
  const Expression e = Expression::parse(text);
  if (!e.is_constant()) throw Error(ErrorCode::ParseError, "'" + e.source() + "' must be a constant");
  return e(Point{});
}

}  // namespace ifb
