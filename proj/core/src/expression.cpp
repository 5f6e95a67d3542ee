#include "ifsm/expression.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <iomanip>

#include "ifsm/error.hpp"

namespace ifsm {

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Kind;

NodePtr make_node(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
  auto node = std::make_shared<Expression::Node>();
  node->kind = kind;
  node->value = value;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    skip_space();
    if (at_end()) fail("empty expression");
    NodePtr node = expr();
    skip_space();
    if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return node;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::SyntaxError, what + " at position " + std::to_string(pos_));
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Kind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(Kind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Kind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_node(Kind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      NodePtr operand = unary();
      if (operand->kind == Kind::Constant) {
        return make_node(Kind::Constant, nullptr, nullptr, -operand->value);
      }
      return make_node(Kind::Neg, operand);
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_node(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (at_end()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double value = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
    if (ec != std::errc()) fail("malformed number");
    pos_ = start + static_cast<std::size_t>(ptr - first);
    return make_node(Kind::Constant, nullptr, nullptr, value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") return make_node(Kind::VarX);
    if (name == "y") return make_node(Kind::VarY);
    if (name == "pi") return make_node(Kind::Constant, nullptr, nullptr, std::numbers::pi);
    if (name == "e") return make_node(Kind::Constant, nullptr, nullptr, std::numbers::e);

    Kind fn;
    if (name == "exp") {
      fn = Kind::Exp;
    } else if (name == "ln") {
      fn = Kind::Ln;
    } else if (name == "sin") {
      fn = Kind::Sin;
    } else if (name == "cos") {
      fn = Kind::Cos;
    } else if (name == "abs") {
      fn = Kind::Abs;
    } else {
      throw Error(ErrorCode::UnknownIdentifier,
                  "'" + std::string(name) + "' at position " + std::to_string(start));
    }
    if (!accept('(')) fail("expected '(' after " + std::string(name));
    NodePtr arg = expr();
    if (!accept(')')) fail("expected ')'");
    return make_node(fn, arg);
  }
};

double eval(const Expression::Node& n, double x, double y) {
  switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::VarX: return x;
    case Kind::VarY: return y;
    case Kind::Add: return eval(*n.lhs, x, y) + eval(*n.rhs, x, y);
    case Kind::Sub: return eval(*n.lhs, x, y) - eval(*n.rhs, x, y);
    case Kind::Mul: return eval(*n.lhs, x, y) * eval(*n.rhs, x, y);
    case Kind::Div: {
      const double den = eval(*n.rhs, x, y);
      if (den == 0.0) throw Error(ErrorCode::DomainError, "division by zero");
      return eval(*n.lhs, x, y) / den;
    }
    case Kind::Pow: return std::pow(eval(*n.lhs, x, y), eval(*n.rhs, x, y));
    case Kind::Neg: return -eval(*n.lhs, x, y);
    case Kind::Exp: return std::exp(eval(*n.lhs, x, y));
    case Kind::Ln: {
      const double arg = eval(*n.lhs, x, y);
      if (!(arg > 0.0)) throw Error(ErrorCode::DomainError, "ln of non-positive value");
      return std::log(arg);
    }
    case Kind::Sin: return std::sin(eval(*n.lhs, x, y));
    case Kind::Cos: return std::cos(eval(*n.lhs, x, y));
    case Kind::Abs: return std::abs(eval(*n.lhs, x, y));
  }
  return 0.0;
}

void print(const Expression::Node& n, std::ostream& os) {
  auto binary = [&](const char* op) {
    os << '(';
    print(*n.lhs, os);
    os << ' ' << op << ' ';
    print(*n.rhs, os);
    os << ')';
  };
  auto call = [&](const char* name) {
    os << name << '(';
    print(*n.lhs, os);
    os << ')';
  };
  switch (n.kind) {
    case Kind::Constant:
      if (n.value < 0.0) {
        os << "(-" << std::setprecision(17) << -n.value << ')';
      } else {
        os << std::setprecision(17) << n.value;
      }
      break;
    case Kind::VarX: os << 'x'; break;
    case Kind::VarY: os << 'y'; break;
    case Kind::Add: binary("+"); break;
    case Kind::Sub: binary("-"); break;
    case Kind::Mul: binary("*"); break;
    case Kind::Div: binary("/"); break;
    case Kind::Pow: binary("^"); break;
    case Kind::Neg:
      os << "(-";
      print(*n.lhs, os);
      os << ')';
      break;
    case Kind::Exp: call("exp"); break;
    case Kind::Ln: call("ln"); break;
    case Kind::Sin: call("sin"); break;
    case Kind::Cos: call("cos"); break;
    case Kind::Abs: call("abs"); break;
  }
}

bool mentions_y(const Expression::Node& n) {
  if (n.kind == Kind::VarY) return true;
  return (n.lhs && mentions_y(*n.lhs)) || (n.rhs && mentions_y(*n.rhs));
}

bool same_tree(const Expression::Node& a, const Expression::Node& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Kind::Constant) return a.value == b.value;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !same_tree(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !same_tree(*a.rhs, *b.rhs)) return false;
  return true;
}

}  // namespace

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

Expression Expression::constant(double value) {
  return Expression(make_node(Kind::Constant, nullptr, nullptr, value));
}

double Expression::evaluate(double x, double y) const {
  const double v = eval(*root_, x, y);
  if (!std::isfinite(v)) throw Error(ErrorCode::DomainError, "non-finite value of " + to_string());
  return v;
}

std::string Expression::to_string() const {
  std::ostringstream os;
  print(*root_, os);
  return os.str();
}

bool Expression::uses_y() const { return mentions_y(*root_); }

bool equivalent(const Expression& a, const Expression& b) { return same_tree(a.root(), b.root()); }

}  // namespace ifsm
