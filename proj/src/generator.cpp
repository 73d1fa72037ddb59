#include "confbend/generator.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace confbend {

struct Expr::Node {
  enum class Op { constant, coord, add, mul, neg, sin, cos, exp, pow };
  Op op = Op::constant;
  double value = 0.0;  // constant
  int index = 0;       // coordinate axis, or exponent for pow
  std::vector<Expr> args;
};

using Op = Expr::Node::Op;

struct ExprBuilder {
  static Expr make(Op op, std::vector<Expr> args, int index = 0) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->index = index;
    n->args = std::move(args);
    return Expr(std::shared_ptr<const Expr::Node>(std::move(n)));
  }
};

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->value = value;
  node_ = std::move(n);
}

Expr Expr::coord(int axis) {
  if (axis < 0) throw std::invalid_argument("Expr::coord: negative axis");
  return ExprBuilder::make(Op::coord, {}, axis);
}

bool Expr::is_constant() const { return node_->op == Op::constant; }
double Expr::constant_value() const { return node_->value; }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() + b.constant_value());
  if (a.is_constant() && a.constant_value() == 0.0) return b;
  if (b.is_constant() && b.constant_value() == 0.0) return a;
  return ExprBuilder::make(Op::add, {a, b});
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.constant_value());
  if (a.node().op == Op::neg) return a.node().args[0];
  return ExprBuilder::make(Op::neg, {a});
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() * b.constant_value());
  if ((a.is_constant() && a.constant_value() == 0.0) || (b.is_constant() && b.constant_value() == 0.0))
    return Expr(0.0);
  if (a.is_constant() && a.constant_value() == 1.0) return b;
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  return ExprBuilder::make(Op::mul, {a, b});
}

Expr sin(const Expr& a) {
  if (a.is_constant()) return Expr(std::sin(a.constant_value()));
  return ExprBuilder::make(Op::sin, {a});
}

Expr cos(const Expr& a) {
  if (a.is_constant()) return Expr(std::cos(a.constant_value()));
  return ExprBuilder::make(Op::cos, {a});
}

Expr exp(const Expr& a) {
  if (a.is_constant()) return Expr(std::exp(a.constant_value()));
  return ExprBuilder::make(Op::exp, {a});
}

Expr pow(const Expr& a, int p) {
  if (p == 0) return Expr(1.0);
  if (p == 1) return a;
  if (a.is_constant()) return Expr(std::pow(a.constant_value(), p));
  return ExprBuilder::make(Op::pow, {a}, p);
}

double Expr::eval(std::span<const double> x) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::coord:
      if (static_cast<std::size_t>(n.index) >= x.size())
        throw std::out_of_range("Expr::eval: coordinate x" + std::to_string(n.index) + " out of range");
      return x[n.index];
    case Op::add: return n.args[0].eval(x) + n.args[1].eval(x);
    case Op::mul: return n.args[0].eval(x) * n.args[1].eval(x);
    case Op::neg: return -n.args[0].eval(x);
    case Op::sin: return std::sin(n.args[0].eval(x));
    case Op::cos: return std::cos(n.args[0].eval(x));
    case Op::exp: return std::exp(n.args[0].eval(x));
    case Op::pow: return std::pow(n.args[0].eval(x), n.index);
  }
  return 0.0;
}

Expr Expr::diff(int axis) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::constant: return Expr(0.0);
    case Op::coord: return Expr(n.index == axis ? 1.0 : 0.0);
    case Op::add: return n.args[0].diff(axis) + n.args[1].diff(axis);
    case Op::mul: return n.args[0].diff(axis) * n.args[1] + n.args[0] * n.args[1].diff(axis);
    case Op::neg: return -n.args[0].diff(axis);
    case Op::sin: return cos(n.args[0]) * n.args[0].diff(axis);
    case Op::cos: return -(sin(n.args[0]) * n.args[0].diff(axis));
    case Op::exp: return *this * n.args[0].diff(axis);
    case Op::pow: return Expr(static_cast<double>(n.index)) * pow(n.args[0], n.index - 1) * n.args[0].diff(axis);
  }
  return Expr(0.0);
}

std::string Expr::str() const {
  const Node& n = *node_;
  std::ostringstream os;
  os.precision(17);
  switch (n.op) {
    case Op::constant:
      if (n.value < 0) os << "(" << n.value << ")";
      else os << n.value;
      break;
    case Op::coord: os << "x" << n.index; break;
    case Op::add: os << "(" << n.args[0].str() << " + " << n.args[1].str() << ")"; break;
    case Op::mul: os << n.args[0].str() << "*" << n.args[1].str(); break;
    case Op::neg: os << "(-" << n.args[0].str() << ")"; break;
    case Op::sin: os << "sin(" << n.args[0].str() << ")"; break;
    case Op::cos: os << "cos(" << n.args[0].str() << ")"; break;
    case Op::exp: os << "exp(" << n.args[0].str() << ")"; break;
    case Op::pow: os << "(" << n.args[0].str() << ")^" << n.index; break;
  }
  return os.str();
}

namespace {

// expr   := term (('+'|'-') term)*
// term   := unary (('*') unary)*
// unary  := '-' unary | power
// power  := atom ('^' integer)?
// atom   := number | 'x' digits | 'pi' | func '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("Expr::parse: " + what + " at offset " + std::to_string(pos_) + " in '" +
                                std::string(s_) + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = unary();
    while (accept('*')) e = e * unary();
    return e;
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (accept('^')) {
      skip();
      bool negative = accept('-');
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      int p = std::stoi(std::string(s_.substr(start, pos_ - start)));
      if (negative) fail("negative exponents are not supported");
      return pow(base, p);
    }
    return base;
  }

  Expr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const char* begin = s_.data() + pos_;
      const char* end = s_.data() + s_.size();
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc()) fail("bad number");
      pos_ += static_cast<std::size_t>(ptr - begin);
      return Expr(v);
    }
    if (accept('(')) {
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string_view word = s_.substr(start, pos_ - start);
    if (word.empty()) fail("unexpected character");
    if (word == "pi") return Expr(M_PI);
    if (word[0] == 'x' && word.size() > 1) {
      for (char d : word.substr(1))
        if (!std::isdigit(static_cast<unsigned char>(d))) fail("bad coordinate name");
      return Expr::coord(std::stoi(std::string(word.substr(1))));
    }
    if (!accept('(')) fail("expected '(' after function name");
    Expr arg = expr();
    if (!accept(')')) fail("expected ')'");
    if (word == "sin") return sin(arg);
    if (word == "cos") return cos(arg);
    if (word == "exp") return exp(arg);
    fail("unknown function '" + std::string(word) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(std::string_view text) { return Parser(text).parse(); }

}  // namespace confbend
