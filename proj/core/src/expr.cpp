#include "subdiff/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "subdiff/error.hpp"

namespace subdiff {

struct Expression::Node {
  enum class Kind { constant, variable, add, sub, mul, div, pow, neg, call };
  Kind kind = Kind::constant;
  cplx value{};
  std::size_t var = 0;
  std::string fn;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

cplx power(cplx b, cplx p) {
  if (b.imag() == 0.0 && p.imag() == 0.0) {
    if (b.real() >= 0.0) return std::pow(b.real(), p.real());
    const double r = p.real();
    if (r == std::floor(r)) return std::pow(b.real(), r);
  }
  if (b == cplx{}) return p.real() > 0.0 ? cplx{} : cplx(INFINITY);
  return std::pow(b, p);
}

cplx apply(const std::string& fn, cplx z) {
  if (fn == "sin") return std::sin(z);
  if (fn == "cos") return std::cos(z);
  if (fn == "tan") return std::tan(z);
  if (fn == "sinh") return std::sinh(z);
  if (fn == "cosh") return std::cosh(z);
  if (fn == "exp") return std::exp(z);
  if (fn == "log") return std::log(z);
  if (fn == "sqrt") return z.imag() == 0.0 && z.real() >= 0.0 ? cplx(std::sqrt(z.real())) : std::sqrt(z);
  if (fn == "abs") return std::abs(z);
  if (fn == "gamma") return std::tgamma(z.real());
  return {};
}

bool known_function(const std::string& fn) {
  static const char* names[] = {"sin", "cos", "tan", "sinh", "cosh", "exp",
                                "log", "sqrt", "abs", "gamma"};
  for (const char* n : names)
    if (fn == n) return true;
  return false;
}

class Parser {
public:
  Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParameterError("expression '" + s_ + "': " + why + " at position " +
                         std::to_string(pos_));
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

  static NodePtr make(Node::Kind k, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+'))
        n = make(Node::Kind::add, n, term());
      else if (accept('-'))
        n = make(Node::Kind::sub, n, term());
      else
        return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*'))
        n = make(Node::Kind::mul, n, unary());
      else if (accept('/'))
        n = make(Node::Kind::div, n, unary());
      else
        return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::neg, unary());
    if (accept('+')) return unary();
    return powexpr();
  }

  NodePtr powexpr() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      for (std::size_t k = 0; k < vars_.size(); ++k)
        if (vars_[k] == id) {
          auto n = std::make_shared<Node>();
          n->kind = Node::Kind::variable;
          n->var = k;
          return n;
        }
      if (accept('(')) {
        if (!known_function(id)) fail("unknown function '" + id + "'");
        NodePtr arg = expr();
        if (!accept(')')) fail("missing ')'");
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::call;
        n->fn = id;
        n->lhs = arg;
        return n;
      }
      auto n = std::make_shared<Node>();
      if (id == "i")
        n->value = cplx(0.0, 1.0);
      else if (id == "pi")
        n->value = std::numbers::pi;
      else if (id == "e")
        n->value = std::numbers::e;
      else
        fail("unknown name '" + id + "'");
      return n;
    }
    fail("unexpected character");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

cplx evaluate(const Node& n, std::span<const double> v) {
  switch (n.kind) {
  case Node::Kind::constant: return n.value;
  case Node::Kind::variable: return v[n.var];
  case Node::Kind::add: return evaluate(*n.lhs, v) + evaluate(*n.rhs, v);
  case Node::Kind::sub: return evaluate(*n.lhs, v) - evaluate(*n.rhs, v);
  case Node::Kind::mul: return evaluate(*n.lhs, v) * evaluate(*n.rhs, v);
  case Node::Kind::div: return evaluate(*n.lhs, v) / evaluate(*n.rhs, v);
  case Node::Kind::pow: return power(evaluate(*n.lhs, v), evaluate(*n.rhs, v));
  case Node::Kind::neg: return -evaluate(*n.lhs, v);
  case Node::Kind::call: return apply(n.fn, evaluate(*n.lhs, v));
  }
  return {};
}

} // namespace

Expression::Expression() = default;
Expression::~Expression() = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables) {
  Expression e;
  e.root_ = Parser(text, variables).parse();
  e.text_ = text;
  e.arity_ = variables.size();
  return e;
}

cplx Expression::eval(std::span<const double> values) const {
  if (!root_) throw ParameterError("empty expression");
  if (values.size() != arity_) throw ParameterError("wrong number of expression arguments");
  return evaluate(*root_, values);
}

cplx Expression::operator()(double a) const {
  const double v[] = {a};
  return eval(v);
}

cplx Expression::operator()(double a, double b) const {
  const double v[] = {a, b};
  return eval(v);
}

cplx Expression::operator()(double a, double b, double c) const {
  const double v[] = {a, b, c};
  return eval(v);
}

} // namespace subdiff
