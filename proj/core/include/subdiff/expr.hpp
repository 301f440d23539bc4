#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "subdiff/types.hpp"

namespace subdiff {

/// Complex-valued arithmetic expression over named real variables.
///
/// Supports + - * / ^, parentheses, the constants i, pi, e and the functions
/// sin, cos, tan, sinh, cosh, exp, log, sqrt, abs, gamma (real argument).
/// Example: "exp(-(1+i)*x*t)*(t^3.5+1)*sin(pi*x)".
class Expression {
public:
  Expression();
  ~Expression();
  Expression(const Expression&);
  Expression& operator=(const Expression&);
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  /// Throws ParameterError with the offending position on bad input.
  static Expression parse(const std::string& text, const std::vector<std::string>& variables);

  cplx eval(std::span<const double> values) const;
  cplx operator()(double a) const;
  cplx operator()(double a, double b) const;
  cplx operator()(double a, double b, double c) const;

  const std::string& text() const { return text_; }

  struct Node;

private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  std::size_t arity_ = 0;
};

} // namespace subdiff
