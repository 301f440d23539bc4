#pragma once

#include <map>
#include <string>
#include <variant>

#include "subdiff/fode.hpp"
#include "subdiff/pde1d.hpp"
#include "subdiff/pde2d.hpp"

namespace subdiff {

/// u(t) = e^{-lambda t}(t^3 + t^nu) with its exact substantial derivative as f.
ScalarProblem scalar_example(double alpha, double nu, double lambda = 0.5, int N = 16);

/// 1D backward Feynman-Kac problem on (0,1): lambda(x) = (1+i)x, kappa = 0.5,
/// u0 = sin(pi x), exact e^{-(1+i)xt}(t^{3+alpha}+1) sin(pi x).
Problem1D feynman_kac_1d(double alpha);

/// 2D problem on (0,1)^2: lambda = 0.01(x+y), kappa = 1,
/// exact e^{-lambda t}(1 + t^a + t^{2a} + t^3) sin(pi x) sin(pi y).
Problem2D feynman_kac_2d(double alpha);

using AnyProblem = std::variant<ScalarProblem, Problem1D, Problem2D>;

/// Built-in problems by id: "scalar" (param "nu", optional "lambda"),
/// "feynman-kac-1d", "feynman-kac-2d".
AnyProblem build_example(const std::string& id, double alpha,
                         const std::map<std::string, double>& params = {});

} // namespace subdiff
