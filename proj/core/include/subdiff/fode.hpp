#pragma once

#include <functional>
#include <span>
#include <vector>

#include "subdiff/coeffs.hpp"
#include "subdiff/report.hpp"
#include "subdiff/types.hpp"

namespace subdiff {

/// D_t^{alpha,lambda} u = f on (0, T] with u(0) = u0 = 0.
struct ScalarProblem {
  double alpha = 0.5;
  cplx lambda{0.0, 0.0};
  double T = 1.0;
  int N = 16;
  std::function<cplx(double)> rhs;
  std::function<cplx(double)> exact; ///< optional
  cplx u0{0.0, 0.0};
};

struct ScalarOptions {
  TimeSampling sampling = TimeSampling::weighted_average;
  StartPolicy start = StartPolicy::coupled;
  int corrections = 0;
  std::vector<double> exponents; ///< overrides exponent_set when nonempty
};

/// u^0..u^N. `corrections` may be null or must match (alpha, lambda, tau, N).
std::vector<cplx> solve_scalar(const ScalarProblem& prob, const StartingWeights* corrections,
                               const ScalarOptions& opts = {});

/// Builds the starting weights described by `opts` and solves.
std::vector<cplx> solve_scalar(const ScalarProblem& prob, const ScalarOptions& opts = {});

/// max_{1<=n<=N} |u^n - u(t_n)|.
double max_error_scalar(const ScalarProblem& prob, std::span<const cplx> u);

/// One row per tau with E(tau) and the halving rate.
ConvergenceReport error_table_scalar(const ScalarProblem& prob, std::span<const double> taus,
                                     const ScalarOptions& opts = {});

} // namespace subdiff
