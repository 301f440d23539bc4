#include "subdiff/fode.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "subdiff/error.hpp"

namespace subdiff {

namespace {

cplx sample_rhs(const ScalarProblem& p, double tau, int n, TimeSampling s) {
  const double tn = n * tau;
  switch (s) {
  case TimeSampling::weighted_average:
    return (1.0 - p.alpha / 2) * p.rhs(tn) + (p.alpha / 2) * p.rhs(tn - tau);
  case TimeSampling::shifted_point:
    return p.rhs(tn - p.alpha * tau / 2);
  case TimeSampling::current_point:
    return p.rhs(tn);
  }
  return {};
}

std::vector<double> exponents_for(double alpha, const ScalarOptions& opts) {
  if (!opts.exponents.empty()) {
    if (static_cast<int>(opts.exponents.size()) != opts.corrections && opts.corrections != 0)
      throw ParameterError("exponent list length differs from correction count");
    return opts.exponents;
  }
  return exponent_set(alpha, opts.corrections);
}

} // namespace

std::vector<cplx> solve_scalar(const ScalarProblem& prob, const StartingWeights* corrections,
                               const ScalarOptions& opts) {
  if (!prob.rhs) throw ParameterError("scalar problem has no right-hand side");
  if (prob.u0 != cplx{}) throw ParameterError("scalar problem needs u0 = 0; transform first");
  if (prob.N < 1 || !(prob.T > 0.0)) throw ParameterError("invalid time grid");
  const double tau = prob.T / prob.N;
  const FracParams params{prob.alpha, prob.lambda, tau};
  params.validate();
  const int N = prob.N;
  const int S = corrections ? corrections->S : 0;
  if (S > 0 && corrections->N < N) throw ParameterError("starting weights cover too few steps");
  if (S >= N) throw ParameterError("need more time steps than correction terms");

  const WeightTable wt = substantial_weights(params, N);
  const double inv_ta = std::pow(tau, -prob.alpha);
  std::vector<cplx> u(N + 1, cplx{});

  if (S > 0) {
    if (opts.start == StartPolicy::exact) {
      if (!prob.exact) throw ParameterError("exact start requires an exact solution");
      for (int k = 1; k <= S; ++k) u[k] = prob.exact(k * tau);
    } else {
      Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(S, S);
      Eigen::VectorXcd b(S);
      for (int n = 1; n <= S; ++n) {
        for (int k = 1; k <= S; ++k) {
          cplx a = corrections->at(n, k);
          if (k <= n) a += wt.g_lambda[n - k] * inv_ta;
          A(n - 1, k - 1) = a;
        }
        b(n - 1) = sample_rhs(prob, tau, n, opts.sampling);
      }
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
      if (!(lu.rcond() > 1e-14)) throw StepError("singular start-up system", 1);
      const Eigen::VectorXcd x = lu.solve(b);
      for (int k = 1; k <= S; ++k) u[k] = x(k - 1);
    }
  }

  const cplx diag = wt.g_lambda[0] * inv_ta;
  for (int n = S + 1; n <= N; ++n) {
    cplx hist{};
    for (int k = 1; k <= n; ++k) hist += wt.g_lambda[k] * u[n - k];
    cplx r = sample_rhs(prob, tau, n, opts.sampling) - inv_ta * hist;
    for (int k = 1; k <= S; ++k) r -= corrections->at(n, k) * u[k];
    u[n] = r / diag;
  }
  return u;
}

std::vector<cplx> solve_scalar(const ScalarProblem& prob, const ScalarOptions& opts) {
  if (opts.corrections == 0 && opts.exponents.empty()) return solve_scalar(prob, nullptr, opts);
  const auto exps = exponents_for(prob.alpha, opts);
  const StartingWeights w = build_starting_weights(
      FracParams{prob.alpha, prob.lambda, prob.T / prob.N}, prob.N, exps, opts.sampling);
  return solve_scalar(prob, &w, opts);
}

double max_error_scalar(const ScalarProblem& prob, std::span<const cplx> u) {
  if (!prob.exact) throw ParameterError("error needs an exact solution");
  const double tau = prob.T / prob.N;
  double e = 0.0;
  for (int n = 1; n < static_cast<int>(u.size()); ++n)
    e = std::max(e, std::abs(u[n] - prob.exact(n * tau)));
  return e;
}

ConvergenceReport error_table_scalar(const ScalarProblem& prob, std::span<const double> taus,
                                     const ScalarOptions& opts) {
  if (!prob.exact) throw ParameterError("error table needs an exact solution");
  ConvergenceReport rep;
  std::ostringstream os;
  os << "alpha=" << prob.alpha;
  rep.label = os.str();
  rep.metadata["alpha"] = std::to_string(prob.alpha);
  rep.metadata["lambda"] = std::to_string(prob.lambda.real()) + "+" +
                           std::to_string(prob.lambda.imag()) + "i";
  rep.metadata["S"] = std::to_string(opts.corrections);
  rep.metadata["sampling"] = to_string(opts.sampling);
  for (double tau : taus) {
    const double steps = prob.T / tau;
    const int N = static_cast<int>(std::lround(steps));
    if (N < 1 || std::abs(steps - N) > 1e-9 * steps)
      throw ParameterError("tau must divide the horizon evenly");
    ScalarProblem p = prob;
    p.N = N;
    const auto t0 = std::chrono::steady_clock::now();
    const auto u = solve_scalar(p, opts);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.rows.push_back({tau, N, 0, max_error_scalar(p, u), std::nullopt, secs});
  }
  rep.compute_rates();
  return rep;
}

} // namespace subdiff
