#include "subdiff/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "subdiff/error.hpp"
#include "subdiff/operators.hpp"

namespace subdiff {

const char* to_string(TimeSampling s) {
  switch (s) {
  case TimeSampling::weighted_average: return "average";
  case TimeSampling::shifted_point: return "shifted";
  case TimeSampling::current_point: return "current";
  }
  return "?";
}

const char* to_string(StartPolicy p) {
  return p == StartPolicy::coupled ? "coupled" : "exact";
}

TimeSampling parse_time_sampling(const char* name) {
  const std::string s(name);
  if (s == "average") return TimeSampling::weighted_average;
  if (s == "shifted") return TimeSampling::shifted_point;
  if (s == "current") return TimeSampling::current_point;
  throw ParameterError("unknown time sampling '" + s + "' (average|shifted|current)");
}

StartPolicy parse_start_policy(const char* name) {
  const std::string s(name);
  if (s == "coupled") return StartPolicy::coupled;
  if (s == "exact") return StartPolicy::exact;
  throw ParameterError("unknown start policy '" + s + "' (coupled|exact)");
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "alpha must lie in (0, 1], got " << alpha;
    throw ParameterError(os.str());
  }
}

// e^{-lambda t} t^beta with t^beta = 0 at t = 0.
cplx basis(cplx lambda, double beta, double t) {
  if (t == 0.0) return beta == 0.0 ? cplx(1.0) : cplx(0.0);
  return std::exp(-lambda * t) * std::pow(t, beta);
}

cplx sampled_derivative(double alpha, cplx lambda, double beta, double tau, int n,
                        TimeSampling sampling) {
  const double tn = n * tau;
  switch (sampling) {
  case TimeSampling::weighted_average:
    return (1.0 - alpha / 2) * exact_power_derivative(alpha, lambda, beta, tn) +
           (alpha / 2) * exact_power_derivative(alpha, lambda, beta, tn - tau);
  case TimeSampling::shifted_point:
    return exact_power_derivative(alpha, lambda, beta, tn - alpha * tau / 2);
  case TimeSampling::current_point:
    return exact_power_derivative(alpha, lambda, beta, tn);
  }
  return {};
}

void check_exponents(std::span<const double> exponents) {
  if (exponents.size() > static_cast<std::size_t>(kMaxCorrections))
    throw ParameterError("at most " + std::to_string(kMaxCorrections) +
                         " correction terms are supported");
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (!(exponents[i] > 0.0)) throw ParameterError("correction exponents must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(exponents[i] - exponents[j]) < 1e-12)
        throw ParameterError("correction exponents must be distinct");
  }
}

// Column-scaled LU of the S x S matrix [e^{-lambda t_k} t_k^{beta_j}], k = 1..S.
struct ScaledSystem {
  Eigen::MatrixXcd a;
  Eigen::VectorXd scale;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  double condition = 0.0;

  ScaledSystem(cplx lambda, double tau, std::span<const double> exponents) {
    const int S = static_cast<int>(exponents.size());
    a.resize(S, S);
    for (int j = 0; j < S; ++j)
      for (int k = 0; k < S; ++k) a(j, k) = basis(lambda, exponents[j], (k + 1) * tau);
    scale.resize(S);
    Eigen::MatrixXcd scaled = a;
    for (int k = 0; k < S; ++k) {
      scale(k) = scaled.col(k).cwiseAbs().maxCoeff();
      scaled.col(k) /= scale(k);
    }
    lu.compute(scaled);
    const double rc = lu.rcond();
    condition = rc > 0.0 ? 1.0 / rc : INFINITY;
    if (!(condition < kMaxCondition)) {
      std::ostringstream os;
      os << "starting-weight system is ill-conditioned (condition estimate " << condition
         << ")";
      throw ConditioningError(os.str(), condition);
    }
  }

  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const {
    Eigen::VectorXcd y = lu.solve(rhs);
    Eigen::VectorXcd x = y.cwiseQuotient(scale.cast<cplx>());
    const Eigen::VectorXcd r = rhs - a * x;
    const Eigen::VectorXcd dy = lu.solve(r);
    x += dy.cwiseQuotient(scale.cast<cplx>());
    return x;
  }
};

} // namespace

void FracParams::validate() const {
  check_alpha(alpha);
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw ParameterError("lambda must be finite");
}

std::vector<double> grunwald_coeffs(double alpha, int n_max) {
  check_alpha(alpha);
  if (n_max < 0) throw ParameterError("n_max must be nonnegative");
  std::vector<double> g(static_cast<std::size_t>(n_max) + 1);
  g[0] = 1.0;
  for (int k = 1; k <= n_max; ++k) g[k] = (1.0 - (alpha + 1.0) / k) * g[k - 1];
  return g;
}

WeightTable substantial_weights(const FracParams& params, int n_max) {
  params.validate();
  WeightTable t;
  t.params = params;
  t.g = grunwald_coeffs(params.alpha, n_max);
  t.g_lambda.resize(t.g.size());
  const cplx lt = params.lambda * params.tau;
  for (int k = 0; k <= n_max; ++k)
    t.g_lambda[k] = std::exp(-(k - params.alpha / 2) * lt) * t.g[k];
  t.l = cumulative_l(t);
  return t;
}

std::vector<double> cumulative_l(const WeightTable& weights) {
  std::vector<double> l(weights.g.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) {
    sum += weights.g[k];
    l[k] = sum;
  }
  return l;
}

std::vector<double> exponent_set(double alpha, int count) {
  check_alpha(alpha);
  if (count < 0) throw ParameterError("correction count must be nonnegative");
  const double cap = 2.0 + alpha + 1e-12;
  std::vector<double> theta;
  for (int k = 0; k <= 3; ++k)
    for (int j = 0; k + j * alpha <= cap; ++j) {
      const double beta = k + j * alpha;
      if (beta > 1e-12) theta.push_back(beta);
    }
  std::sort(theta.begin(), theta.end());
  std::vector<double> distinct;
  for (double b : theta)
    if (distinct.empty() || b - distinct.back() > 1e-10) distinct.push_back(b);
  if (static_cast<std::size_t>(count) > distinct.size()) {
    std::ostringstream os;
    os << "requested " << count << " exponents but the set has only " << distinct.size()
       << " for alpha=" << alpha;
    throw ParameterError(os.str());
  }
  distinct.resize(count);
  return distinct;
}

StartingWeights build_starting_weights(const FracParams& params, int N,
                                       std::span<const double> exponents,
                                       TimeSampling sampling) {
  params.validate();
  check_exponents(exponents);
  const int S = static_cast<int>(exponents.size());
  if (N < 1) throw ParameterError("need at least one time step");
  StartingWeights out;
  out.exponents.assign(exponents.begin(), exponents.end());
  out.S = S;
  out.N = N;
  out.w.assign(static_cast<std::size_t>(N + 1) * (S + 1), cplx{});
  out.condition.assign(N + 1, 0.0);
  if (S == 0) return out;

  const double alpha = params.alpha;
  const double tau = params.tau;
  const cplx lambda = params.lambda;
  const ScaledSystem sys(lambda, tau, exponents);
  const WeightTable wt = substantial_weights(params, N);
  const double inv_ta = std::pow(tau, -alpha);

  // f[j][m] = basis_j(t_m)
  std::vector<std::vector<cplx>> f(S, std::vector<cplx>(N + 1));
  for (int j = 0; j < S; ++j)
    for (int m = 0; m <= N; ++m) f[j][m] = basis(lambda, exponents[j], m * tau);

  Eigen::VectorXcd rhs(S);
  for (int n = 1; n <= N; ++n) {
    for (int j = 0; j < S; ++j) {
      cplx hist{};
      for (int k = 0; k <= n; ++k) hist += wt.g_lambda[k] * f[j][n - k];
      rhs(j) = sampled_derivative(alpha, lambda, exponents[j], tau, n, sampling) - inv_ta * hist;
    }
    const Eigen::VectorXcd x = sys.solve(rhs);
    for (int k = 1; k <= S; ++k) out.w[static_cast<std::size_t>(n) * (S + 1) + k] = x(k - 1);
    out.condition[n] = sys.condition;
  }
  return out;
}

StartingWeightRow starting_weights(const FracParams& params, int n,
                                   std::span<const double> exponents, TimeSampling sampling) {
  if (n < 1) throw ParameterError("starting weights need n >= 1");
  if (exponents.empty()) return {{}, 0.0};
  const StartingWeights all = build_starting_weights(params, n, exponents, sampling);
  StartingWeightRow row;
  row.w.resize(all.S + 1);
  for (int k = 0; k <= all.S; ++k) row.w[k] = all.at(n, k);
  row.condition = all.condition[n];
  return row;
}

WeightCache::WeightCache(double alpha, double tau, int n_max)
    : alpha_(alpha), tau_(tau), n_max_(n_max) {
  FracParams{alpha, {}, tau}.validate();
}

std::shared_ptr<const WeightTable> WeightCache::get(cplx lambda) {
  const auto key = std::make_pair(lambda.real(), lambda.imag());
  auto it = tables_.find(key);
  if (it != tables_.end()) return it->second;
  auto t = std::make_shared<const WeightTable>(
      substantial_weights(FracParams{alpha_, lambda, tau_}, n_max_));
  tables_.emplace(key, t);
  return t;
}

StartingWeightCache::StartingWeightCache(double alpha, double tau, int N,
                                         std::vector<double> exponents, TimeSampling sampling)
    : alpha_(alpha), tau_(tau), N_(N), exponents_(std::move(exponents)), sampling_(sampling) {}

std::shared_ptr<const StartingWeights> StartingWeightCache::get(cplx lambda) {
  const auto key = std::make_pair(lambda.real(), lambda.imag());
  auto it = tables_.find(key);
  if (it != tables_.end()) return it->second;
  auto t = std::make_shared<const StartingWeights>(
      build_starting_weights(FracParams{alpha_, lambda, tau_}, N_, exponents_, sampling_));
  tables_.emplace(key, t);
  return t;
}

} // namespace subdiff
