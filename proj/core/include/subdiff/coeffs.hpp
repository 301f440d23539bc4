#pragma once

#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "subdiff/types.hpp"

namespace subdiff {

struct FracParams {
  double alpha = 0.5;
  cplx lambda{0.0, 0.0};
  double tau = 0.1;

  /// Throws ParameterError unless 0 < alpha <= 1 and tau > 0.
  void validate() const;
};

/// Grunwald, substantial and cumulative weights for one (alpha, lambda, tau).
struct WeightTable {
  std::vector<double> g;
  std::vector<cplx> g_lambda;
  std::vector<double> l;
  FracParams params;

  int size() const { return static_cast<int>(g.size()); }
};

/// Correction weights w[n][k], n = 0..N, k = 0..S. Row 0 and column 0 are zero.
struct StartingWeights {
  std::vector<double> exponents;
  int S = 0;
  int N = 0;
  std::vector<cplx> w;
  /// Condition estimate of the scaled system, one per step (0 for n = 0).
  std::vector<double> condition;

  cplx at(int n, int k) const { return w[static_cast<std::size_t>(n) * (S + 1) + k]; }
  bool empty() const { return S == 0; }
};

struct StartingWeightRow {
  std::vector<cplx> w;
  double condition = 0.0;
};

inline constexpr int kMaxCorrections = 6;
inline constexpr double kMaxCondition = 1e13;

std::vector<double> grunwald_coeffs(double alpha, int n_max);

WeightTable substantial_weights(const FracParams& params, int n_max);

std::vector<double> cumulative_l(const WeightTable& weights);

/// The `count` smallest positive values k + j*alpha <= 2 + alpha, ascending.
std::vector<double> exponent_set(double alpha, int count);

/// Weights w[n][0..S] for one step, using params.lambda as the local lambda.
StartingWeightRow starting_weights(const FracParams& params, int n,
                                   std::span<const double> exponents,
                                   TimeSampling sampling = TimeSampling::weighted_average);

/// All rows n = 1..N at once; the history convolution is shared across rows.
StartingWeights build_starting_weights(const FracParams& params, int N,
                                       std::span<const double> exponents,
                                       TimeSampling sampling = TimeSampling::weighted_average);

/// Per-lambda memo of weight tables for spatially varying lambda.
/// Not thread-safe; each solve owns its cache.
class WeightCache {
public:
  WeightCache(double alpha, double tau, int n_max);

  std::shared_ptr<const WeightTable> get(cplx lambda);
  std::size_t distinct() const { return tables_.size(); }

private:
  double alpha_;
  double tau_;
  int n_max_;
  std::map<std::pair<double, double>, std::shared_ptr<const WeightTable>> tables_;
};

class StartingWeightCache {
public:
  StartingWeightCache(double alpha, double tau, int N, std::vector<double> exponents,
                      TimeSampling sampling);

  std::shared_ptr<const StartingWeights> get(cplx lambda);
  std::size_t distinct() const { return tables_.size(); }

private:
  double alpha_;
  double tau_;
  int N_;
  std::vector<double> exponents_;
  TimeSampling sampling_;
  std::map<std::pair<double, double>, std::shared_ptr<const StartingWeights>> tables_;
};

} // namespace subdiff
