#include <gtest/gtest.h>

#include <cmath>

#include "subdiff/coeffs.hpp"
#include "subdiff/error.hpp"
#include "subdiff/operators.hpp"

using namespace subdiff;

namespace {

// (-1)^k binom(alpha, k) = Gamma(k - alpha) / (Gamma(-alpha) k!)
double binomial_weight(double alpha, int k) {
  if (k == 0) return 1.0;
  const double lg = std::lgamma(k - alpha) - std::lgamma(k + 1.0);
  const double sign = std::tgamma(-alpha) < 0 ? -1.0 : 1.0;
  return sign * std::exp(lg - std::lgamma(-alpha));
}

} // namespace

TEST(Grunwald, IntegerOrderCollapse) {
  const auto g = grunwald_coeffs(1.0, 3);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], -1.0);
  EXPECT_DOUBLE_EQ(g[2], 0.0);
  EXPECT_DOUBLE_EQ(g[3], 0.0);
}

TEST(Grunwald, HalfOrder) {
  const auto g = grunwald_coeffs(0.5, 2);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], -0.5);
  EXPECT_DOUBLE_EQ(g[2], -0.125);
}

TEST(Grunwald, FirstWeightIsMinusAlpha) {
  const auto g = grunwald_coeffs(0.2, 1);
  EXPECT_DOUBLE_EQ(g[1], -0.2);
  EXPECT_NEAR(grunwald_coeffs(0.2, 2)[2], -0.08, 1e-16);
}

TEST(Grunwald, RejectsBadAlpha) {
  EXPECT_THROW(grunwald_coeffs(0.0, 3), ParameterError);
  EXPECT_THROW(grunwald_coeffs(-0.3, 3), ParameterError);
  EXPECT_THROW(grunwald_coeffs(1.5, 3), ParameterError);
  EXPECT_THROW(grunwald_coeffs(0.5, -1), ParameterError);
}

TEST(PropertyCoeffs, RecursionMatchesBinomial) {
  for (int a = 1; a <= 9; ++a) {
    const double alpha = 0.1 * a;
    const auto g = grunwald_coeffs(alpha, 64);
    for (int k = 0; k <= 64; ++k)
      EXPECT_NEAR(g[k], binomial_weight(alpha, k), 1e-12 * std::abs(g[k])) << alpha << " " << k;
  }
}

TEST(PropertyCoeffs, WeightsNegativeAndPartialSumsVanish) {
  for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const WeightTable w = substantial_weights({alpha, {}, 0.1}, 10000);
    for (int k = 1; k <= 10000; ++k) ASSERT_LT(w.g[k], 0.0);
    EXPECT_LT(w.l.back(), w.l[100]);
    EXPECT_GT(w.l.back(), 0.0);
  }
}

TEST(PropertyCoeffs, CumulativeOrderingAndLowerBound) {
  for (double alpha : {0.1, 0.2, 0.5, 0.8, 0.9}) {
    const WeightTable w = substantial_weights({alpha, {}, 0.01}, 10000);
    const auto& l = w.l;
    EXPECT_DOUBLE_EQ(l[0], 1.0);
    EXPECT_NEAR(l[1], 1.0 - alpha, 1e-15);
    const double inv_g = 1.0 / std::tgamma(1.0 - alpha);
    for (int n = 1; n <= 10000; ++n) {
      ASSERT_LE(l[n], l[n - 1]);
      ASSERT_GE(l[n], 0.0);
      ASSERT_GE(l[n - 1], inv_g / std::pow(n, alpha) * (1 - 1e-12)) << alpha << " " << n;
    }
  }
}

TEST(Cumulative, AlphaOneTelescopes) {
  const WeightTable w = substantial_weights({1.0, {}, 0.1}, 6);
  for (int n = 1; n <= 6; ++n) EXPECT_DOUBLE_EQ(w.l[n], 0.0);
  EXPECT_EQ(cumulative_l(w), w.l);
}

TEST(Cumulative, LowerBoundExample) {
  const WeightTable w = substantial_weights({0.5, {}, 0.1}, 4);
  EXPECT_GE(w.l[3], 1.0 / (2.0 * std::tgamma(0.5)));
}

TEST(SubstantialWeights, ZeroLambdaIsGrunwald) {
  const WeightTable w = substantial_weights({0.5, {}, 0.1}, 20);
  for (int k = 0; k <= 20; ++k) EXPECT_EQ(w.g_lambda[k], cplx(w.g[k]));
}

TEST(SubstantialWeights, LeadingWeightCarriesHalfShift) {
  const WeightTable w = substantial_weights({0.5, {0.5, 0.0}, 0.1}, 2);
  EXPECT_NEAR(w.g_lambda[0].real(), std::exp(0.0125), 1e-15);
  EXPECT_EQ(w.g_lambda[0].imag(), 0.0);
}

TEST(SubstantialWeights, ComplexLambdaReference) {
  const WeightTable w = substantial_weights({0.2, {1.0, 1.0}, 0.25}, 2);
  EXPECT_NEAR(w.g_lambda[2].real(), -0.04424302835204442728, 1e-16);
  EXPECT_NEAR(w.g_lambda[2].imag(), 0.02275295568380074644, 1e-16);
}

TEST(SubstantialWeights, RejectsBadParams) {
  EXPECT_THROW(substantial_weights({0.5, {}, 0.0}, 3), ParameterError);
  EXPECT_THROW(substantial_weights({0.5, {}, -1.0}, 3), ParameterError);
  EXPECT_THROW(substantial_weights({1.2, {}, 0.1}, 3), ParameterError);
  EXPECT_THROW(substantial_weights({0.5, {NAN, 0.0}, 0.1}, 3), ParameterError);
}

TEST(ExponentSet, SmallestValues) {
  const auto a = exponent_set(0.2, 3);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_NEAR(a[0], 0.2, 1e-14);
  EXPECT_NEAR(a[1], 0.4, 1e-14);
  EXPECT_NEAR(a[2], 0.6, 1e-14);
}

TEST(ExponentSet, CollapsesDuplicates) {
  const auto a = exponent_set(0.5, 3);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 1.0);
  EXPECT_DOUBLE_EQ(a[2], 1.5);
}

TEST(ExponentSet, EmptyAndTooMany) {
  EXPECT_TRUE(exponent_set(0.3, 0).empty());
  // alpha = 1: Theta \ {0} = {1, 2, 3}
  EXPECT_EQ(exponent_set(1.0, 3).size(), 3u);
  EXPECT_THROW(exponent_set(1.0, 4), ParameterError);
  EXPECT_THROW(exponent_set(0.3, -1), ParameterError);
}

TEST(StartingWeights, SingleExponentClosedForm) {
  const double alpha = 0.2, beta = 0.2, tau = 1.0 / 8;
  const int n = 8;
  const std::vector<double> exps{beta};
  // D(t^beta) is the constant Gamma(1.2) here, so every sampling gives the same value
  const double D = std::tgamma(beta + 1) / std::tgamma(beta + 1 - alpha);
  double hist = 0.0;
  for (int k = 0; k < n; ++k) hist += binomial_weight(alpha, k) * std::pow((n - k) * tau, beta);
  const double w = (D - std::pow(tau, -alpha) * hist) / std::pow(tau, beta);
  for (auto s : {TimeSampling::weighted_average, TimeSampling::shifted_point,
                 TimeSampling::current_point}) {
    const auto row = starting_weights({alpha, {}, tau}, n, exps, s);
    ASSERT_EQ(row.w.size(), 2u);
    EXPECT_EQ(row.w[0], cplx{});
    EXPECT_NEAR(row.w[1].real(), w, 1e-13);
    EXPECT_NEAR(row.w[1].real(), -0.0078043359658189791, 1e-13);
    EXPECT_NEAR(row.w[1].imag(), 0.0, 1e-15);
  }
}

TEST(StartingWeights, NoCorrections) {
  const auto row = starting_weights({0.5, {}, 0.1}, 3, {});
  EXPECT_TRUE(row.w.empty());
  const StartingWeights all = build_starting_weights({0.5, {}, 0.1}, 5, {});
  EXPECT_TRUE(all.empty());
  EXPECT_THROW(starting_weights({0.5, {}, 0.1}, 0, std::vector<double>{0.5}), ParameterError);
}

TEST(PropertyCoeffs, CorrectedOperatorExactOnBasis) {
  const double alpha = 0.4, tau = 0.05;
  const int N = 30;
  for (cplx lambda : {cplx(0.0), cplx(0.7, 0.0), cplx(1.0, 1.0)}) {
    for (auto s : {TimeSampling::weighted_average, TimeSampling::shifted_point}) {
      const auto exps = exponent_set(alpha, 3);
      const StartingWeights w = build_starting_weights({alpha, lambda, tau}, N, exps, s);
      const WeightTable g = substantial_weights({alpha, lambda, tau}, N);
      for (double beta : exps) {
        auto f = [&](int m) {
          return m == 0 ? cplx{} : std::exp(-lambda * (m * tau)) * std::pow(m * tau, beta);
        };
        auto D = [&](double t) { return exact_power_derivative(alpha, lambda, beta, t); };
        for (int n = 1; n <= N; ++n) {
          cplx op{};
          for (int k = 0; k <= n; ++k) op += g.g_lambda[k] * f(n - k);
          op *= std::pow(tau, -alpha);
          for (int k = 1; k <= w.S; ++k) op += w.at(n, k) * f(k);
          const double tn = n * tau;
          const cplx target = s == TimeSampling::weighted_average
                                  ? (1 - alpha / 2) * D(tn) + (alpha / 2) * D(tn - tau)
                                  : D(tn - alpha * tau / 2);
          EXPECT_LE(std::abs(op - target), 1e-12 * w.condition[n] * std::max(1.0, std::abs(target)))
              << "beta=" << beta << " n=" << n;
        }
      }
    }
  }
}

TEST(StartingWeights, ConditionReported) {
  const StartingWeights w = build_starting_weights({0.2, {}, 0.1}, 6, exponent_set(0.2, 3));
  for (int n = 1; n <= 6; ++n) EXPECT_GT(w.condition[n], 1.0);
  EXPECT_EQ(w.condition[0], 0.0);
}

TEST(StartingWeights, NearlyEqualExponentsRejected) {
  const std::vector<double> exps{0.3, 0.3 + 1e-11, 0.3 + 2e-11};
  try {
    build_starting_weights({0.5, {}, 0.1}, 8, exps);
    FAIL() << "expected a conditioning error";
  } catch (const ConditioningError& e) {
    EXPECT_GE(e.condition(), kMaxCondition);
  }
}

TEST(StartingWeights, InvalidExponents) {
  EXPECT_THROW(build_starting_weights({0.5, {}, 0.1}, 8, std::vector<double>{0.5, 0.5}),
               ParameterError);
  EXPECT_THROW(build_starting_weights({0.5, {}, 0.1}, 8, std::vector<double>{-0.5}),
               ParameterError);
  EXPECT_THROW(build_starting_weights({0.5, {}, 0.1}, 8, std::vector<double>(7, 1.0)),
               ParameterError);
}

TEST(WeightCache, ReusesTablesByLambda) {
  WeightCache cache(0.5, 0.1, 10);
  auto a = cache.get({0.3, 0.1});
  auto b = cache.get({0.3, 0.1});
  auto c = cache.get({0.3, 0.2});
  EXPECT_EQ(a.get(), b.get());
  EXPECT_NE(a.get(), c.get());
  EXPECT_EQ(cache.distinct(), 2u);
  EXPECT_EQ(a->size(), 11);
}

TEST(StartingWeightCache, ReusesTablesByLambda) {
  StartingWeightCache cache(0.5, 0.1, 10, {0.5, 1.0}, TimeSampling::weighted_average);
  auto a = cache.get({0.3, 0.0});
  EXPECT_EQ(a.get(), cache.get({0.3, 0.0}).get());
  EXPECT_EQ(a->S, 2);
  EXPECT_EQ(cache.distinct(), 1u);
}

TEST(Types, ParseNames) {
  EXPECT_EQ(parse_time_sampling("average"), TimeSampling::weighted_average);
  EXPECT_EQ(parse_time_sampling("shifted"), TimeSampling::shifted_point);
  EXPECT_EQ(parse_time_sampling("current"), TimeSampling::current_point);
  EXPECT_EQ(parse_start_policy("exact"), StartPolicy::exact);
  EXPECT_STREQ(to_string(StartPolicy::coupled), "coupled");
  EXPECT_THROW(parse_time_sampling("midpoint"), ParameterError);
  EXPECT_THROW(parse_start_policy("warm"), ParameterError);
}
