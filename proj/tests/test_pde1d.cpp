#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "subdiff/error.hpp"
#include "subdiff/examples.hpp"
#include "subdiff/harness.hpp"
#include "subdiff/pde1d.hpp"
#include "support.hpp"

using namespace subdiff;
using std::numbers::pi;

namespace {

Problem1D heat_like(double kappa) {
  Problem1D p;
  p.diffusivity = kappa;
  p.T = 0.5;
  p.source = [](double x, double t) { return cplx(std::sin(3 * x) * (1 + t), x * t); };
  return p;
}

// Dense time march with (A/tau - kappa*theta*D) u^n = (A/tau + kappa*(1-theta)*D) u^{n-1} + A f
// on the interior; f is sampled on all nodes so A sees the boundary values too.
std::vector<cplx> dense_march(const Problem1D& p, int M, int N, bool compact,
                              const std::function<cplx(double, double)>& sample) {
  const double h = (p.b - p.a) / M;
  const double tau = p.T / N;
  const int m = M - 1;
  const double theta = compact ? 0.5 : 1.0;
  const double sw = compact ? 1.0 / 12 : 0.0;
  const double mw = compact ? 10.0 / 12 : 1.0;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(m, m);
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(m, m);
  for (int p_ = 0; p_ < m; ++p_) {
    A(p_, p_) = mw;
    D(p_, p_) = -2.0 / (h * h);
    if (p_ + 1 < m) {
      A(p_, p_ + 1) = A(p_ + 1, p_) = sw;
      D(p_, p_ + 1) = D(p_ + 1, p_) = 1.0 / (h * h);
    }
  }
  const double k = p.diffusivity;
  const Eigen::MatrixXcd L = A / tau - k * theta * D;
  const Eigen::MatrixXcd R = A / tau + k * (1 - theta) * D;
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(m);
  const auto lu = L.partialPivLu();
  for (int n = 1; n <= N; ++n) {
    const double t = n * tau;
    Eigen::VectorXcd f(m);
    for (int i = 1; i < M; ++i) {
      const double x = p.a + i * h;
      f(i - 1) = mw * sample(x, t) + sw * (sample(x - h, t) + sample(x + h, t));
    }
    u = lu.solve(R * u + f);
  }
  return {u.data(), u.data() + m};
}

std::vector<cplx> interior(const Field& u) {
  return {u.values.begin() + 1, u.values.end() - 1};
}

Problem1D manufactured(cplx lam, double alpha, double kappa) {
  Problem1D p;
  p.diffusivity = kappa;
  p.lambda = [lam](double) { return lam; };
  p.exact = [lam](double x, double t) { return std::exp(-lam * t) * t * x * (1 - x); };
  p.source = [=](double x, double t) {
    const cplx E = std::exp(-lam * t);
    return E * std::pow(t, 1 - alpha) / std::tgamma(2 - alpha) * x * (1 - x) + kappa * 2.0 * E * t;
  };
  return p;
}

} // namespace

TEST(Pde1d, ZeroDataGivesZeroField) {
  Problem1D p;
  p.lambda = [](double x) { return cplx(x, x); };
  p.source = [](double, double) { return cplx{}; };
  SchemeConfig c;
  c.M = 10;
  c.N = 12;
  for (const Field& u : solve_1d(p, c).levels)
    for (cplx v : u.values) EXPECT_EQ(v, cplx{});
}

TEST(PropertyPde1d, FirstOrderLimitIsCompactCrankNicolson) {
  const Problem1D p = heat_like(0.7);
  SchemeConfig c;
  c.alpha = 1.0;
  c.M = 12;
  c.N = 20;
  const Solution1D s = solve_1d(p, c);
  const auto tau = p.T / c.N;
  auto avg = [&](double x, double t) { return 0.5 * (p.source(x, t) + p.source(x, t - tau)); };
  const auto ref = dense_march(p, c.M, c.N, true, avg);
  EXPECT_LE(testing_support::max_diff(interior(s.levels.back()), ref), 1e-12);
}

TEST(Pde1d, BaselineFirstOrderLimitIsBackwardEuler) {
  const Problem1D p = heat_like(1.3);
  SchemeConfig c;
  c.alpha = 1.0;
  c.M = 9;
  c.N = 15;
  const Solution1D s = solve_1d_baseline(p, c);
  const auto ref = dense_march(p, c.M, c.N, false, p.source);
  EXPECT_LE(testing_support::max_diff(interior(s.levels.back()), ref), 1e-12);
}

TEST(Pde1d, TransformInitial) {
  Problem1D p;
  p.lambda = [](double x) { return cplx(x, 0.0); };
  p.u0 = [](double x) { return cplx(std::sin(pi * x)); };
  p.source = [](double, double) { return cplx(1.0); };
  p.boundary = [](int side, double) { return cplx(side == 0 ? 2.0 : 3.0); };
  p.exact = [](double x, double t) { return cplx(x + t); };

  const TransformedProblem1D tp = transform_initial(p);
  EXPECT_TRUE(tp.discrete_shift);
  EXPECT_FALSE(tp.problem.u0);
  EXPECT_NEAR(std::abs(tp.shift(0.5, 2.0) - std::exp(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(tp.problem.boundary(0, 1.0) - 2.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(tp.problem.boundary(1, 1.0) - (3.0 - std::exp(-1.0) * std::sin(pi))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(tp.problem.exact(0.5, 2.0) - (2.5 - std::exp(-1.0))), 0.0, 1e-15);

  p.initial_laplacian = [](double, double) { return cplx(4.0); };
  p.diffusivity = 0.5;
  const TransformedProblem1D tl = transform_initial(p);
  EXPECT_FALSE(tl.discrete_shift);
  EXPECT_NEAR(std::abs(tl.problem.source(0.3, 0.1) - 3.0), 0.0, 1e-15);

  Problem1D none;
  none.source = p.source;
  EXPECT_EQ(transform_initial(none).shift(0.4, 0.4), cplx{});
}

TEST(PropertyPde1d, CorrectionsReproduceManufacturedSolution) {
  const double alpha = 0.5;
  const Problem1D p = manufactured({0.5, 1.0}, alpha, 0.8);
  SchemeConfig c;
  c.alpha = alpha;
  c.M = 8;
  c.N = 16;
  c.corrections = 1;
  c.exponents = {1.0};
  c.sampling = TimeSampling::weighted_average;
  const Solution1D s = solve_1d(p, c);
  for (std::size_t n = 0; n < s.levels.size(); ++n)
    for (int i = 0; i <= c.M; ++i)
      EXPECT_NEAR(std::abs(s.levels[n][i] - p.exact(s.mesh.x(i), s.grid.t(n))), 0.0, 1e-11);
  c.corrections = 0;
  c.exponents.clear();
  EXPECT_GT(*solve_1d(p, c).e1, 1e-6);
}

TEST(Pde1d, FeynmanKacReferenceCells) {
  const TimeSampling samp = default_sampling("feynman-kac-1d");
  const Problem1D p = feynman_kac_1d(0.5);
  SchemeConfig c;
  c.alpha = 0.5;
  c.sampling = samp;
  c.M = 40;
  c.N = 40;
  c.keep_history = false;
  EXPECT_NEAR(*solve_1d(p, c).e1 / 2.1870e-4, 1.0, 0.02);

  c.M = 4;
  c.N = 16;
  const double compact = *solve_1d(p, c).e1;
  EXPECT_NEAR(compact / 1.2906e-3, 1.0, 0.02);

  c.M = 16;
  c.N = 256;
  const double base = *solve_1d_baseline(p, c).e1;
  EXPECT_NEAR(base / 2.3822e-3, 1.0, 0.02);
  EXPECT_LE(compact, 1.1 * base);
}

TEST(Pde1d, RealAndImaginaryPartsConverge) {
  const Problem1D p = feynman_kac_1d(0.5);
  std::vector<double> re, im;
  for (int N : {10, 20, 40}) {
    SchemeConfig c;
    c.alpha = 0.5;
    c.sampling = default_sampling("feynman-kac-1d");
    c.M = 40;
    c.N = N;
    c.keep_history = false;
    const Solution1D s = solve_1d(p, c);
    double er = 0.0, ei = 0.0;
    for (int i = 1; i < c.M; ++i) {
      const cplx d = s.levels.back()[i] - p.exact(s.mesh.x(i), p.T);
      er = std::max(er, std::abs(d.real()));
      ei = std::max(ei, std::abs(d.imag()));
    }
    re.push_back(er);
    im.push_back(ei);
  }
  for (std::size_t k = 1; k < re.size(); ++k) {
    EXPECT_NEAR(testing_support::rate(re[k - 1], re[k]), 2.0, 0.1);
    EXPECT_NEAR(testing_support::rate(im[k - 1], im[k]), 2.0, 0.1);
  }
}

TEST(Pde1d, StepperMatchesSolve) {
  const Problem1D p = feynman_kac_1d(0.3);
  SchemeConfig c;
  c.alpha = 0.3;
  c.M = 10;
  c.N = 12;
  c.corrections = 2;
  const Solution1D s = solve_1d(p, c);
  Stepper1D st(p, c);
  EXPECT_EQ(st.initial().values, s.levels[0].values);
  for (int n = 1; n <= c.N; ++n) {
    const Field u = st.advance();
    EXPECT_EQ(st.level(), n);
    EXPECT_EQ(u.values, s.levels[n].values);
  }
  EXPECT_THROW(st.advance(), ParameterError);
}

TEST(Pde1d, ObserverSeesEveryLevel) {
  const Problem1D p = feynman_kac_1d(0.5);
  SchemeConfig c;
  c.M = 6;
  c.N = 9;
  c.keep_history = false;
  std::vector<double> times;
  const Solution1D s = solve_1d(p, c, [&](const Field&, double t) { times.push_back(t); });
  ASSERT_EQ(times.size(), 10u);
  EXPECT_EQ(times.front(), 0.0);
  EXPECT_DOUBLE_EQ(times.back(), p.T);
  EXPECT_EQ(s.levels.size(), 1u);
}

TEST(Pde1d, ParameterErrors) {
  const Problem1D p = feynman_kac_1d(0.5);
  auto run = [&](auto edit) {
    SchemeConfig c;
    c.M = 8;
    c.N = 8;
    edit(c);
    return solve_1d(p, c);
  };
  EXPECT_THROW(run([](SchemeConfig& c) { c.alpha = 0.0; }), ParameterError);
  EXPECT_THROW(run([](SchemeConfig& c) { c.alpha = 1.5; }), ParameterError);
  EXPECT_THROW(run([](SchemeConfig& c) { c.M = 1; }), ParameterError);
  EXPECT_THROW(run([](SchemeConfig& c) { c.N = 0; }), ParameterError);
  EXPECT_THROW(run([](SchemeConfig& c) { c.corrections = 8; }), ParameterError);
  EXPECT_THROW(run([](SchemeConfig& c) {
                 c.corrections = 2;
                 c.exponents = {0.5};
               }),
               ParameterError);
  Problem1D nosrc = p;
  nosrc.source = nullptr;
  EXPECT_THROW(solve_1d(nosrc, SchemeConfig{}), ParameterError);
  Problem1D cold = p;
  cold.diffusivity = 0.0;
  EXPECT_THROW(solve_1d(cold, SchemeConfig{}), ParameterError);
  Problem1D noexact = p;
  noexact.exact = nullptr;
  SchemeConfig c;
  c.corrections = 1;
  c.start = StartPolicy::exact;
  EXPECT_THROW(solve_1d(noexact, c), ParameterError);
}
