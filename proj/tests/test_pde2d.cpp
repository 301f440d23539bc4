#include <gtest/gtest.h>

#include <cmath>

#include "subdiff/coeffs.hpp"
#include "subdiff/error.hpp"
#include "subdiff/examples.hpp"
#include "subdiff/pde2d.hpp"
#include "support.hpp"

using namespace subdiff;
using testing_support::average_matrix;
using testing_support::difference_matrix;
using testing_support::kron;

namespace {

Eigen::MatrixXcd dense(const BandedMatrix& B) {
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(B.rows(), B.rows());
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.rows(); ++j) D(i, j) = B.get(i, j);
  return D;
}

Problem2D plain(std::function<cplx(double, double)> lambda) {
  Problem2D p;
  p.diffusivity = 0.6;
  p.lambda = std::move(lambda);
  p.source = [](double, double, double) { return cplx{}; };
  return p;
}

// d = g_lambda[0] / tau^alpha for one lambda.
cplx leading(double alpha, cplx lambda, double tau) {
  return substantial_weights({alpha, lambda, tau}, 0).g_lambda[0] * std::pow(tau, -alpha);
}

Eigen::MatrixXcd kron_operator(const Problem2D& p, const SchemeConfig2D& c,
                               const Eigen::VectorXcd& d) {
  const int m1 = c.M1 - 1, m2 = c.M2 - 1;
  const double h1 = (p.x1 - p.x0) / c.M1, h2 = (p.y1 - p.y0) / c.M2;
  const double theta = 1.0 - c.alpha / 2;
  const Eigen::MatrixXd Ax = average_matrix(m1), Ay = average_matrix(m2);
  const Eigen::MatrixXd lap = kron(difference_matrix(m1, h1), Ay) + kron(Ax, difference_matrix(m2, h2));
  return kron(Ax, Ay).cast<cplx>() * d.asDiagonal() - (p.diffusivity * theta * lap).cast<cplx>();
}

} // namespace

TEST(Assemble2d, ConstantLambdaIsKroneckerSum) {
  const cplx lam(0.4, -0.2);
  const Problem2D p = plain([lam](double, double) { return lam; });
  SchemeConfig2D c;
  c.alpha = 0.6;
  c.M1 = 4;
  c.M2 = 5;
  c.N = 10;
  const int n = (c.M1 - 1) * (c.M2 - 1);
  const Eigen::VectorXcd d = Eigen::VectorXcd::Constant(n, leading(c.alpha, lam, p.T / c.N));
  EXPECT_LE((dense(assemble_2d(p, c)) - kron_operator(p, c, d)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Assemble2d, VaryingLambdaScalesColumns) {
  auto lam = [](double x, double y) { return cplx(x + 2 * y, x * y); };
  const Problem2D p = plain(lam);
  SchemeConfig2D c;
  c.alpha = 0.35;
  c.M1 = 5;
  c.M2 = 4;
  c.N = 7;
  const double h1 = 1.0 / c.M1, h2 = 1.0 / c.M2;
  Eigen::VectorXcd d((c.M1 - 1) * (c.M2 - 1));
  for (int i = 1; i < c.M1; ++i)
    for (int j = 1; j < c.M2; ++j)
      d((i - 1) * (c.M2 - 1) + (j - 1)) = leading(c.alpha, lam(i * h1, j * h2), p.T / c.N);
  EXPECT_LE((dense(assemble_2d(p, c)) - kron_operator(p, c, d)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Assemble2d, FirstOrderLimitIsCompactCrankNicolson) {
  const Problem2D p = plain(nullptr);
  SchemeConfig2D c;
  c.alpha = 1.0;
  c.M1 = c.M2 = 4;
  c.N = 8;
  const double tau = p.T / c.N;
  const Eigen::MatrixXd Ax = average_matrix(3);
  const Eigen::MatrixXd D = difference_matrix(3, 0.25);
  const Eigen::MatrixXd cn = kron(Ax, Ax) / tau - 0.5 * p.diffusivity * (kron(D, Ax) + kron(Ax, D));
  EXPECT_LE((dense(assemble_2d(p, c)) - cn.cast<cplx>()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Pde2d, SymmetricProblemGivesSymmetricField) {
  const Problem2D p = feynman_kac_2d(0.5);
  SchemeConfig2D c;
  c.alpha = 0.5;
  c.M1 = c.M2 = 8;
  c.N = 16;
  c.corrections = 2;
  c.keep_history = false;
  const Field u = solve_2d(p, c).levels.back();
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j) EXPECT_NEAR(std::abs(u.at(i, j) - u.at(j, i)), 0.0, 1e-12);
}

TEST(PropertyPde2d, CorrectionsReproduceSeparableSolution) {
  const double alpha = 0.3;
  const cplx lam(0.2, 0.5);
  const double kappa = 0.9;
  Problem2D p;
  p.diffusivity = kappa;
  p.lambda = [lam](double, double) { return lam; };
  auto T = [=](double t) { return std::exp(-lam * t) * (std::pow(t, alpha) + std::pow(t, 2 * alpha)); };
  auto q = [](double s) { return s * (1 - s); };
  p.exact = [=](double x, double y, double t) { return T(t) * q(x) * q(y); };
  p.source = [=](double x, double y, double t) {
    const cplx dT = exact_power_derivative(alpha, lam, alpha, t) +
                    exact_power_derivative(alpha, lam, 2 * alpha, t);
    return dT * q(x) * q(y) + 2.0 * kappa * T(t) * (q(x) + q(y));
  };
  for (StartPolicy start : {StartPolicy::coupled, StartPolicy::exact}) {
    SchemeConfig2D c;
    c.alpha = alpha;
    c.M1 = 5;
    c.M2 = 6;
    c.N = 12;
    c.corrections = 2;
    c.sampling = TimeSampling::weighted_average;
    c.start = start;
    const Solution2D s = solve_2d(p, c);
    ASSERT_TRUE(s.e2);
    EXPECT_LE(*s.e2, 1e-11) << to_string(start);
  }
}

TEST(Pde2d, FinalTimeErrorBelowMaximum) {
  const Problem2D p = feynman_kac_2d(0.4);
  SchemeConfig2D c;
  c.alpha = 0.4;
  c.M1 = c.M2 = 6;
  c.N = 10;
  c.keep_history = false;
  const double all = *solve_2d(p, c).e2;
  c.final_time_only = true;
  const double last = *solve_2d(p, c).e2;
  EXPECT_GT(last, 0.0);
  EXPECT_LE(last, all);
}

TEST(Pde2d, ObserverAndErrors) {
  const Problem2D p = feynman_kac_2d(0.5);
  SchemeConfig2D c;
  c.M1 = 4;
  c.M2 = 3;
  c.N = 5;
  int calls = 0;
  const Solution2D s = solve_2d(p, c, [&](const Field& u, double) {
    EXPECT_EQ(u.nx, 5);
    EXPECT_EQ(u.ny, 4);
    ++calls;
  });
  EXPECT_EQ(calls, 6);
  EXPECT_EQ(s.levels.size(), 6u);

  SchemeConfig2D bad = c;
  bad.corrections = 5;
  EXPECT_THROW(solve_2d(p, bad), ParameterError);
  bad = c;
  bad.alpha = -0.1;
  EXPECT_THROW(solve_2d(p, bad), ParameterError);
  Problem2D nosrc = p;
  nosrc.source = nullptr;
  EXPECT_THROW(solve_2d(nosrc, c), ParameterError);
}
