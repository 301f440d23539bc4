#pragma once

#include <functional>
#include <span>
#include <vector>

#include "subdiff/coeffs.hpp"
#include "subdiff/types.hpp"

namespace subdiff {

struct TimeGrid {
  double T = 1.0;
  int N = 1;

  static TimeGrid make(double T, int N);
  double tau() const { return T / N; }
  double t(int n) const { return n * tau(); }
};

struct Mesh1D {
  double a = 0.0;
  double b = 1.0;
  int M = 2;

  static Mesh1D make(double a, double b, int M);
  double h() const { return (b - a) / M; }
  double x(int i) const { return a + i * h(); }
  int nodes() const { return M + 1; }
};

/// One time level of grid values. 1D fields have ny == 1; 2D fields are
/// stored row-major with the y index fastest: values[i * ny + j].
struct Field {
  std::vector<cplx> values;
  int nx = 0;
  int ny = 1;
  int level = 0;

  static Field line(int nx, int level = 0);
  static Field grid(int nx, int ny, int level = 0);

  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
  cplx& at(int i, int j) { return values[static_cast<std::size_t>(i) * ny + j]; }
  const cplx& at(int i, int j) const { return values[static_cast<std::size_t>(i) * ny + j]; }
  std::size_t size() const { return values.size(); }
  bool is_2d() const { return ny > 1; }
};

struct Norms {
  double max = 0.0;
  double l2 = 0.0;
};

/// (1 - alpha/2) v_n + (alpha/2) v_nm1.
Field time_average(double alpha, const Field& v_n, const Field& v_nm1);

/// tau^{-alpha} sum_{k=0..n} g_lambda[k] v^{n-k} with one lambda for all points.
Field substantial_history_sum(const WeightTable& weights, std::span<const Field> history, int n);

/// Same with a weight table per grid point (spatially varying lambda).
Field substantial_history_sum(std::span<const WeightTable* const> per_point,
                              std::span<const Field> history, int n);

/// Substantial derivative of e^{-lambda t} t^beta:
/// e^{-lambda t} Gamma(beta+1)/Gamma(beta+1-alpha) t^{beta-alpha}.
cplx exact_power_derivative(double alpha, cplx lambda, double beta, double t);

/// Quadrature reference for the substantial derivative of f at t, using
/// the Caputo form (requires f(0) = 0). `df` is the derivative of f.
cplx oracle_substantial_derivative(const std::function<cplx(double)>& f,
                                   const std::function<cplx(double)>& df, double alpha,
                                   cplx lambda, double t, double tol = 1e-10);

/// (1, 10, 1)/12 on interior nodes; boundary nodes copied.
Field compact_average_1d(const Field& v);

/// Standard second difference on interior nodes; boundary entries set to 0.
Field second_difference_1d(const Field& v, double h);

/// Max and h-weighted L2 norm of |e| over interior nodes.
Norms norms(const Field& e, double h);

/// 2D variant with weight h1*h2.
Norms norms(const Field& e, double h1, double h2);

} // namespace subdiff
