#include "subdiff/operators.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "subdiff/error.hpp"

namespace subdiff {

namespace {

void same_shape(const Field& a, const Field& b) {
  if (a.nx != b.nx || a.ny != b.ny || a.size() != b.size())
    throw ParameterError("fields live on different meshes");
}

bool is_nonpositive_integer(double z) { return z <= 0.0 && z == std::floor(z); }

} // namespace

TimeGrid TimeGrid::make(double T, int N) {
  if (!(T > 0.0)) throw ParameterError("time horizon must be positive");
  if (N < 1) throw ParameterError("need at least one time step");
  return {T, N};
}

Mesh1D Mesh1D::make(double a, double b, int M) {
  if (!(b > a)) throw ParameterError("domain needs a < b");
  if (M < 2) throw ParameterError("mesh needs at least 2 intervals");
  return {a, b, M};
}

Field Field::line(int nx, int level) {
  Field f;
  f.values.assign(nx, cplx{});
  f.nx = nx;
  f.ny = 1;
  f.level = level;
  return f;
}

Field Field::grid(int nx, int ny, int level) {
  Field f;
  f.values.assign(static_cast<std::size_t>(nx) * ny, cplx{});
  f.nx = nx;
  f.ny = ny;
  f.level = level;
  return f;
}

Field time_average(double alpha, const Field& v_n, const Field& v_nm1) {
  same_shape(v_n, v_nm1);
  Field out = v_n;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - alpha / 2) * v_n[i] + (alpha / 2) * v_nm1[i];
  return out;
}

Field substantial_history_sum(const WeightTable& weights, std::span<const Field> history,
                              int n) {
  if (n < 0 || static_cast<std::size_t>(n) >= history.size())
    throw ParameterError("history does not hold levels 0..n");
  if (n >= weights.size()) throw ParameterError("weight table shorter than requested step");
  const double inv_ta = std::pow(weights.params.tau, -weights.params.alpha);
  Field out = history[n];
  out.level = n;
  for (std::size_t i = 0; i < out.size(); ++i) {
    cplx s{};
    for (int k = 0; k <= n; ++k) s += weights.g_lambda[k] * history[n - k][i];
    out[i] = inv_ta * s;
  }
  return out;
}

Field substantial_history_sum(std::span<const WeightTable* const> per_point,
                              std::span<const Field> history, int n) {
  if (n < 0 || static_cast<std::size_t>(n) >= history.size())
    throw ParameterError("history does not hold levels 0..n");
  Field out = history[n];
  out.level = n;
  if (per_point.size() != out.size())
    throw ParameterError("need one weight table per grid point");
  for (std::size_t i = 0; i < out.size(); ++i) {
    const WeightTable& w = *per_point[i];
    if (n >= w.size()) throw ParameterError("weight table shorter than requested step");
    cplx s{};
    for (int k = 0; k <= n; ++k) s += w.g_lambda[k] * history[n - k][i];
    out[i] = std::pow(w.params.tau, -w.params.alpha) * s;
  }
  return out;
}

cplx exact_power_derivative(double alpha, cplx lambda, double beta, double t) {
  const double z = beta + 1.0 - alpha;
  if (is_nonpositive_integer(z)) throw ParameterError("Gamma pole in power derivative");
  if (beta < 0.0 || t < 0.0) throw ParameterError("power derivative needs beta >= 0, t >= 0");
  const double c = std::tgamma(beta + 1.0) / std::tgamma(z);
  const double p = beta - alpha;
  if (t == 0.0) {
    if (p > 0.0) return 0.0;
    if (p == 0.0) return c;
    throw ParameterError("power derivative is singular at t = 0");
  }
  return std::exp(-lambda * t) * c * std::pow(t, p);
}

cplx oracle_substantial_derivative(const std::function<cplx(double)>& f,
                                   const std::function<cplx(double)>& df, double alpha,
                                   cplx lambda, double t, double tol) {
  if (!(tol > 0.0)) throw ParameterError("oracle tolerance must be positive");
  if (t == 0.0) return 0.0;
  // d/ds [e^{lambda s} f(s)]
  auto dg = [&](double s) { return std::exp(lambda * s) * (lambda * f(s) + df(s)); };
  if (alpha == 1.0) return std::exp(-lambda * t) * dg(t);

  boost::math::quadrature::tanh_sinh<double> integrator;
  auto part = [&](bool imag) {
    auto integrand = [&](double s, double sc) {
      // sc is the signed distance to the nearer endpoint; use it for t - s near s = t.
      const double dist = s > t / 2 ? sc : t - s;
      const cplx v = dg(s) * std::pow(dist, -alpha);
      return imag ? v.imag() : v.real();
    };
    double err = 0.0;
    double l1 = 0.0;
    const double val = integrator.integrate(integrand, 0.0, t, tol, &err, &l1);
    if (!(err <= 10.0 * tol * std::max(1.0, l1))) {
      std::ostringstream os;
      os << "oracle quadrature did not converge: error estimate " << err;
      throw OracleError(os.str());
    }
    return val;
  };
  const cplx integral(part(false), part(true));
  return std::exp(-lambda * t) * integral / std::tgamma(1.0 - alpha);
}

Field compact_average_1d(const Field& v) {
  Field out = v;
  for (int i = 1; i + 1 < v.nx; ++i) out[i] = (v[i - 1] + 10.0 * v[i] + v[i + 1]) / 12.0;
  return out;
}

Field second_difference_1d(const Field& v, double h) {
  Field out = Field::line(v.nx, v.level);
  const double ih2 = 1.0 / (h * h);
  for (int i = 1; i + 1 < v.nx; ++i) out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * ih2;
  return out;
}

Norms norms(const Field& e, double h) {
  Norms r;
  double sum = 0.0;
  for (int i = 1; i + 1 < e.nx; ++i) {
    const double a = std::abs(e[i]);
    r.max = std::max(r.max, a);
    sum += a * a;
  }
  r.l2 = std::sqrt(h * sum);
  return r;
}

Norms norms(const Field& e, double h1, double h2) {
  Norms r;
  double sum = 0.0;
  for (int i = 1; i + 1 < e.nx; ++i)
    for (int j = 1; j + 1 < e.ny; ++j) {
      const double a = std::abs(e.at(i, j));
      r.max = std::max(r.max, a);
      sum += a * a;
    }
  r.l2 = std::sqrt(h1 * h2 * sum);
  return r;
}

} // namespace subdiff
