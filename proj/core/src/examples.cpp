#include "subdiff/examples.hpp"

#include <cmath>
#include <numbers>

#include "subdiff/error.hpp"
#include "subdiff/operators.hpp"

namespace subdiff {

namespace {
constexpr double pi = std::numbers::pi;
}

ScalarProblem scalar_example(double alpha, double nu, double lambda, int N) {
  if (!(nu > 0.0)) throw ParameterError("nu must be positive");
  ScalarProblem p;
  p.alpha = alpha;
  p.lambda = lambda;
  p.T = 1.0;
  p.N = N;
  const cplx lam = lambda;
  p.exact = [lam, nu](double t) {
    return std::exp(-lam * t) * (std::pow(t, 3.0) + std::pow(t, nu));
  };
  p.rhs = [alpha, lam, nu](double t) {
    return exact_power_derivative(alpha, lam, 3.0, t) + exact_power_derivative(alpha, lam, nu, t);
  };
  return p;
}

Problem1D feynman_kac_1d(double alpha) {
  const cplx rho(1.0, 1.0);
  const double kappa = 0.5;
  const double c = std::tgamma(4.0 + alpha) / std::tgamma(4.0);
  Problem1D p;
  p.a = 0.0;
  p.b = 1.0;
  p.T = 1.0;
  p.diffusivity = kappa;
  p.lambda = [rho](double x) { return rho * x; };
  p.u0 = [](double x) { return cplx(std::sin(pi * x)); };
  p.exact = [rho, alpha](double x, double t) {
    return std::exp(-rho * x * t) * (std::pow(t, 3.0 + alpha) + 1.0) * std::sin(pi * x);
  };
  // d^2/dx^2 [e^{-rho x t} sin(pi x)]
  auto shape_xx = [rho](double x, double t) {
    const double s = std::sin(pi * x);
    const double co = std::cos(pi * x);
    return std::exp(-rho * x * t) *
           (rho * rho * t * t * s - 2.0 * pi * rho * t * co - pi * pi * s);
  };
  p.initial_laplacian = shape_xx;
  p.source = [=](double x, double t) {
    return -kappa * (std::pow(t, 3.0 + alpha) + 1.0) * shape_xx(x, t) +
           c * std::exp(-rho * x * t) * std::pow(t, 3.0) * std::sin(pi * x);
  };
  return p;
}

Problem2D feynman_kac_2d(double alpha) {
  const double c = 0.01;
  Problem2D p;
  p.T = 1.0;
  p.diffusivity = 1.0;
  p.lambda = [c](double x, double y) { return cplx(c * (x + y)); };
  p.u0 = [](double x, double y) { return cplx(std::sin(pi * x) * std::sin(pi * y)); };
  auto growth = [alpha](double t) {
    return std::pow(t, alpha) + std::pow(t, 2 * alpha) + std::pow(t, 3.0);
  };
  p.exact = [=](double x, double y, double t) {
    return cplx(std::exp(-c * (x + y) * t) * (1.0 + growth(t)) * std::sin(pi * x) *
                std::sin(pi * y));
  };
  // Lap [e^{-c(x+y)t} sin(pi x) sin(pi y)]
  auto shape_lap = [c](double x, double y, double t) {
    const double sx = std::sin(pi * x);
    const double sy = std::sin(pi * y);
    const double cx = std::cos(pi * x);
    const double cy = std::cos(pi * y);
    return cplx(std::exp(-c * (x + y) * t) *
                (2.0 * (c * c * t * t - pi * pi) * sx * sy - 2.0 * pi * c * t * (cx * sy + sx * cy)));
  };
  p.initial_laplacian = shape_lap;
  const double g1 = std::tgamma(1.0 + alpha);
  const double g2 = std::tgamma(1.0 + 2 * alpha) / std::tgamma(1.0 + alpha);
  const double g3 = 6.0 / std::tgamma(4.0 - alpha);
  p.source = [=](double x, double y, double t) {
    const double lam = c * (x + y);
    const double dv = std::exp(-lam * t) *
                      (g1 + g2 * std::pow(t, alpha) + g3 * std::pow(t, 3.0 - alpha)) *
                      std::sin(pi * x) * std::sin(pi * y);
    return dv - (1.0 + growth(t)) * shape_lap(x, y, t);
  };
  return p;
}

AnyProblem build_example(const std::string& id, double alpha,
                         const std::map<std::string, double>& params) {
  auto param = [&](const char* key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (id == "scalar") {
    if (!params.count("nu")) throw ParameterError("scalar example needs parameter nu");
    return scalar_example(alpha, param("nu", 0.0), param("lambda", 0.5),
                          static_cast<int>(param("N", 16)));
  }
  if (id == "feynman-kac-1d") return feynman_kac_1d(alpha);
  if (id == "feynman-kac-2d") return feynman_kac_2d(alpha);
  throw ParameterError("unknown example '" + id + "'");
}

} // namespace subdiff
