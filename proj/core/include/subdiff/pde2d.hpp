#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "subdiff/linsolve.hpp"
#include "subdiff/operators.hpp"
#include "subdiff/types.hpp"

namespace subdiff {

/// D_t^{alpha,lambda(x,y)}[u - e^{-lambda t} u0] = kappa Lap u + F on a rectangle.
struct Problem2D {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;
  double T = 1.0;
  double diffusivity = 1.0;
  std::function<cplx(double, double)> lambda;
  std::function<cplx(double, double, double)> source;
  std::function<cplx(double, double)> u0;                ///< null means zero
  std::function<cplx(double, double, double)> boundary;  ///< null means zero
  std::function<cplx(double, double, double)> exact;     ///< optional
  /// Optional closed form of Lap[e^{-lambda t} u0]; see Problem1D.
  std::function<cplx(double, double, double)> initial_laplacian;
};

struct SchemeConfig2D {
  double alpha = 0.5;
  int M1 = 16;
  int M2 = 16;
  int N = 16;
  int corrections = 0;
  TimeSampling sampling = TimeSampling::weighted_average;
  StartPolicy start = StartPolicy::coupled;
  std::vector<double> exponents; ///< overrides exponent_set when nonempty
  bool keep_history = true;
  bool final_time_only = false; ///< error at t_N only instead of max over levels
};

struct Solution2D {
  Mesh1D xmesh;
  Mesh1D ymesh;
  TimeGrid grid;
  std::vector<Field> levels; ///< u^0..u^N when keep_history, else only u^N
  std::optional<double> e2;
};

using LevelObserver2D = std::function<void(const Field& u, double t)>;

/// Implicit matrix for steps past the start-up phase, interior nodes in
/// lexicographic order with y fastest.
BandedMatrix assemble_2d(const Problem2D& prob, const SchemeConfig2D& cfg);

Solution2D solve_2d(const Problem2D& prob, const SchemeConfig2D& cfg,
                    const LevelObserver2D& observer = {});

} // namespace subdiff
