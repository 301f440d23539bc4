#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "subdiff/operators.hpp"
#include "subdiff/types.hpp"

namespace subdiff {

/// D_t^{alpha,lambda(x)}[u - e^{-lambda t} u0] = kappa u_xx + F on (a, b) x (0, T].
struct Problem1D {
  double a = 0.0;
  double b = 1.0;
  double T = 1.0;
  double diffusivity = 1.0;
  std::function<cplx(double)> lambda;
  std::function<cplx(double, double)> source;
  std::function<cplx(double)> u0;                 ///< null means zero
  std::function<cplx(int side, double t)> boundary; ///< side 0 at a, 1 at b; null means zero
  std::function<cplx(double, double)> exact;      ///< optional
  /// Optional closed form of d^2/dx^2 [e^{-lambda(x) t} u0(x)]. When given,
  /// it is folded into the source; otherwise the shift is differenced on the grid.
  std::function<cplx(double, double)> initial_laplacian;
};

enum class Variant { compact, baseline };

struct SchemeConfig {
  double alpha = 0.5;
  int M = 16;
  int N = 16;
  int corrections = 0;
  Variant variant = Variant::compact;
  /// Source sampling for the compact variant; the baseline always uses t_n.
  TimeSampling sampling = TimeSampling::weighted_average;
  StartPolicy start = StartPolicy::coupled;
  std::vector<double> exponents; ///< overrides exponent_set when nonempty
  bool keep_history = true;
};

/// Problem in v = u - w, w(x, t) = e^{-lambda(x) t} u0(x), with v(x, 0) = 0.
struct TransformedProblem1D {
  Problem1D problem;
  std::function<cplx(double, double)> shift;
  /// True when spatial operators must also act on the gridded shift.
  bool discrete_shift = false;
};

TransformedProblem1D transform_initial(const Problem1D& prob);

struct Solution1D {
  Mesh1D mesh;
  TimeGrid grid;
  std::vector<Field> levels; ///< u^0..u^N when keep_history, else only u^N
  std::optional<double> e1;
};

using LevelObserver = std::function<void(const Field& u, double t)>;

/// Marches the scheme one level at a time; `advance` returns u^n.
class Stepper1D {
public:
  Stepper1D(const Problem1D& prob, const SchemeConfig& cfg);
  ~Stepper1D();
  Stepper1D(Stepper1D&&) noexcept;
  Stepper1D& operator=(Stepper1D&&) noexcept;

  int level() const;
  const Mesh1D& mesh() const;
  const TimeGrid& grid() const;
  Field initial() const;
  Field advance();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Solution1D solve_1d(const Problem1D& prob, const SchemeConfig& cfg,
                    const LevelObserver& observer = {});

/// Identity in place of both averaging operators; first order in time.
Solution1D solve_1d_baseline(const Problem1D& prob, SchemeConfig cfg,
                             const LevelObserver& observer = {});

/// max over interior nodes of |u(x_i, T) - u_i^N|.
double final_error_1d(const Problem1D& prob, const Mesh1D& mesh, const Field& uN);

} // namespace subdiff
