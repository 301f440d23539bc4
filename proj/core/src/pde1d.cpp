#include "subdiff/pde1d.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "subdiff/coeffs.hpp"
#include "subdiff/error.hpp"
#include "subdiff/linsolve.hpp"

namespace subdiff {

namespace {

// sum_k (ar + i ai)[k] * (br + i bi)[k]
inline cplx cdot(const double* ar, const double* ai, const double* br, const double* bi, int n) {
  double re = 0.0;
  double im = 0.0;
#pragma omp simd reduction(+ : re, im)
  for (int k = 0; k < n; ++k) {
    re += ar[k] * br[k] - ai[k] * bi[k];
    im += ar[k] * bi[k] + ai[k] * br[k];
  }
  return {re, im};
}

cplx zero_x(double) { return {}; }

} // namespace

TransformedProblem1D transform_initial(const Problem1D& prob) {
  TransformedProblem1D tp;
  tp.problem = prob;
  auto lambda = prob.lambda ? prob.lambda : std::function<cplx(double)>(zero_x);
  tp.problem.lambda = lambda;
  if (!prob.u0) {
    tp.shift = [](double, double) { return cplx{}; };
    return tp;
  }
  auto u0 = prob.u0;
  tp.shift = [lambda, u0](double x, double t) { return std::exp(-lambda(x) * t) * u0(x); };
  tp.problem.u0 = nullptr;
  auto shift = tp.shift;
  const double a = prob.a;
  const double b = prob.b;
  auto bc = prob.boundary;
  tp.problem.boundary = [bc, shift, a, b](int side, double t) {
    const cplx phi = bc ? bc(side, t) : cplx{};
    return phi - shift(side == 0 ? a : b, t);
  };
  if (prob.exact) {
    auto ex = prob.exact;
    tp.problem.exact = [ex, shift](double x, double t) { return ex(x, t) - shift(x, t); };
  }
  if (prob.initial_laplacian) {
    auto f = prob.source;
    auto lap = prob.initial_laplacian;
    const double kappa = prob.diffusivity;
    tp.problem.source = [f, lap, kappa](double x, double t) {
      return f(x, t) + kappa * lap(x, t);
    };
    tp.discrete_shift = false;
  } else {
    tp.discrete_shift = true;
  }
  tp.problem.initial_laplacian = nullptr;
  return tp;
}

struct Stepper1D::Impl {
  struct Reversed {
    std::vector<double> re;
    std::vector<double> im;
  };

  TransformedProblem1D tp;
  SchemeConfig cfg;
  Mesh1D mesh;
  TimeGrid grid;
  int M = 0;
  int N = 0;
  int S = 0;
  double alpha = 0.0;
  double tau = 0.0;
  double inv_ta = 0.0;
  double h = 0.0;
  double kappa = 1.0;
  double theta = 1.0;
  double side_w = 0.0;
  double mid_w = 1.0;
  bool compact = true;
  TimeSampling sampling = TimeSampling::weighted_average;

  std::vector<double> x;
  WeightCache wcache;
  std::unique_ptr<StartingWeightCache> scache;
  std::map<const WeightTable*, Reversed> reversed;
  std::vector<std::shared_ptr<const WeightTable>> G;
  std::vector<const Reversed*> R;
  std::vector<std::shared_ptr<const StartingWeights>> W;
  std::vector<double> vr;
  std::vector<double> vi;
  Tridiag A;
  int level = 0;
  int computed = 0;

  Impl(const Problem1D& prob, const SchemeConfig& c)
      : tp(transform_initial(prob)), cfg(c), mesh(Mesh1D::make(prob.a, prob.b, c.M)),
        grid(TimeGrid::make(prob.T, c.N)), wcache(c.alpha, prob.T / c.N, c.N) {
    if (!prob.source) throw ParameterError("problem has no source term");
    M = c.M;
    N = c.N;
    alpha = c.alpha;
    tau = grid.tau();
    inv_ta = std::pow(tau, -alpha);
    h = mesh.h();
    kappa = prob.diffusivity;
    if (!(kappa > 0.0)) throw ParameterError("diffusivity must be positive");
    compact = c.variant == Variant::compact;
    theta = compact ? 1.0 - alpha / 2 : 1.0;
    side_w = compact ? 1.0 / 12 : 0.0;
    mid_w = compact ? 10.0 / 12 : 1.0;
    sampling = compact ? c.sampling : TimeSampling::current_point;

    std::vector<double> exps = c.exponents;
    if (exps.empty()) {
      exps = exponent_set(alpha, c.corrections);
    } else if (c.corrections != 0 && static_cast<int>(exps.size()) != c.corrections) {
      throw ParameterError("exponent list length differs from correction count");
    }
    S = static_cast<int>(exps.size());
    if (S >= N) throw ParameterError("need more time steps than correction terms");
    if (S > 0 && c.start == StartPolicy::exact && !tp.problem.exact)
      throw ParameterError("exact start requires an exact solution");

    x.resize(M + 1);
    for (int i = 0; i <= M; ++i) x[i] = mesh.x(i);
    G.resize(M + 1);
    R.resize(M + 1);
    for (int i = 0; i <= M; ++i) {
      G[i] = wcache.get(tp.problem.lambda(x[i]));
      auto [it, fresh] = reversed.try_emplace(G[i].get());
      if (fresh) {
        it->second.re.resize(N + 1);
        it->second.im.resize(N + 1);
        for (int j = 0; j <= N; ++j) {
          it->second.re[j] = G[i]->g_lambda[N - j].real();
          it->second.im[j] = G[i]->g_lambda[N - j].imag();
        }
      }
      R[i] = &it->second;
    }
    if (S > 0) {
      scache = std::make_unique<StartingWeightCache>(alpha, tau, N, exps, sampling);
      W.resize(M + 1);
      for (int i = 0; i <= M; ++i) W[i] = scache->get(tp.problem.lambda(x[i]));
    }

    vr.assign(static_cast<std::size_t>(M + 1) * (N + 1), 0.0);
    vi.assign(vr.size(), 0.0);

    const int m = M - 1;
    const double dc = kappa * theta / (h * h);
    A.diag.resize(m);
    A.sub.resize(m - 1);
    A.sup.resize(m - 1);
    for (int p = 0; p < m; ++p) {
      const int i = p + 1;
      A.diag[p] = mid_w * d(i) + 2.0 * dc;
      if (p > 0) A.sub[p - 1] = side_w * d(i - 1) - dc;
      if (p + 1 < m) A.sup[p] = side_w * d(i + 1) - dc;
    }
  }

  cplx d(int i) const { return G[i]->g_lambda[0] * inv_ta; }

  cplx v(int i, int m) const {
    const std::size_t k = static_cast<std::size_t>(i) * (N + 1) + m;
    return {vr[k], vi[k]};
  }
  void set_v(int i, int m, cplx z) {
    const std::size_t k = static_cast<std::size_t>(i) * (N + 1) + m;
    vr[k] = z.real();
    vi[k] = z.imag();
  }

  cplx boundary_v(int side, int n) const {
    return tp.problem.boundary ? tp.problem.boundary(side, grid.t(n)) : cplx{};
  }

  cplx source_at(int i, int n) const {
    const auto& f = tp.problem.source;
    const double tn = grid.t(n);
    switch (sampling) {
    case TimeSampling::weighted_average:
      return (1.0 - alpha / 2) * f(x[i], tn) + (alpha / 2) * f(x[i], tn - tau);
    case TimeSampling::shifted_point:
      return f(x[i], tn - alpha * tau / 2);
    case TimeSampling::current_point:
      return f(x[i], tn);
    }
    return {};
  }

  // kappa * second difference of the sampled shift, interior i.
  cplx shift_term(int i, int n) const {
    if (!tp.discrete_shift) return {};
    const auto& w = tp.shift;
    auto d2 = [&](double t) {
      return (w(x[i - 1], t) - 2.0 * w(x[i], t) + w(x[i + 1], t)) / (h * h);
    };
    const double tn = grid.t(n);
    switch (sampling) {
    case TimeSampling::weighted_average:
      return kappa * ((1.0 - alpha / 2) * d2(tn) + (alpha / 2) * d2(tn - tau));
    case TimeSampling::shifted_point:
      return kappa * d2(tn - alpha * tau / 2);
    case TimeSampling::current_point:
      return kappa * d2(tn);
    }
    return {};
  }

  // Averaged source plus the gridded shift contribution for interior row i.
  cplx forcing(int i, const std::vector<cplx>& Fs) const {
    cplx r = mid_w * Fs[i];
    if (compact) r += side_w * (Fs[i - 1] + Fs[i + 1]);
    return r;
  }

  std::vector<cplx> sampled_sources(int n) const {
    std::vector<cplx> Fs(M + 1);
    for (int i = 0; i <= M; ++i)
      if (compact || (i > 0 && i < M)) Fs[i] = source_at(i, n);
    return Fs;
  }

  // History part of the time operator at node i for level n > S, excluding the k = 0 term.
  cplx history(int i, int n) const {
    const double* vrp = vr.data() + static_cast<std::size_t>(i) * (N + 1);
    const double* vip = vi.data() + static_cast<std::size_t>(i) * (N + 1);
    cplx s = inv_ta * cdot(R[i]->re.data() + (N - n), R[i]->im.data() + (N - n), vrp, vip, n);
    for (int k = 1; k <= S; ++k) s += W[i]->at(n, k) * v(i, k);
    return s;
  }

  void step(int n) {
    const cplx b0 = boundary_v(0, n);
    const cplx bM = boundary_v(1, n);
    set_v(0, n, b0);
    set_v(M, n, bM);

    std::vector<cplx> H(M + 1);
    for (int i = 0; i <= M; ++i)
      if (compact || (i > 0 && i < M)) H[i] = history(i, n);
    // Boundary nodes carry the full operator.
    H[0] += d(0) * b0;
    H[M] += d(M) * bM;

    const std::vector<cplx> Fs = sampled_sources(n);
    const int m = M - 1;
    const double ih2 = 1.0 / (h * h);
    const double dc = kappa * theta * ih2;
    std::vector<cplx> rhs(m);
    for (int p = 0; p < m; ++p) {
      const int i = p + 1;
      cplx r = forcing(i, Fs) + shift_term(i, n);
      r -= mid_w * H[i];
      if (compact) {
        r -= side_w * (H[i - 1] + H[i + 1]);
        r += kappa * (alpha / 2) * (v(i - 1, n - 1) - 2.0 * v(i, n - 1) + v(i + 1, n - 1)) * ih2;
      }
      if (i == 1) r += dc * b0;
      if (i == M - 1) r += dc * bM;
      rhs[p] = r;
    }
    std::vector<cplx> sol;
    try {
      sol = thomas_solve(A, rhs);
    } catch (const Error& e) {
      throw StepError(std::string("step failed: ") + e.what(), n);
    }
    for (int p = 0; p < m; ++p) set_v(p + 1, n, sol[p]);
  }

  void exact_start() {
    for (int n = 1; n <= S; ++n) {
      set_v(0, n, boundary_v(0, n));
      set_v(M, n, boundary_v(1, n));
      for (int i = 1; i < M; ++i) set_v(i, n, tp.problem.exact(x[i], grid.t(n)));
    }
  }

  // Levels 1..S solved together.
  void coupled_start() {
    for (int n = 1; n <= S; ++n) {
      set_v(0, n, boundary_v(0, n));
      set_v(M, n, boundary_v(1, n));
    }
    const int m = M - 1;
    const int band = 2 * S - 1;
    BandedMatrix B(m * S, band, band);
    std::vector<cplx> rhs(static_cast<std::size_t>(m) * S);
    auto idx = [&](int i, int k) { return (i - 1) * S + (k - 1); };
    const double ih2 = 1.0 / (h * h);

    for (int n = 1; n <= S; ++n) {
      const std::vector<cplx> Fs = sampled_sources(n);
      for (int i = 1; i < M; ++i) {
        const int row = idx(i, n);
        cplx r = forcing(i, Fs) + shift_term(i, n);
        for (int j = i - 1; j <= i + 1; ++j) {
          const double aw = j == i ? mid_w : side_w;
          if (aw == 0.0) continue;
          for (int k = 1; k <= S; ++k) {
            cplx c = W[j]->at(n, k);
            if (k <= n) c += G[j]->g_lambda[n - k] * inv_ta;
            if (j > 0 && j < M)
              B.add(row, idx(j, k), aw * c);
            else
              r -= aw * c * v(j, k);
          }
        }
        for (int j = i - 1; j <= i + 1; ++j) {
          const double cj = (j == i ? -2.0 : 1.0) * ih2;
          const bool interior = j > 0 && j < M;
          if (interior)
            B.add(row, idx(j, n), -kappa * theta * cj);
          else
            r += kappa * theta * cj * v(j, n);
          if (compact && n >= 2) {
            if (interior)
              B.add(row, idx(j, n - 1), -kappa * (alpha / 2) * cj);
            else
              r += kappa * (alpha / 2) * cj * v(j, n - 1);
          }
        }
        rhs[row] = r;
      }
    }
    std::vector<cplx> sol;
    try {
      sol = banded_solve(banded_factor(std::move(B)), rhs);
    } catch (const Error& e) {
      throw StepError(std::string("start-up solve failed: ") + e.what(), 1);
    }
    for (int i = 1; i < M; ++i)
      for (int k = 1; k <= S; ++k) set_v(i, k, sol[idx(i, k)]);
  }

  Field output(int n) const {
    Field u = Field::line(M + 1, n);
    const double t = grid.t(n);
    for (int i = 0; i <= M; ++i) u[i] = v(i, n) + tp.shift(x[i], t);
    return u;
  }
};

Stepper1D::Stepper1D(const Problem1D& prob, const SchemeConfig& cfg)
    : impl_(std::make_unique<Impl>(prob, cfg)) {}
Stepper1D::~Stepper1D() = default;
Stepper1D::Stepper1D(Stepper1D&&) noexcept = default;
Stepper1D& Stepper1D::operator=(Stepper1D&&) noexcept = default;

int Stepper1D::level() const { return impl_->level; }
const Mesh1D& Stepper1D::mesh() const { return impl_->mesh; }
const TimeGrid& Stepper1D::grid() const { return impl_->grid; }
Field Stepper1D::initial() const { return impl_->output(0); }

Field Stepper1D::advance() {
  Impl& s = *impl_;
  if (s.level >= s.N) throw ParameterError("time march already reached the horizon");
  const int n = s.level + 1;
  if (n > s.computed) {
    if (n <= s.S) {
      if (s.cfg.start == StartPolicy::exact)
        s.exact_start();
      else
        s.coupled_start();
      s.computed = s.S;
    } else {
      s.step(n);
      s.computed = n;
    }
  }
  s.level = n;
  return s.output(n);
}

double final_error_1d(const Problem1D& prob, const Mesh1D& mesh, const Field& uN) {
  if (!prob.exact) throw ParameterError("error needs an exact solution");
  double e = 0.0;
  for (int i = 1; i < mesh.M; ++i) e = std::max(e, std::abs(uN[i] - prob.exact(mesh.x(i), prob.T)));
  return e;
}

Solution1D solve_1d(const Problem1D& prob, const SchemeConfig& cfg, const LevelObserver& observer) {
  Stepper1D stepper(prob, cfg);
  Solution1D sol;
  sol.mesh = stepper.mesh();
  sol.grid = stepper.grid();
  Field u = stepper.initial();
  if (observer) observer(u, 0.0);
  if (cfg.keep_history) sol.levels.push_back(u);
  for (int n = 1; n <= cfg.N; ++n) {
    u = stepper.advance();
    if (observer) observer(u, sol.grid.t(n));
    if (cfg.keep_history) sol.levels.push_back(u);
  }
  if (!cfg.keep_history) sol.levels.push_back(std::move(u));
  if (prob.exact) sol.e1 = final_error_1d(prob, sol.mesh, sol.levels.back());
  return sol;
}

Solution1D solve_1d_baseline(const Problem1D& prob, SchemeConfig cfg,
                             const LevelObserver& observer) {
  cfg.variant = Variant::baseline;
  return solve_1d(prob, cfg, observer);
}

} // namespace subdiff
