#include "subdiff/pde2d.hpp"

#include <cmath>

#include "subdiff/coeffs.hpp"
#include "subdiff/error.hpp"

namespace subdiff {

namespace {

constexpr double kSide = 1.0 / 12;
constexpr double kMid = 10.0 / 12;

double avg_w(int d) { return d == 0 ? kMid : kSide; }
double diff_w(int d, double ih2) { return (d == 0 ? -2.0 : 1.0) * ih2; }

class March2D {
public:
  March2D(const Problem2D& prob, const SchemeConfig2D& cfg)
      : prob_(prob), cfg_(cfg), xm_(Mesh1D::make(prob.x0, prob.x1, cfg.M1)),
        ym_(Mesh1D::make(prob.y0, prob.y1, cfg.M2)), grid_(TimeGrid::make(prob.T, cfg.N)),
        wcache_(cfg.alpha, prob.T / cfg.N, cfg.N) {
    if (!prob.source) throw ParameterError("problem has no source term");
    if (!(prob.diffusivity > 0.0)) throw ParameterError("diffusivity must be positive");
    M1_ = cfg.M1;
    M2_ = cfg.M2;
    N_ = cfg.N;
    alpha_ = cfg.alpha;
    tau_ = grid_.tau();
    inv_ta_ = std::pow(tau_, -alpha_);
    kappa_ = prob.diffusivity;
    theta_ = 1.0 - alpha_ / 2;
    ih1_ = 1.0 / (xm_.h() * xm_.h());
    ih2_ = 1.0 / (ym_.h() * ym_.h());
    if (!prob_.lambda) prob_.lambda = [](double, double) { return cplx{}; };

    std::vector<double> exps = cfg.exponents;
    if (exps.empty()) {
      exps = exponent_set(alpha_, cfg.corrections);
    } else if (cfg.corrections != 0 && static_cast<int>(exps.size()) != cfg.corrections) {
      throw ParameterError("exponent list length differs from correction count");
    }
    S_ = static_cast<int>(exps.size());
    if (S_ >= N_) throw ParameterError("need more time steps than correction terms");
    if (S_ > 0 && cfg.start == StartPolicy::exact && !prob.exact)
      throw ParameterError("exact start requires an exact solution");

    discrete_shift_ = prob.u0 && !prob.initial_laplacian;
    const int nodes = (M1_ + 1) * (M2_ + 1);
    G_.resize(nodes);
    for (int i = 0; i <= M1_; ++i)
      for (int j = 0; j <= M2_; ++j) G_[node(i, j)] = wcache_.get(prob_.lambda(x(i), y(j)));
    if (S_ > 0) {
      scache_ = std::make_unique<StartingWeightCache>(alpha_, tau_, N_, exps, cfg.sampling);
      W_.resize(nodes);
      for (int i = 0; i <= M1_; ++i)
        for (int j = 0; j <= M2_; ++j) W_[node(i, j)] = scache_->get(prob_.lambda(x(i), y(j)));
    }
    v_.assign(static_cast<std::size_t>(nodes) * (N_ + 1), cplx{});
  }

  double x(int i) const { return xm_.x(i); }
  double y(int j) const { return ym_.x(j); }
  int node(int i, int j) const { return i * (M2_ + 1) + j; }
  bool interior(int i, int j) const { return i > 0 && i < M1_ && j > 0 && j < M2_; }
  int unknown(int i, int j) const { return (i - 1) * (M2_ - 1) + (j - 1); }
  int unknowns() const { return (M1_ - 1) * (M2_ - 1); }
  cplx d(int i, int j) const { return G_[node(i, j)]->g_lambda[0] * inv_ta_; }
  double lap_w(int di, int dj) const {
    return diff_w(di, ih1_) * avg_w(dj) + avg_w(di) * diff_w(dj, ih2_);
  }

  cplx& v(int i, int j, int n) {
    return v_[static_cast<std::size_t>(node(i, j)) * (N_ + 1) + n];
  }
  cplx v(int i, int j, int n) const {
    return v_[static_cast<std::size_t>(node(i, j)) * (N_ + 1) + n];
  }

  cplx shift(double xx, double yy, double t) const {
    return prob_.u0 ? std::exp(-prob_.lambda(xx, yy) * t) * prob_.u0(xx, yy) : cplx{};
  }

  cplx boundary_v(int i, int j, int n) const {
    const double t = grid_.t(n);
    const cplx phi = prob_.boundary ? prob_.boundary(x(i), y(j), t) : cplx{};
    return phi - shift(x(i), y(j), t);
  }

  cplx source(double xx, double yy, double t) const {
    cplx f = prob_.source(xx, yy, t);
    if (prob_.u0 && prob_.initial_laplacian)
      f += kappa_ * prob_.initial_laplacian(xx, yy, t);
    return f;
  }

  template <class F> cplx sampled(F&& f, int n) const {
    const double tn = grid_.t(n);
    switch (cfg_.sampling) {
    case TimeSampling::weighted_average:
      return (1.0 - alpha_ / 2) * f(tn) + (alpha_ / 2) * f(tn - tau_);
    case TimeSampling::shifted_point:
      return f(tn - alpha_ * tau_ / 2);
    case TimeSampling::current_point:
      return f(tn);
    }
    return {};
  }

  std::vector<cplx> sampled_sources(int n) const {
    std::vector<cplx> Fs((M1_ + 1) * (M2_ + 1));
    for (int i = 0; i <= M1_; ++i)
      for (int j = 0; j <= M2_; ++j)
        Fs[node(i, j)] = sampled([&](double t) { return source(x(i), y(j), t); }, n);
    return Fs;
  }

  // Forcing of interior row (i, j): averaged source plus the gridded shift term.
  cplx forcing(int i, int j, int n, const std::vector<cplx>& Fs) const {
    cplx r{};
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj)
        r += avg_w(di) * avg_w(dj) * Fs[node(i + di, j + dj)];
    if (discrete_shift_) {
      cplx s{};
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const double xx = x(i + di);
          const double yy = y(j + dj);
          s += lap_w(di, dj) * sampled([&](double t) { return shift(xx, yy, t); }, n);
        }
      r += kappa_ * s;
    }
    return r;
  }

  BandedMatrix assemble() const {
    const int m2 = M2_ - 1;
    BandedMatrix A(unknowns(), m2 + 1, m2 + 1);
    for (int i = 1; i < M1_; ++i)
      for (int j = 1; j < M2_; ++j) {
        const int row = unknown(i, j);
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            if (!interior(i + di, j + dj)) continue;
            const cplx c = avg_w(di) * avg_w(dj) * d(i + di, j + dj) -
                           kappa_ * theta_ * lap_w(di, dj);
            A.add(row, unknown(i + di, j + dj), c);
          }
      }
    return A;
  }

  cplx history(int i, int j, int n) const {
    const WeightTable& g = *G_[node(i, j)];
    const cplx* hist = &v_[static_cast<std::size_t>(node(i, j)) * (N_ + 1)];
    cplx s{};
    for (int k = 1; k <= n; ++k) s += g.g_lambda[k] * hist[n - k];
    s *= inv_ta_;
    for (int k = 1; k <= S_; ++k) s += W_[node(i, j)]->at(n, k) * hist[k];
    return s;
  }

  void set_boundary(int n) {
    for (int i = 0; i <= M1_; ++i)
      for (int j = 0; j <= M2_; ++j)
        if (!interior(i, j)) v(i, j, n) = boundary_v(i, j, n);
  }

  void step(int n, const BandedFactor& F) {
    set_boundary(n);
    std::vector<cplx> H((M1_ + 1) * (M2_ + 1));
    for (int i = 0; i <= M1_; ++i)
      for (int j = 0; j <= M2_; ++j) {
        H[node(i, j)] = history(i, j, n);
        if (!interior(i, j)) H[node(i, j)] += d(i, j) * v(i, j, n);
      }
    const std::vector<cplx> Fs = sampled_sources(n);
    std::vector<cplx> rhs(unknowns());
    for (int i = 1; i < M1_; ++i)
      for (int j = 1; j < M2_; ++j) {
        cplx r = forcing(i, j, n, Fs);
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            const int ii = i + di;
            const int jj = j + dj;
            const double L = lap_w(di, dj);
            r -= avg_w(di) * avg_w(dj) * H[node(ii, jj)];
            r += kappa_ * (alpha_ / 2) * L * v(ii, jj, n - 1);
            if (!interior(ii, jj)) r += kappa_ * theta_ * L * v(ii, jj, n);
          }
        rhs[unknown(i, j)] = r;
      }
    const std::vector<cplx> sol = banded_solve(F, rhs);
    for (int i = 1; i < M1_; ++i)
      for (int j = 1; j < M2_; ++j) v(i, j, n) = sol[unknown(i, j)];
  }

  void exact_start() {
    for (int n = 1; n <= S_; ++n) {
      set_boundary(n);
      for (int i = 1; i < M1_; ++i)
        for (int j = 1; j < M2_; ++j)
          v(i, j, n) = prob_.exact(x(i), y(j), grid_.t(n)) - shift(x(i), y(j), grid_.t(n));
    }
  }

  void coupled_start() {
    for (int n = 1; n <= S_; ++n) set_boundary(n);
    const int S = S_;
    const int band = (M2_ - 1 + 1) * S + S - 1;
    BandedMatrix B(unknowns() * S, band, band);
    std::vector<cplx> rhs(static_cast<std::size_t>(unknowns()) * S);
    auto idx = [&](int i, int j, int k) { return unknown(i, j) * S + (k - 1); };
    for (int n = 1; n <= S; ++n) {
      const std::vector<cplx> Fs = sampled_sources(n);
      for (int i = 1; i < M1_; ++i)
        for (int j = 1; j < M2_; ++j) {
          const int row = idx(i, j, n);
          cplx r = forcing(i, j, n, Fs);
          for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
              const int ii = i + di;
              const int jj = j + dj;
              const bool in = interior(ii, jj);
              const double aw = avg_w(di) * avg_w(dj);
              const double L = lap_w(di, dj);
              for (int k = 1; k <= S; ++k) {
                cplx c = W_[node(ii, jj)]->at(n, k);
                if (k <= n) c += G_[node(ii, jj)]->g_lambda[n - k] * inv_ta_;
                if (in)
                  B.add(row, idx(ii, jj, k), aw * c);
                else
                  r -= aw * c * v(ii, jj, k);
              }
              if (in)
                B.add(row, idx(ii, jj, n), -kappa_ * theta_ * L);
              else
                r += kappa_ * theta_ * L * v(ii, jj, n);
              if (n >= 2) {
                if (in)
                  B.add(row, idx(ii, jj, n - 1), -kappa_ * (alpha_ / 2) * L);
                else
                  r += kappa_ * (alpha_ / 2) * L * v(ii, jj, n - 1);
              }
            }
          rhs[row] = r;
        }
    }
    const std::vector<cplx> sol = banded_solve(banded_factor(std::move(B)), rhs);
    for (int i = 1; i < M1_; ++i)
      for (int j = 1; j < M2_; ++j)
        for (int k = 1; k <= S; ++k) v(i, j, k) = sol[idx(i, j, k)];
  }

  Field output(int n) const {
    Field u = Field::grid(M1_ + 1, M2_ + 1, n);
    const double t = grid_.t(n);
    for (int i = 0; i <= M1_; ++i)
      for (int j = 0; j <= M2_; ++j) u.at(i, j) = v(i, j, n) + shift(x(i), y(j), t);
    return u;
  }

  double level_error(const Field& u, int n) const {
    double e = 0.0;
    for (int i = 1; i < M1_; ++i)
      for (int j = 1; j < M2_; ++j)
        e = std::max(e, std::abs(u.at(i, j) - prob_.exact(x(i), y(j), grid_.t(n))));
    return e;
  }

  Solution2D run(const LevelObserver2D& observer) {
    Solution2D sol;
    sol.xmesh = xm_;
    sol.ymesh = ym_;
    sol.grid = grid_;
    double e2 = 0.0;
    auto emit = [&](int n) {
      Field u = output(n);
      if (observer) observer(u, grid_.t(n));
      if (prob_.exact && n > 0 && (!cfg_.final_time_only || n == N_))
        e2 = std::max(e2, level_error(u, n));
      if (cfg_.keep_history || n == N_) sol.levels.push_back(std::move(u));
    };
    emit(0);
    if (S_ > 0) {
      try {
        if (cfg_.start == StartPolicy::exact)
          exact_start();
        else
          coupled_start();
      } catch (const Error& e) {
        throw StepError(std::string("start-up solve failed: ") + e.what(), 1);
      }
      for (int n = 1; n <= S_; ++n) emit(n);
    }
    BandedFactor F;
    try {
      F = banded_factor(assemble());
    } catch (const Error& e) {
      throw StepError(std::string("factorization failed: ") + e.what(), S_ + 1);
    }
    for (int n = S_ + 1; n <= N_; ++n) {
      try {
        step(n, F);
      } catch (const StepError&) {
        throw;
      } catch (const Error& e) {
        throw StepError(std::string("step failed: ") + e.what(), n);
      }
      emit(n);
    }
    if (prob_.exact) sol.e2 = e2;
    return sol;
  }

private:
  Problem2D prob_;
  SchemeConfig2D cfg_;
  Mesh1D xm_;
  Mesh1D ym_;
  TimeGrid grid_;
  WeightCache wcache_;
  std::unique_ptr<StartingWeightCache> scache_;
  std::vector<std::shared_ptr<const WeightTable>> G_;
  std::vector<std::shared_ptr<const StartingWeights>> W_;
  std::vector<cplx> v_;
  int M1_ = 0;
  int M2_ = 0;
  int N_ = 0;
  int S_ = 0;
  double alpha_ = 0.0;
  double tau_ = 0.0;
  double inv_ta_ = 0.0;
  double kappa_ = 1.0;
  double theta_ = 1.0;
  double ih1_ = 0.0;
  double ih2_ = 0.0;
  bool discrete_shift_ = false;
};

} // namespace

BandedMatrix assemble_2d(const Problem2D& prob, const SchemeConfig2D& cfg) {
  return March2D(prob, cfg).assemble();
}

Solution2D solve_2d(const Problem2D& prob, const SchemeConfig2D& cfg,
                    const LevelObserver2D& observer) {
  return March2D(prob, cfg).run(observer);
}

} // namespace subdiff
