#include "subdiff_cli/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subdiff/coeffs.hpp"
#include "subdiff/error.hpp"
#include "subdiff/examples.hpp"
#include "subdiff/expr.hpp"
#include "subdiff/harness.hpp"
#include "subdiff/report.hpp"

namespace subdiff::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kOutputDirEnv = "SUBDIFF_OUTPUT_DIR";

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g5(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.5g", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

/// Relative paths land under $SUBDIFF_OUTPUT_DIR when it is set.
fs::path resolve_output(const std::string& path) {
  fs::path p(path);
  if (p.is_relative())
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) p = fs::path(dir) / p;
  return p;
}

/// Either the given stream or an owned file.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path.empty()) return;
    const fs::path p = resolve_output(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    file_ = std::make_unique<std::ofstream>(p);
    if (!*file_) throw Error("cannot write '" + p.string() + "'");
    os_ = file_.get();
    path_ = p.string();
  }
  std::ostream& os() { return *os_; }
  bool is_file() const { return file_ != nullptr; }
  const std::string& path() const { return path_; }

private:
  std::ostream* os_;
  std::unique_ptr<std::ofstream> file_;
  std::string path_;
};

cplx parse_complex(const std::string& text) {
  return Expression::parse(text, {}).eval({});
}

struct Common {
  std::string format = "table";
  std::string output;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "csv or table")
      ->check(CLI::IsMember({"csv", "table"}))
      ->capture_default_str();
  sub->add_option("--output,-o", c.output,
                  std::string("Output file; relative paths resolve under $") + kOutputDirEnv);
}

// ---- coeffs ----

struct CoeffsArgs {
  Common common;
  double alpha = 0.5;
  std::string lambda = "0";
  double tau = 0.1;
  int n = 4;
};

int run_coeffs(const CoeffsArgs& a, std::ostream& out) {
  const FracParams p{a.alpha, parse_complex(a.lambda), a.tau};
  p.validate();
  const WeightTable w = substantial_weights(p, a.n);
  const auto l = cumulative_l(w);
  Sink sink(a.common.output, out);
  auto& os = sink.os();
  if (a.common.format == "csv") {
    os << "k,g,g_lambda_re,g_lambda_im,l\n";
    for (int k = 0; k <= a.n; ++k)
      os << k << ',' << g17(w.g[k]) << ',' << g17(w.g_lambda[k].real()) << ','
         << g17(w.g_lambda[k].imag()) << ',' << g17(l[k]) << '\n';
  } else {
    os << pad("k", 5) << pad("g", 14) << pad("Re g_lambda", 14) << pad("Im g_lambda", 14)
       << pad("l", 14) << '\n';
    for (int k = 0; k <= a.n; ++k)
      os << pad(std::to_string(k), 5) << pad(g5(w.g[k]), 14) << pad(g5(w.g_lambda[k].real()), 14)
         << pad(g5(w.g_lambda[k].imag()), 14) << pad(g5(l[k]), 14) << '\n';
  }
  return 0;
}

// ---- single solves ----

struct SolveArgs {
  Common common;
  std::string problem;
  std::string config;
  double alpha = 0.5;
  double nu = 2.5;
  std::string lambda = "0.5";
  int M = 16;
  int M1 = 0;
  int M2 = 0;
  int N = 16;
  int corrections = 0;
  std::string variant = "compact";
  std::string sampling;
  std::string start = "coupled";
  std::string history;
  std::string snapshot;
  bool final_only = false;
};

Experiment solve_experiment(const SolveArgs& a, const char* fallback) {
  Experiment e;
  if (!a.config.empty()) {
    e = load_experiment(a.config);
    if (!a.problem.empty() && a.problem != e.problem)
      throw ParameterError("--problem " + a.problem + " conflicts with config problem " +
                           e.problem);
  } else {
    e.problem = a.problem.empty() ? fallback : a.problem;
  }
  return e;
}

TimeSampling pick_sampling(const SolveArgs& a, const Experiment& e) {
  if (!a.sampling.empty()) return parse_time_sampling(a.sampling.c_str());
  return e.sampling.value_or(default_sampling(e.problem));
}

void write_row(std::ostream& os, bool csv, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (csv)
      os << (i ? "," : "") << cells[i];
    else
      os << pad(cells[i], i == 0 ? 6 : 14);
  }
  os << '\n';
}

int run_fode(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  Experiment e = solve_experiment(a, "scalar");
  AnyProblem any = make_problem(e, a.alpha, a.nu);
  if (!std::holds_alternative<ScalarProblem>(any))
    throw ParameterError("fode needs a scalar problem (scalar or custom-scalar)");
  ScalarProblem p = std::get<ScalarProblem>(any);
  if (e.problem == "scalar") {
    const cplx lambda = parse_complex(a.lambda);
    if (lambda.imag() != 0.0) throw ParameterError("the scalar example takes a real --lambda");
    p = scalar_example(a.alpha, a.nu, lambda.real(), a.N);
  }
  p.N = a.N;
  ScalarOptions o;
  o.sampling = pick_sampling(a, e);
  o.start = parse_start_policy(a.start.c_str());
  o.corrections = a.corrections;
  const auto u = solve_scalar(p, o);
  const bool csv = a.common.format == "csv";
  Sink sink(a.common.output, out);
  auto& os = sink.os();
  const double tau = p.T / p.N;
  std::vector<std::string> head = {"n", "t", "re", "im"};
  if (p.exact) head.insert(head.end(), {"exact_re", "exact_im"});
  write_row(os, csv, head);
  for (int n = 0; n <= p.N; ++n) {
    const double t = n * tau;
    auto f = csv ? g17 : g5;
    std::vector<std::string> row = {std::to_string(n), f(t), f(u[n].real()), f(u[n].imag())};
    if (p.exact) {
      const cplx x = n == 0 ? p.u0 : p.exact(t);
      row.push_back(f(x.real()));
      row.push_back(f(x.imag()));
    }
    write_row(os, csv, row);
  }
  if (p.exact) {
    const double e_max = max_error_scalar(p, u);
    (csv && !sink.is_file() ? err : out) << "max error " << format_sci(e_max) << '\n';
  }
  return 0;
}

int run_solve1d(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  Experiment e = solve_experiment(a, "feynman-kac-1d");
  AnyProblem any = make_problem(e, a.alpha);
  if (!std::holds_alternative<Problem1D>(any))
    throw ParameterError("solve1d needs a 1D problem (feynman-kac-1d or custom-1d)");
  const Problem1D& p = std::get<Problem1D>(any);
  SchemeConfig cfg;
  cfg.alpha = a.alpha;
  cfg.M = a.M;
  cfg.N = a.N;
  cfg.corrections = a.corrections;
  cfg.variant = a.variant == "baseline" ? Variant::baseline : Variant::compact;
  cfg.sampling = pick_sampling(a, e);
  cfg.start = parse_start_policy(a.start.c_str());
  cfg.keep_history = false;

  std::unique_ptr<Sink> hist;
  LevelObserver observer;
  if (!a.history.empty()) {
    hist = std::make_unique<Sink>(a.history, out);
    auto& hs = hist->os();
    const Mesh1D mesh = Mesh1D::make(p.a, p.b, cfg.M);
    hs << "n,t";
    for (int i = 0; i <= cfg.M; ++i) {
      const std::string x = g17(mesh.x(i));
      hs << ",re(x=" << x << "),im(x=" << x << ")";
    }
    hs << '\n';
    observer = [&hs](const Field& u, double t) {
      hs << u.level << ',' << g17(t);
      for (const auto& z : u.values) hs << ',' << g17(z.real()) << ',' << g17(z.imag());
      hs << '\n';
    };
  }
  const Solution1D sol = solve_1d(p, cfg, observer);
  const Field& uN = sol.levels.back();
  const bool csv = a.common.format == "csv";
  Sink sink(a.common.output, out);
  auto& os = sink.os();
  std::vector<std::string> head = {"i", "x", "re", "im"};
  if (p.exact) head.insert(head.end(), {"exact_re", "exact_im"});
  write_row(os, csv, head);
  auto f = csv ? g17 : g5;
  for (int i = 0; i <= cfg.M; ++i) {
    const double x = sol.mesh.x(i);
    std::vector<std::string> row = {std::to_string(i), f(x), f(uN[i].real()), f(uN[i].imag())};
    if (p.exact) {
      const cplx z = p.exact(x, p.T);
      row.push_back(f(z.real()));
      row.push_back(f(z.imag()));
    }
    write_row(os, csv, row);
  }
  if (sol.e1) (csv && !sink.is_file() ? err : out) << "E1 = " << format_sci(*sol.e1) << '\n';
  return 0;
}

int run_solve2d(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  Experiment e = solve_experiment(a, "feynman-kac-2d");
  AnyProblem any = make_problem(e, a.alpha);
  if (!std::holds_alternative<Problem2D>(any))
    throw ParameterError("solve2d needs a 2D problem (feynman-kac-2d or custom-2d)");
  const Problem2D& p = std::get<Problem2D>(any);
  SchemeConfig2D cfg;
  cfg.alpha = a.alpha;
  cfg.M1 = a.M1 > 0 ? a.M1 : a.M;
  cfg.M2 = a.M2 > 0 ? a.M2 : a.M;
  cfg.N = a.N;
  cfg.corrections = a.corrections;
  cfg.sampling = pick_sampling(a, e);
  cfg.start = parse_start_policy(a.start.c_str());
  cfg.keep_history = false;
  cfg.final_time_only = a.final_only;

  std::unique_ptr<Sink> snap;
  LevelObserver2D observer;
  if (!a.snapshot.empty()) {
    snap = std::make_unique<Sink>(a.snapshot, out);
    auto& ss = snap->os();
    ss << "n,t,x,y,re,im\n";
    const Mesh1D xm = Mesh1D::make(p.x0, p.x1, cfg.M1);
    const Mesh1D ym = Mesh1D::make(p.y0, p.y1, cfg.M2);
    observer = [&ss, xm, ym](const Field& u, double t) {
      for (int i = 0; i < u.nx; ++i)
        for (int j = 0; j < u.ny; ++j)
          ss << u.level << ',' << g17(t) << ',' << g17(xm.x(i)) << ',' << g17(ym.x(j)) << ','
             << g17(u.at(i, j).real()) << ',' << g17(u.at(i, j).imag()) << '\n';
    };
  }
  const Solution2D sol = solve_2d(p, cfg, observer);
  const Field& uN = sol.levels.back();
  const bool csv = a.common.format == "csv";
  Sink sink(a.common.output, out);
  auto& os = sink.os();
  std::vector<std::string> head = {"i", "j", "x", "y", "re", "im"};
  write_row(os, csv, head);
  auto f = csv ? g17 : g5;
  for (int i = 0; i <= cfg.M1; ++i)
    for (int j = 0; j <= cfg.M2; ++j)
      write_row(os, csv,
                {std::to_string(i), std::to_string(j), f(sol.xmesh.x(i)), f(sol.ymesh.x(j)),
                 f(uN.at(i, j).real()), f(uN.at(i, j).imag())});
  if (sol.e2) (csv && !sink.is_file() ? err : out) << "E2 = " << format_sci(*sol.e2) << '\n';
  return 0;
}

// ---- convergence ----

struct ConvArgs {
  Common common;
  std::string table;
  std::string config;
  bool list = false;
  bool no_check = false;
  std::string problem;
  std::string axis;
  std::vector<double> alphas;
  std::vector<double> nus;
  std::vector<int> steps;
  std::vector<int> meshes;
  std::vector<int> baseline_meshes;
  std::vector<int> corrections;
  std::vector<std::string> variants;
  std::string sampling;
  std::string start;
};

void list_tables(std::ostream& out) {
  for (const auto& t : reference_tables()) out << pad(t.id, 15) << "  " << t.title << '\n';
}

Experiment conv_experiment(const ConvArgs& a, const CLI::App& sub) {
  static const char* sweep_flags[] = {"--problem", "--axis", "--nu", "--N", "--M",
                                      "--baseline-M", "--corrections", "--variant",
                                      "--sampling", "--start"};
  Experiment e;
  if (!a.table.empty()) {
    for (const char* f : sweep_flags)
      if (sub.count(f))
        throw ParameterError(std::string("--table fixes the sweep; drop ") + f +
                             " or use --config");
    return table_experiment(a.table, a.alphas);
  }
  if (!a.config.empty()) e = load_experiment(a.config);
  if (!a.problem.empty()) e.problem = a.problem;
  if (!a.axis.empty()) {
    if (a.axis == "time")
      e.axis = SweepAxis::time;
    else if (a.axis == "space")
      e.axis = SweepAxis::space;
    else
      e.axis = SweepAxis::coupled;
  }
  if (!a.alphas.empty()) e.alphas = a.alphas;
  if (!a.nus.empty()) e.nus = a.nus;
  if (!a.steps.empty()) e.steps = a.steps;
  if (!a.meshes.empty()) e.meshes = a.meshes;
  if (!a.baseline_meshes.empty()) e.baseline_meshes = a.baseline_meshes;
  if (!a.corrections.empty()) e.corrections = a.corrections;
  if (!a.variants.empty()) {
    e.variants.clear();
    for (const auto& v : a.variants)
      e.variants.push_back(v == "baseline" ? Variant::baseline : Variant::compact);
  }
  if (!a.sampling.empty()) e.sampling = parse_time_sampling(a.sampling.c_str());
  if (!a.start.empty()) e.start = parse_start_policy(a.start.c_str());
  if (a.config.empty() && a.problem.empty())
    throw ParameterError("convergence needs --table, --config or --problem (see --list-tables)");
  e.validate();
  return e;
}

int run_convergence(const ConvArgs& a, const CLI::App& sub, std::ostream& out,
                    std::ostream& err) {
  if (a.list) {
    list_tables(out);
    return 0;
  }
  const Experiment e = conv_experiment(a, sub);
  const auto reports = run_experiment(e);
  Sink sink(a.common.output, out);
  if (a.common.format == "csv")
    write_csv(sink.os(), reports);
  else
    write_table(sink.os(), reports);
  if (e.reference.empty() || a.no_check) return 0;
  const ComparisonSummary sum = compare_reference(reports, reference_table(e.reference));
  std::ostream& so = (a.common.format == "csv" && !sink.is_file()) ? err : out;
  write_summary(so, sum);
  return sum.passed() ? 0 : 1;
}

} // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solvers and convergence studies for time-fractional substantial diffusion"};
  app.name("subdiff");
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(0, 1);
  bool top_list = false;
  app.add_flag("--list-tables", top_list, "List reproducible tables and exit");

  CoeffsArgs ca;
  auto* coeffs = app.add_subcommand("coeffs", "Dump Grunwald, substantial and cumulative weights");
  coeffs->add_option("--alpha", ca.alpha, "Fractional order in (0, 1]")->required();
  coeffs->add_option("--lambda", ca.lambda, "Complex lambda, e.g. 1+i")->capture_default_str();
  coeffs->add_option("--tau", ca.tau, "Time step")->required();
  coeffs->add_option("--n", ca.n, "Largest index k")->required()->check(CLI::NonNegativeNumber);
  add_common(coeffs, ca.common);

  auto add_solve = [&](CLI::App* sub, SolveArgs& s) {
    sub->add_option("--problem", s.problem, "Built-in problem id or custom-* with --config");
    sub->add_option("--config", s.config, "JSON file describing a custom problem")
        ->check(CLI::ExistingFile);
    sub->add_option("--alpha", s.alpha, "Fractional order in (0, 1]")->required();
    sub->add_option("--N", s.N, "Time steps")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--corrections,-S", s.corrections, "Number of correction terms")
        ->capture_default_str()
        ->check(CLI::Range(0, kMaxCorrections));
    sub->add_option("--sampling", s.sampling, "Source sampling: average, shifted or current")
        ->check(CLI::IsMember({"average", "shifted", "current"}));
    sub->add_option("--start", s.start, "Start-up levels: coupled or exact")
        ->check(CLI::IsMember({"coupled", "exact"}))
        ->capture_default_str();
    add_common(sub, s.common);
  };

  SolveArgs fa;
  auto* fode = app.add_subcommand("fode", "Solve the scalar fractional equation");
  add_solve(fode, fa);
  fode->add_option("--nu", fa.nu, "Exponent of the scalar example")->capture_default_str();
  fode->add_option("--lambda", fa.lambda, "Real lambda of the scalar example")
      ->capture_default_str();

  SolveArgs s1;
  auto* solve1d = app.add_subcommand("solve1d", "Solve a 1D problem and print u at T");
  add_solve(solve1d, s1);
  solve1d->add_option("--M", s1.M, "Space intervals")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  solve1d->add_option("--variant", s1.variant, "compact or baseline")
      ->check(CLI::IsMember({"compact", "baseline"}))
      ->capture_default_str();
  solve1d->add_option("--history", s1.history, "Stream every level to this CSV file");

  SolveArgs s2;
  auto* solve2d = app.add_subcommand("solve2d", "Solve a 2D problem and print u at T");
  add_solve(solve2d, s2);
  solve2d->add_option("--M", s2.M, "Space intervals in both directions")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 14));
  solve2d->add_option("--M1", s2.M1, "Space intervals in x")->check(CLI::Range(2, 1 << 14));
  solve2d->add_option("--M2", s2.M2, "Space intervals in y")->check(CLI::Range(2, 1 << 14));
  solve2d->add_option("--snapshot", s2.snapshot, "Write every level to this CSV file");
  solve2d->add_flag("--final-only", s2.final_only, "Error at T only instead of max over levels");

  ConvArgs cv;
  auto* conv = app.add_subcommand("convergence", "Run a convergence sweep");
  conv->add_option("--table", cv.table, "Reproduce a reference table by id");
  conv->add_option("--config", cv.config, "JSON experiment file")->check(CLI::ExistingFile);
  conv->add_flag("--list-tables", cv.list, "List reproducible tables and exit");
  conv->add_flag("--no-check", cv.no_check, "Skip the comparison with the reference table");
  conv->add_option("--problem", cv.problem, "Problem id");
  conv->add_option("--axis", cv.axis, "time, space or coupled")
      ->check(CLI::IsMember({"time", "space", "coupled"}));
  conv->add_option("--alpha", cv.alphas, "Fractional orders")->delimiter(',');
  conv->add_option("--nu", cv.nus, "Scalar example exponents")->delimiter(',');
  conv->add_option("--N", cv.steps, "Time step counts")->delimiter(',');
  conv->add_option("--M", cv.meshes, "Space interval counts")->delimiter(',');
  conv->add_option("--baseline-M", cv.baseline_meshes, "Baseline meshes on the coupled axis")
      ->delimiter(',');
  conv->add_option("--corrections,-S", cv.corrections, "Correction counts")->delimiter(',');
  conv->add_option("--variant", cv.variants, "compact and/or baseline")
      ->delimiter(',')
      ->check(CLI::IsMember({"compact", "baseline"}));
  conv->add_option("--sampling", cv.sampling, "average, shifted or current")
      ->check(CLI::IsMember({"average", "shifted", "current"}));
  conv->add_option("--start", cv.start, "coupled or exact")
      ->check(CLI::IsMember({"coupled", "exact"}));
  add_common(conv, cv.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (top_list) {
      list_tables(out);
      return 0;
    }
    if (*coeffs) return run_coeffs(ca, out);
    if (*fode) return run_fode(fa, out, err);
    if (*solve1d) return run_solve1d(s1, out, err);
    if (*solve2d) return run_solve2d(s2, out, err);
    if (*conv) return run_convergence(cv, *conv, out, err);
    err << app.help();
    return 2;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace subdiff::cli
