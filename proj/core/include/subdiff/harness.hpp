#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subdiff/examples.hpp"
#include "subdiff/report.hpp"

namespace subdiff {

enum class SweepAxis {
  time,    ///< vary N at fixed M
  space,   ///< vary M at fixed N
  coupled, ///< N = M^2
};

/// Custom problem given as expressions. Variables: t for scalar problems,
/// (x, t) in 1D and (x, y, t) in 2D; lambda drops the t argument.
struct CustomSpec {
  std::vector<double> domain;
  double T = 1.0;
  double diffusivity = 1.0;
  std::string lambda = "0";
  std::string source;
  std::string u0;
  std::string exact;
  std::string initial_laplacian;
  std::string boundary_left;  ///< 1D, function of t
  std::string boundary_right; ///< 1D, function of t
  std::string boundary;       ///< 2D, function of (x, y, t)
};

struct Experiment {
  std::string problem = "feynman-kac-1d"; ///< built-in id, custom-scalar, custom-1d or custom-2d
  SweepAxis axis = SweepAxis::time;
  std::vector<double> alphas{0.5};
  std::vector<double> nus{2.5};       ///< scalar problem family only
  std::vector<int> corrections{0};
  std::vector<Variant> variants{Variant::compact};
  std::vector<int> steps;             ///< N list (time axis) or the fixed N (space axis)
  std::vector<int> meshes;            ///< M list (space, coupled) or the fixed M (time axis)
  std::vector<int> baseline_meshes;   ///< coupled axis, baseline variant; defaults to meshes
  std::optional<TimeSampling> sampling;
  StartPolicy start = StartPolicy::coupled;
  CustomSpec custom;
  std::string reference;              ///< reference table id, may be empty

  void validate() const;
};

struct ReferenceRow {
  double resolution = 0.0;
  std::optional<double> error;
  std::optional<double> rate;
};

struct ReferenceBlock {
  std::string label;
  std::vector<ReferenceRow> rows;
  std::optional<double> error_rel_tol; ///< unset: errors not checked
  std::optional<double> rate_abs_tol;  ///< unset: rates not checked
  std::optional<double> rate_target;   ///< compare rates to this instead of the printed ones
  bool last_rate_printed = false;      ///< with rate_target: last row still uses the printed rate
  bool final_rate_only = false;
  std::string note;
};

struct CellCheck {
  std::string block;
  std::size_t row = 0;
  double resolution = 0.0;
  std::string kind; ///< error, rate or a named relation
  double expected = 0.0;
  double actual = 0.0;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ComparisonSummary {
  std::string table;
  std::vector<CellCheck> cells;

  bool passed() const;
  std::size_t failures() const;
};

struct ReferenceTable {
  std::string id;
  std::string title;
  Experiment experiment;
  std::vector<ReferenceBlock> blocks;
  /// Relations between blocks that are not per-cell (orderings, trends).
  std::function<std::vector<CellCheck>(const std::vector<ConvergenceReport>&)> relations;
};

/// Every reproducible table, in a fixed order.
const std::vector<ReferenceTable>& reference_tables();
const ReferenceTable& reference_table(const std::string& id);

/// The table's experiment restricted to the given alphas (all when empty).
Experiment table_experiment(const std::string& id, const std::vector<double>& alphas = {});

/// Source sampling used when an experiment leaves it unset.
TimeSampling default_sampling(const std::string& problem);

/// The experiment's problem at one alpha (nu only used by the scalar family).
AnyProblem make_problem(const Experiment& exp, double alpha, double nu = 2.5);

std::vector<ConvergenceReport> run_experiment(const Experiment& exp);

/// Per-cell check against the table; blocks missing from the report are skipped,
/// blocks present with a different row count raise ParameterError.
ComparisonSummary compare_reference(const std::vector<ConvergenceReport>& reports,
                                    const ReferenceTable& table);

void write_summary(std::ostream& os, const ComparisonSummary& summary);

/// Reads an experiment from JSON text; see the README for the key set.
Experiment experiment_from_json(const std::string& text);
Experiment load_experiment(const std::string& path);

/// max_n ||u^n||_inf and the data norm max|u0| + max|F| for the 1D problem.
struct StabilityResult {
  double tau = 0.0;
  double solution_norm = 0.0;
  double data_norm = 0.0;
};
std::vector<StabilityResult> stability_probe(const Problem1D& prob, double alpha, int M,
                                             const std::vector<int>& steps,
                                             TimeSampling sampling);

} // namespace subdiff
