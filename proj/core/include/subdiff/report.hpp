#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace subdiff {

struct ReportRow {
  double resolution = 0.0; ///< tau or h of this row
  int N = 0;
  int M = 0;
  double error = 0.0;
  std::optional<double> rate;
  double seconds = 0.0;
};

/// One column of a convergence table: rows plus free-form metadata.
struct ConvergenceReport {
  std::string label;
  std::vector<ReportRow> rows;
  std::map<std::string, std::string> metadata;

  /// rate_i = log2(error_{i-1} / error_i) whenever resolutions halve.
  void compute_rates();
};

/// CSV with columns block,resolution,N,M,error,rate,seconds,metadata.
/// Numbers use 17 significant digits so reading back is exact.
void write_csv(std::ostream& os, const std::vector<ConvergenceReport>& reports);
std::vector<ConvergenceReport> read_csv(std::istream& is);

/// Aligned text with 5 significant digits.
void write_table(std::ostream& os, const std::vector<ConvergenceReport>& reports);

std::string format_sci(double v, int digits = 5);
std::string format_resolution(double r);

} // namespace subdiff
