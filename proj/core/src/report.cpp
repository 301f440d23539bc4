#include "subdiff/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "subdiff/error.hpp"

namespace subdiff {

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string clean(std::string s) {
  for (char& c : s)
    if (c == ',' || c == ';' || c == '\n' || c == '=') c = ' ';
  return s;
}

std::string clean_label(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ' ';
  return s;
}

} // namespace

void ConvergenceReport::compute_rates() {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rate.reset();
    if (i == 0) continue;
    const double ratio = rows[i - 1].resolution / rows[i].resolution;
    if (std::abs(ratio - 2.0) < 1e-9 && rows[i].error > 0.0 && rows[i - 1].error > 0.0)
      rows[i].rate = std::log2(rows[i - 1].error / rows[i].error);
  }
}

std::string format_sci(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return buf;
}

std::string format_resolution(double r) {
  if (r > 0.0) {
    const double inv = 1.0 / r;
    if (std::abs(inv - std::round(inv)) < 1e-9 * inv) {
      const long n = std::lround(inv);
      return n == 1 ? "1" : "1/" + std::to_string(n);
    }
  }
  std::ostringstream os;
  os << r;
  return os.str();
}

void write_csv(std::ostream& os, const std::vector<ConvergenceReport>& reports) {
  os << "block,resolution,N,M,error,rate,seconds,metadata\n";
  for (const auto& rep : reports) {
    std::string meta;
    for (const auto& [k, v] : rep.metadata) {
      if (!meta.empty()) meta += ';';
      meta += clean(k) + '=' + clean(v);
    }
    for (const auto& r : rep.rows) {
      os << clean_label(rep.label) << ',' << full(r.resolution) << ',' << r.N << ',' << r.M << ','
         << full(r.error) << ',' << (r.rate ? full(*r.rate) : "") << ',' << full(r.seconds)
         << ',' << meta << '\n';
    }
  }
}

std::vector<ConvergenceReport> read_csv(std::istream& is) {
  std::vector<ConvergenceReport> out;
  std::string line;
  if (!std::getline(is, line) || line.rfind("block,", 0) != 0)
    throw ParameterError("not a convergence CSV (missing header)");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8)
      throw ParameterError("malformed CSV line " + std::to_string(lineno));
    if (out.empty() || out.back().label != f[0]) {
      ConvergenceReport rep;
      rep.label = f[0];
      if (!f[7].empty())
        for (const auto& kv : split(f[7], ';')) {
          const auto eq = kv.find('=');
          if (eq != std::string::npos) rep.metadata[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
      out.push_back(std::move(rep));
    }
    ReportRow r;
    r.resolution = std::stod(f[1]);
    r.N = std::stoi(f[2]);
    r.M = std::stoi(f[3]);
    r.error = std::stod(f[4]);
    if (!f[5].empty()) r.rate = std::stod(f[5]);
    r.seconds = std::stod(f[6]);
    out.back().rows.push_back(r);
  }
  return out;
}

void write_table(std::ostream& os, const std::vector<ConvergenceReport>& reports) {
  for (const auto& rep : reports) {
    os << rep.label << '\n';
    os << "  " << std::left << std::setw(10) << "step" << std::setw(7) << "N" << std::setw(7)
       << "M" << std::setw(13) << "error" << std::setw(7) << "rate"
       << "seconds\n";
    for (const auto& r : rep.rows) {
      char rate[16] = "";
      if (r.rate) std::snprintf(rate, sizeof rate, "%.2f", *r.rate);
      char secs[24];
      std::snprintf(secs, sizeof secs, "%.4f", r.seconds);
      os << "  " << std::setw(10) << format_resolution(r.resolution) << std::setw(7) << r.N
         << std::setw(7) << r.M << std::setw(13) << format_sci(r.error) << std::setw(7) << rate
         << secs << '\n';
    }
  }
  os << std::right;
}

} // namespace subdiff
