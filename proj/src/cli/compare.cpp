#include "floqspin/cli/compare.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "floqspin/floquet.hpp"

namespace floqspin::cli {

namespace {

const std::vector<std::string> kKeyColumns = {"polarization", "E_over_D", "B_F_mT", "level"};

bool parse_cell(const std::string& s, double& v) {
  if (s == "nan" || s == "-nan") {
    v = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  if (s == "inf" || s == "-inf") {
    v = s[0] == '-' ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    return true;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

double cell_deviation(const std::string& a, const std::string& b) {
  double x = 0.0, y = 0.0;
  const bool nx = parse_cell(a, x), ny = parse_cell(b, y);
  if (!nx || !ny) return a == b ? 0.0 : std::numeric_limits<double>::infinity();
  if (std::isnan(x) && std::isnan(y)) return 0.0;
  if (std::isnan(x) || std::isnan(y)) return std::numeric_limits<double>::infinity();
  if (x == y) return 0.0;
  return std::abs(x - y);
}

std::ptrdiff_t column_index(const CsvData& d, const std::string& name) {
  const auto it = std::find(d.header.begin(), d.header.end(), name);
  return it == d.header.end() ? -1 : it - d.header.begin();
}

bool numeric_column(const CsvData& d, std::size_t col) {
  double v = 0.0;
  for (const auto& row : d.rows) {
    if (!parse_cell(row[col], v)) return false;
  }
  return true;
}

/// Folds and sorts energy_ueV within each key group (level ignored); returns a reordered copy.
CsvData folded(const CsvData& d, double w) {
  const auto e = column_index(d, "energy_ueV");
  if (e < 0) throw SchemaMismatch("fold requested but no energy_ueV column");
  CsvData out = d;
  for (auto& row : out.rows) {
    double v = 0.0;
    if (parse_cell(row[static_cast<std::size_t>(e)], v) && std::isfinite(v)) {
      row[static_cast<std::size_t>(e)] = format_value(fold_quasienergy(v, w));
    }
  }
  std::vector<std::size_t> keys;
  for (const char* k : {"polarization", "E_over_D", "B_F_mT"}) {
    const auto i = column_index(d, k);
    if (i >= 0) keys.push_back(static_cast<std::size_t>(i));
  }
  auto same_group = [&](const auto& a, const auto& b) {
    return std::all_of(keys.begin(), keys.end(), [&](auto k) { return a[k] == b[k]; });
  };
  auto energy = [&](const auto& row) {
    double v = 0.0;
    parse_cell(row[static_cast<std::size_t>(e)], v);
    return v;
  };
  for (auto first = out.rows.begin(); first != out.rows.end();) {
    auto last = std::find_if_not(first, out.rows.end(), [&](const auto& r) { return same_group(r, *first); });
    std::stable_sort(first, last, [&](const auto& a, const auto& b) { return energy(a) < energy(b); });
    first = last;
  }
  return out;
}

}  // namespace

bool CompareReport::within_tolerance() const {
  return std::all_of(columns.begin(), columns.end(), [&](const auto& c) { return c.max_abs <= tolerance; });
}

CompareReport compare_tables(const CsvData& a_in, const CsvData& b_in, const CompareOptions& options) {
  if (a_in.header != b_in.header) throw SchemaMismatch("headers differ");
  if (a_in.rows.size() != b_in.rows.size()) {
    throw SchemaMismatch("row counts differ (" + std::to_string(a_in.rows.size()) + " vs " +
                         std::to_string(b_in.rows.size()) + ")");
  }
  // Groups are contiguous in runner output, so folding sorts each run of equal keys.
  const CsvData a = options.fold_ueV ? folded(a_in, *options.fold_ueV) : a_in;
  const CsvData b = options.fold_ueV ? folded(b_in, *options.fold_ueV) : b_in;

  std::vector<std::size_t> keys;
  for (const auto& k : kKeyColumns) {
    if (options.fold_ueV && k == "level") continue;
    const auto i = column_index(a, k);
    if (i >= 0) keys.push_back(static_cast<std::size_t>(i));
  }
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    for (auto k : keys) {
      if (cell_deviation(a.rows[r][k], b.rows[r][k]) > 1e-9) {
        throw SchemaMismatch("key column '" + a.header[k] + "' differs at data row " + std::to_string(r + 1));
      }
    }
  }

  std::vector<std::size_t> cols;
  if (options.columns.empty()) {
    for (std::size_t c = 0; c < a.header.size(); ++c) {
      const bool is_key = std::find(kKeyColumns.begin(), kKeyColumns.end(), a.header[c]) != kKeyColumns.end();
      if (!is_key && numeric_column(a, c) && numeric_column(b, c)) cols.push_back(c);
    }
  } else {
    for (const auto& name : options.columns) {
      const auto i = column_index(a, name);
      if (i < 0) throw SchemaMismatch("no column named '" + name + "'");
      cols.push_back(static_cast<std::size_t>(i));
    }
  }

  CompareReport report;
  report.tolerance = options.tolerance;
  for (auto c : cols) {
    ColumnDeviation d{a.header[c], 0.0, 0};
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      const double dev = cell_deviation(a.rows[r][c], b.rows[r][c]);
      if (dev > d.max_abs) {
        d.max_abs = dev;
        d.worst_row = r;
      }
    }
    report.columns.push_back(d);
  }
  return report;
}

CompareReport compare_files(const std::filesystem::path& a, const std::filesystem::path& b,
                            const CompareOptions& options) {
  return compare_tables(read_csv(a), read_csv(b), options);
}

std::string format_report(const CompareReport& r) {
  std::ostringstream s;
  s << "column,max_abs_deviation,worst_row,status\n";
  for (const auto& c : r.columns) {
    s << c.column << ',' << format_value(c.max_abs) << ',' << c.worst_row + 1 << ','
      << (c.max_abs <= r.tolerance ? "ok" : "FAIL") << '\n';
  }
  s << "tolerance " << format_value(r.tolerance) << ": " << (r.within_tolerance() ? "within" : "exceeded") << '\n';
  return s.str();
}

}  // namespace floqspin::cli
