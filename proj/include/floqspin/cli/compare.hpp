#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "floqspin/cli/records.hpp"

namespace floqspin::cli {

/// Headers differ, row counts differ, or the key columns do not line up.
class SchemaMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompareOptions {
  double tolerance = 1e-8;
  std::vector<std::string> columns;  // empty: every numeric non-key column
  /// When set, energy_ueV is folded into (-W/2, W/2] and sorted within each
  /// (polarization, E_over_D, B_F_mT) group before comparison; level labels are then ignored.
  std::optional<double> fold_ueV;
};

struct ColumnDeviation {
  std::string column;
  double max_abs = 0.0;
  std::size_t worst_row = 0;  // 0-based data row
};

struct CompareReport {
  std::vector<ColumnDeviation> columns;
  double tolerance = 0.0;
  bool within_tolerance() const;
};

/// Key columns: polarization, E_over_D, B_F_mT, level. NaN == NaN counts as zero deviation; a NaN
/// against a number counts as infinite.
CompareReport compare_tables(const CsvData& a, const CsvData& b, const CompareOptions& options = {});
CompareReport compare_files(const std::filesystem::path& a, const std::filesystem::path& b,
                            const CompareOptions& options = {});

std::string format_report(const CompareReport& r);

}  // namespace floqspin::cli
