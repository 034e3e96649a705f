#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "floqspin/types.hpp"

namespace floqspin::cli {

/// One row of the canonical CSV: one level at one configuration point.
struct SweepRecord {
  std::string polarization;
  double E_over_D = 0.0;
  double B_F = 0.0;  // mT
  int level = 0;
  double energy = 0.0;  // ueV
  Vec3 gradient = Vec3::Zero();  // ueV / mT
  Vec3 Bs = Vec3::Zero();        // mT
  std::array<bool, 3> smfs{};    // |gradient| below 1e-2, 1e-3, 1e-9
  std::string method;
};

const std::vector<std::string>& record_header();

/// Fills smfs flags from the gradient magnitude; NaN gradients give false.
void set_smfs_flags(SweepRecord& r);

/// 12 significant digits; "nan"/"inf" spelled out.
std::string format_value(double v);

void write_records(std::ostream& out, const std::vector<SweepRecord>& records);
void write_records(const std::filesystem::path& path, const std::vector<SweepRecord>& records);

/// Auxiliary per-point table (mode-specific diagnostics). Cells are preformatted.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_table(const std::filesystem::path& path, const Table& table);

/// Parsed CSV: header plus string cells.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Throws std::runtime_error on unreadable files or ragged rows.
CsvData read_csv(const std::filesystem::path& path);

}  // namespace floqspin::cli
