#include "floqspin/cli/records.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "floqspin/optimize.hpp"

namespace floqspin::cli {

const std::vector<std::string>& record_header() {
  static const std::vector<std::string> h = {"polarization", "E_over_D",  "B_F_mT",    "level",     "energy_ueV",
                                             "grad_x",       "grad_y",    "grad_z",    "Bs_x_mT",   "Bs_y_mT",
                                             "Bs_z_mT",      "smfs_1e-2", "smfs_1e-3", "smfs_1e-9", "method"};
  return h;
}

void set_smfs_flags(SweepRecord& r) {
  const double mag = r.gradient.norm();
  for (std::size_t c = 0; c < kSmfsCutoffs.size(); ++c) r.smfs[c] = std::isfinite(mag) && mag < kSmfsCutoffs[c];
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0 into 0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
  out << '\n';
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_records(std::ostream& out, const std::vector<SweepRecord>& records) {
  write_row(out, record_header());
  for (const auto& r : records) {
    write_row(out, {r.polarization, format_value(r.E_over_D), format_value(r.B_F), std::to_string(r.level),
                    format_value(r.energy), format_value(r.gradient.x()), format_value(r.gradient.y()),
                    format_value(r.gradient.z()), format_value(r.Bs.x()), format_value(r.Bs.y()),
                    format_value(r.Bs.z()), r.smfs[0] ? "1" : "0", r.smfs[1] ? "1" : "0", r.smfs[2] ? "1" : "0",
                    r.method});
  }
}

void write_records(const std::filesystem::path& path, const std::vector<SweepRecord>& records) {
  auto out = open_out(path);
  write_records(out, records);
}

void write_table(const std::filesystem::path& path, const Table& table) {
  auto out = open_out(path);
  write_row(out, table.header);
  for (const auto& row : table.rows) write_row(out, row);
}

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  CsvData data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (data.header.empty()) {
      data.header = std::move(cells);
      continue;
    }
    if (cells.size() != data.header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(data.header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    data.rows.push_back(std::move(cells));
  }
  if (data.header.empty()) throw std::runtime_error("'" + path.string() + "' is empty");
  return data;
}

}  // namespace floqspin::cli
