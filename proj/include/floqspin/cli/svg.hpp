#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace floqspin::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

struct Figure {
  std::string title;
  int columns = 3;
  std::vector<Panel> panels;
};

/// Static line plot, one panel per grid cell. Non-finite points break the polyline.
std::string render_svg(const Figure& fig);
void write_svg(const std::filesystem::path& path, const Figure& fig);

/// Roughly `target` round tick positions covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

}  // namespace floqspin::cli
