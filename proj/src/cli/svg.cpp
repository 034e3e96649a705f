#include "floqspin/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace floqspin::cli {

namespace {

constexpr double kPanelW = 320.0;
constexpr double kPanelH = 240.0;
constexpr double kMarginL = 58.0;
constexpr double kMarginR = 12.0;
constexpr double kMarginT = 28.0;
constexpr double kMarginB = 40.0;
constexpr double kTitleH = 30.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void render_panel(std::ostringstream& s, const Panel& p, double ox, double oy) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& ser : p.series) {
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      xlo = std::min(xlo, ser.x[i]);
      xhi = std::max(xhi, ser.x[i]);
      ylo = std::min(ylo, ser.y[i]);
      yhi = std::max(yhi, ser.y[i]);
    }
  }
  if (!std::isfinite(xlo)) {
    xlo = 0.0;
    xhi = 1.0;
    ylo = 0.0;
    yhi = 1.0;
  }
  if (xhi - xlo < 1e-12) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (yhi - ylo < 1e-9 * std::max(1.0, std::abs(yhi))) {
    const double pad = std::max(0.5, 0.05 * std::abs(yhi));
    ylo -= pad;
    yhi += pad;
  } else {
    const double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }
  const double x0 = ox + kMarginL, x1 = ox + kPanelW - kMarginR;
  const double y0 = oy + kPanelH - kMarginB, y1 = oy + kMarginT;
  auto px = [&](double x) { return x0 + (x - xlo) / (xhi - xlo) * (x1 - x0); };
  auto py = [&](double y) { return y0 + (y - ylo) / (yhi - ylo) * (y1 - y0); };

  s << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
    << num(y0 - y1) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (double t : nice_ticks(xlo, xhi)) {
    s << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px(t)) << "\" y2=\"" << num(y0 + 4)
      << "\" stroke=\"#333\"/><text x=\"" << num(px(t)) << "\" y=\"" << num(y0 + 15)
      << "\" font-size=\"10\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(ylo, yhi)) {
    s << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(py(t))
      << "\" stroke=\"#333\"/><text x=\"" << num(x0 - 6) << "\" y=\"" << num(py(t) + 3)
      << "\" font-size=\"10\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  s << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"" << num(oy + 18)
    << "\" font-size=\"12\" text-anchor=\"middle\" font-weight=\"bold\">" << esc(p.title) << "</text>\n";
  s << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"" << num(oy + kPanelH - 8)
    << "\" font-size=\"11\" text-anchor=\"middle\">" << esc(p.x_label) << "</text>\n";
  const double ly = 0.5 * (y0 + y1);
  s << "<text x=\"" << num(ox + 14) << "\" y=\"" << num(ly) << "\" font-size=\"11\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 " << num(ox + 14) << " " << num(ly) << ")\">" << esc(p.y_label) << "</text>\n";

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& ser = p.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
        points.clear();
      }
    };
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) {
        flush();
        continue;
      }
      points += num(px(ser.x[i])) + "," + num(py(ser.y[i])) + " ";
    }
    flush();
    if (!ser.label.empty()) {
      const double ky = y1 + 12.0 + 12.0 * static_cast<double>(k);
      s << "<line x1=\"" << num(x1 - 60) << "\" y1=\"" << num(ky - 3) << "\" x2=\"" << num(x1 - 46) << "\" y2=\""
        << num(ky - 3) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/><text x=\"" << num(x1 - 42)
        << "\" y=\"" << num(ky) << "\" font-size=\"9\">" << esc(ser.label) << "</text>\n";
    }
  }
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  std::vector<double> out;
  if (!(hi > lo) || target < 1) return out;
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(t);
  return out;
}

std::string render_svg(const Figure& fig) {
  const int cols = std::max(1, std::min<int>(fig.columns, static_cast<int>(std::max<std::size_t>(1, fig.panels.size()))));
  const int rows = static_cast<int>((fig.panels.size() + cols - 1) / cols);
  const double width = cols * kPanelW;
  const double height = kTitleH + std::max(1, rows) * kPanelH;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
    << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\" font-family=\"sans-serif\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << num(width / 2) << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" << esc(fig.title)
    << "</text>\n";
  for (std::size_t i = 0; i < fig.panels.size(); ++i) {
    const double ox = static_cast<double>(static_cast<int>(i) % cols) * kPanelW;
    const double oy = kTitleH + static_cast<double>(static_cast<int>(i) / cols) * kPanelH;
    render_panel(s, fig.panels[i], ox, oy);
  }
  s << "</svg>\n";
  return s.str();
}

void write_svg(const std::filesystem::path& path, const Figure& fig) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << render_svg(fig);
}

}  // namespace floqspin::cli
