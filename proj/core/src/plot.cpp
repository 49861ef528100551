#include "gapolyak/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gapolyak {

namespace {

struct Curve {
  std::string label;
  std::vector<double> iteration;
  std::vector<double> excess_risk;
};

Curve read_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Curve curve;
  curve.label = std::filesystem::path(path).stem().string();
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty CSV " + path);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    curve.iteration.push_back(std::stod(field));
    std::getline(ss, field, ',');
    curve.excess_risk.push_back(std::stod(field));
  }
  if (curve.iteration.empty())
    throw std::runtime_error("no data rows in " + path);
  return curve;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

void emit_plot(const std::vector<std::string>& csv_paths,
               const std::string& svg_path) {
  if (csv_paths.empty()) throw std::invalid_argument("no CSVs to plot");
  std::vector<Curve> curves;
  for (const auto& path : csv_paths) curves.push_back(read_curve(path));
  for (const auto& curve : curves)
    if (curve.iteration != curves.front().iteration)
      throw std::runtime_error("mismatched iteration grids across CSVs");

  // Log y axis; nonpositive values are floored just below the smallest
  // positive one so converged runs still draw.
  double ymin = 1e300, ymax = 1e-300;
  for (const auto& curve : curves)
    for (double v : curve.excess_risk)
      if (std::isfinite(v) && v > 0.0) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
  if (ymin > ymax) {
    ymin = 1e-1;
    ymax = 1e1;
  }
  const double floor_value = ymin / 10.0;
  const double log_min = std::floor(std::log10(floor_value));
  const double log_max = std::ceil(std::log10(ymax));
  const double xmax = std::max(curves.front().iteration.back(), 1.0);

  const double width = 720, height = 480;
  const double left = 70, right = 20, top = 20, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto xpos = [&](double it) { return left + plot_w * it / xmax; };
  auto ypos = [&](double v) {
    const double lv = std::log10(std::max(v, floor_value));
    return top + plot_h * (log_max - lv) / (log_max - log_min);
  };

  std::ofstream out(svg_path);
  if (!out) throw std::runtime_error("cannot open " + svg_path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n"
      << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // Axes and ticks.
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\""
      << left + plot_w << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  for (double e = log_min; e <= log_max + 0.5; e += 1.0) {
    const double y = ypos(std::pow(10.0, e));
    out << "<line x1=\"" << left - 4 << "\" y1=\"" << y << "\" x2=\""
        << left + plot_w << "\" y2=\"" << y
        << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\">1e" << fmt(e) << "</text>\n";
  }
  const int x_ticks = 5;
  for (int t = 0; t <= x_ticks; ++t) {
    const double it = xmax * t / x_ticks;
    out << "<text x=\"" << xpos(it) << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\">" << fmt(it) << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">iteration</text>\n"
      << "<text x=\"16\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << top + plot_h / 2 << ")\">excess risk</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& curve = curves[c];
    const char* color = kPalette[c % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curve.iteration.size(); ++i) {
      double v = curve.excess_risk[i];
      if (!std::isfinite(v)) v = std::pow(10.0, log_max);
      out << fmt(xpos(curve.iteration[i])) << ',' << fmt(ypos(v)) << ' ';
    }
    out << "\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(c);
    out << "<line x1=\"" << left + plot_w - 150 << "\" y1=\"" << ly
        << "\" x2=\"" << left + plot_w - 120 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << left + plot_w - 114 << "\" y=\"" << ly + 4 << "\">"
        << curve.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace gapolyak
