#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace imc {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

// Minimal line chart (axes, ticks, legend) for recall-vs-fraction curves.
void write_line_chart_svg(const std::filesystem::path& path,
                          const std::string& title,
                          const std::string& x_label,
                          const std::string& y_label,
                          std::span<const SvgSeries> series);

}  // namespace imc
