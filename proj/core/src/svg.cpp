#include "imcorrect/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "imcorrect/errors.hpp"

namespace imc {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 60;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void write_line_chart_svg(const std::filesystem::path& path,
                          const std::string& title,
                          const std::string& x_label,
                          const std::string& y_label,
                          std::span<const SvgSeries> series) {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const SvgSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      } else {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  // A little headroom keeps curves off the frame.
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto sx = [&](double x) {
    return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w;
  };
  const auto sy = [&](double y) {
    return kMarginTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h;
  };

  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-size=\"16\">" << title << "</text>\n";

  // Frame and grid ticks.
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop
      << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  const int ticks = 5;
  for (int t = 0; t <= ticks; ++t) {
    const double fx = x_min + (x_max - x_min) * t / ticks;
    const double fy = y_min + (y_max - y_min) * t / ticks;
    out << "<line x1=\"" << sx(fx) << "\" y1=\"" << kMarginTop + plot_h
        << "\" x2=\"" << sx(fx) << "\" y2=\"" << kMarginTop + plot_h + 5
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << sx(fx) << "\" y=\"" << kMarginTop + plot_h + 20
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(fx)
        << "</text>\n";
    out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << sy(fy)
        << "\" x2=\"" << kMarginLeft << "\" y2=\"" << sy(fy)
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << kMarginLeft - 9 << "\" y=\"" << sy(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\""
      << kHeight - 15 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << kMarginTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

  // Series polylines with point markers.
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts = series[s].points;
    std::sort(pts.begin(), pts.end());
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : pts) {
      out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    // Legend entry.
    const double ly = kMarginTop + 16.0 * static_cast<double>(s);
    out << "<line x1=\"" << kMarginLeft + plot_w + 12 << "\" y1=\"" << ly
        << "\" x2=\"" << kMarginLeft + plot_w + 34 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kMarginLeft + plot_w + 40 << "\" y=\"" << ly + 4
        << "\" font-size=\"12\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace imc
