#include "pg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pg {

namespace {

constexpr int kWidth = 880;
constexpr int kHeight = 540;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kPalette[] = {"#2b6cb0", "#dd6b20", "#2f855a", "#b83280",
                          "#6b46c1", "#c53030", "#4a5568", "#975a16"};

// Round the raw range out to a tick-friendly interval.
double nice_step(double span) {
  if (span <= 0.0) return 1.0;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  if (r < 1.5) return mag;
  if (r < 3.5) return 2.0 * mag;
  if (r < 7.5) return 5.0 * mag;
  return 10.0 * mag;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series) {
  if (series.empty()) throw std::invalid_argument("write_svg_chart: no series");

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) {
      throw std::invalid_argument("write_svg_chart: x/y size mismatch");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin) || !std::isfinite(ymin)) {
    throw std::invalid_argument("write_svg_chart: no finite points");
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_svg_chart: cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // gridlines + ticks
  const double xstep = nice_step(xmax - xmin);
  const double ystep = nice_step(ymax - ymin);
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + 1e-9 * xstep; x += xstep) {
    out << "<line x1=\"" << sx(x) << "\" y1=\"" << kMarginTop << "\" x2=\"" << sx(x)
        << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"#e2e8f0\"/>\n";
    out << "<text x=\"" << sx(x) << "\" y=\"" << kMarginTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  for (double y = std::ceil(ymin / ystep) * ystep; y <= ymax + 1e-9 * ystep; y += ystep) {
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << sy(y) << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << sy(y) << "\" stroke=\"#e2e8f0\"/>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << sy(y) + 4
        << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
  }
  out << "</g>\n";

  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " << kMarginTop + plot_h / 2 << ")\">"
      << y_label << "</text>\n";

  int color_idx = 0;
  double legend_y = kMarginTop + 10;
  for (const auto& s : series) {
    const char* color = kPalette[color_idx % 8];
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << " points=\"" << pts.str() << "\"/>\n";
    if (s.in_legend) {
      const double lx = kWidth - kMarginRight + 14;
      out << "<line x1=\"" << lx << "\" y1=\"" << legend_y << "\" x2=\"" << lx + 24
          << "\" y2=\"" << legend_y << "\" stroke=\"" << color << "\" stroke-width=\"2\"";
      if (s.dashed) out << " stroke-dasharray=\"6 4\"";
      out << "/>\n";
      out << "<text x=\"" << lx + 30 << "\" y=\"" << legend_y + 4
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
          << "</text>\n";
      legend_y += 18;
    }
    ++color_idx;
  }
  out << "</svg>\n";
  if (!out.good()) throw std::runtime_error("write_svg_chart: write failed");
}

}  // namespace pg
