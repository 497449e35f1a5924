#pragma once

#include <string>
#include <vector>

namespace pg {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
  bool in_legend = true;
};

// Minimal dependency-free line chart: axes with ticks, legend, one polyline
// per series.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series);

}  // namespace pg
