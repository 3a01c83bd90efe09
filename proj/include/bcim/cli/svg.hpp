#pragma once

#include <string>
#include <vector>

namespace bcim::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart with a log10 y axis. Nonpositive y values are
/// dropped (they break the polyline).
[[nodiscard]] std::string svg_log_plot(const std::vector<Series>& series, const std::string& title,
                                       const std::string& x_label, const std::string& y_label);

}  // namespace bcim::cli
