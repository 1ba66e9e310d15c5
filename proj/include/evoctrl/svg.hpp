#pragma once

#include "evoctrl/linops.hpp"

#include <string>
#include <vector>

namespace evoctrl {

struct Series {
  std::string label;
  Vec x, y;
};

/// Line plot with shared axes and a legend.
void svg_line_plot(const std::string &path, const std::string &title,
                   const std::vector<Series> &series);

/// Color map of a matrix: rows along the vertical axis, columns along the
/// horizontal one.
void svg_heatmap(const std::string &path, const std::string &title, const Dense &values);

} // namespace evoctrl
