#pragma once

#include <string>
#include <vector>

namespace rfio {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct Plot {
  std::string name;
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  std::vector<Series> series;
};

// Self-contained SVG line chart; non-positive values are skipped on log axes.
std::string svg_render(const Plot& p);
void svg_write(const std::string& path, const Plot& p);

}  // namespace rfio
