#pragma once

#include <string>
#include <vector>

// Minimal SVG writers for the report plots. Output depends only on the
// inputs, with coordinates printed to two decimals.
namespace valuecast::svg {

struct Bar {
  std::string label;
  double value = 0;
};

// Horizontal bars, one per entry, in the given order. Negative values extend
// left of the axis.
std::string bar_chart(const std::string& title, const std::vector<Bar>& bars,
                      const std::string& axis_label);

struct Strip {
  std::string label;
  std::vector<double> shap;           // x position of each dot
  std::vector<double> feature_value;  // colour, rescaled per strip
};

// One row of dots per feature: x is the attribution, colour runs from blue
// (low feature value) to red (high).
std::string dot_strip(const std::string& title, const std::vector<Strip>& strips);

std::string escape(const std::string& s);

}  // namespace valuecast::svg
