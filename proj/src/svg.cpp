#include "valuecast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "valuecast/text.hpp"

namespace valuecast::svg {

namespace {

constexpr double kLabelWidth = 220;
constexpr double kPlotWidth = 480;
constexpr double kRowHeight = 22;
constexpr double kTop = 40;
constexpr double kBottom = 40;

std::string num(double x) { return text::format_fixed(x, 2); }

std::string header(double width, double height, const std::string& title) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
    << num(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  return o.str();
}

}  // namespace

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string bar_chart(const std::string& title, const std::vector<Bar>& bars,
                      const std::string& axis_label) {
  double lo = 0, hi = 0;
  for (const auto& b : bars) {
    lo = std::min(lo, b.value);
    hi = std::max(hi, b.value);
  }
  if (hi - lo <= 0) hi = lo + 1;
  const double width = kLabelWidth + kPlotWidth + 40;
  const double height = kTop + kRowHeight * static_cast<double>(bars.size()) + kBottom;
  const auto x = [&](double v) { return kLabelWidth + (v - lo) / (hi - lo) * kPlotWidth; };

  std::ostringstream o;
  o << header(width, height, title);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double y = kTop + kRowHeight * static_cast<double>(i);
    const double x0 = std::min(x(0), x(bars[i].value));
    const double w = std::abs(x(bars[i].value) - x(0));
    o << "<text x=\"" << num(kLabelWidth - 6) << "\" y=\"" << num(y + 15)
      << "\" text-anchor=\"end\">" << escape(bars[i].label) << "</text>\n";
    o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y + 4) << "\" width=\"" << num(w)
      << "\" height=\"" << num(kRowHeight - 8) << "\" fill=\"#3b75af\"/>\n";
    o << "<text x=\"" << num(std::max(x(0), x(bars[i].value)) + 4) << "\" y=\"" << num(y + 15)
      << "\" font-size=\"10\">" << text::format_fixed(bars[i].value, 3) << "</text>\n";
  }
  const double axis_y = kTop + kRowHeight * static_cast<double>(bars.size());
  o << "<line x1=\"" << num(x(0)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x(0))
    << "\" y2=\"" << num(axis_y) << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << num(kLabelWidth + kPlotWidth / 2) << "\" y=\"" << num(axis_y + 24)
    << "\" text-anchor=\"middle\">" << escape(axis_label) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

std::string dot_strip(const std::string& title, const std::vector<Strip>& strips) {
  double lo = 0, hi = 0;
  for (const auto& s : strips) {
    for (double v : s.shap) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo <= 0) hi = lo + 1;
  const double width = kLabelWidth + kPlotWidth + 40;
  const double height = kTop + kRowHeight * static_cast<double>(strips.size()) + kBottom;
  const auto x = [&](double v) { return kLabelWidth + (v - lo) / (hi - lo) * kPlotWidth; };

  std::ostringstream o;
  o << header(width, height, title);
  for (std::size_t i = 0; i < strips.size(); ++i) {
    const Strip& s = strips[i];
    const double y = kTop + kRowHeight * static_cast<double>(i) + kRowHeight / 2;
    o << "<text x=\"" << num(kLabelWidth - 6) << "\" y=\"" << num(y + 4)
      << "\" text-anchor=\"end\">" << escape(s.label) << "</text>\n";
    double flo = 0, fhi = 0;
    if (!s.feature_value.empty()) {
      flo = *std::min_element(s.feature_value.begin(), s.feature_value.end());
      fhi = *std::max_element(s.feature_value.begin(), s.feature_value.end());
    }
    for (std::size_t k = 0; k < s.shap.size(); ++k) {
      const double f = k < s.feature_value.size() && fhi > flo
                           ? (s.feature_value[k] - flo) / (fhi - flo)
                           : 0.5;
      const int red = static_cast<int>(std::lround(40 + 200 * f));
      const int blue = static_cast<int>(std::lround(240 - 200 * f));
      // Small deterministic vertical jitter so overlapping dots stay visible.
      const double jitter = (static_cast<double>(k % 7) - 3.0) * 1.5;
      o << "<circle cx=\"" << num(x(s.shap[k])) << "\" cy=\"" << num(y + jitter)
        << "\" r=\"2.5\" fill=\"rgb(" << red << ",60," << blue << ")\" fill-opacity=\"0.7\"/>\n";
    }
  }
  const double axis_y = kTop + kRowHeight * static_cast<double>(strips.size());
  o << "<line x1=\"" << num(x(0)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x(0))
    << "\" y2=\"" << num(axis_y) << "\" stroke=\"#888\"/>\n";
  o << "<text x=\"" << num(kLabelWidth + kPlotWidth / 2) << "\" y=\"" << num(axis_y + 24)
    << "\" text-anchor=\"middle\">SHAP value (impact on predicted value, kEUR)</text>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace valuecast::svg
