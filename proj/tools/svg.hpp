#pragma once

#include <string>
#include <utility>
#include <vector>

namespace advrisk::cli::svg {

/// A minimal line plot: polylines, shaded vertical bands, axes and labels.
/// Non-finite points break a polyline; y values are clipped to the y range.
class Plot {
 public:
  Plot(double x_lo, double x_hi, double y_lo, double y_hi, int width = 640, int height = 400);

  void title(std::string t) { title_ = std::move(t); }
  void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& color, const std::string& label,
                double stroke_width = 1.5, bool dashed = false);
  void band(double x_from, double x_to, const std::string& color, double opacity = 0.2);
  /// Extra text placed in a <metadata> element (the config hash goes here).
  void metadata(std::string m) { metadata_ = std::move(m); }

  std::string render() const;

 private:
  double px(double x) const;
  double py(double y) const;

  double x_lo_, x_hi_, y_lo_, y_hi_;
  int width_, height_;
  std::string title_, metadata_;
  std::vector<std::string> bands_, lines_;
  std::vector<std::pair<std::string, std::string>> legend_;  // (color, label)
};

}  // namespace advrisk::cli::svg
