#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace advrisk::cli::svg {

namespace {

constexpr double kLeft = 56, kRight = 16, kTop = 32, kBottom = 40;

std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

Plot::Plot(double x_lo, double x_hi, double y_lo, double y_hi, int width, int height)
    : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi), width_(width), height_(height) {
  if (!(x_hi_ > x_lo_)) x_hi_ = x_lo_ + 1.0;
  if (!(y_hi_ > y_lo_)) y_hi_ = y_lo_ + 1.0;
}

double Plot::px(double x) const { return kLeft + (x - x_lo_) / (x_hi_ - x_lo_) * (width_ - kLeft - kRight); }
double Plot::py(double y) const {
  y = std::clamp(y, y_lo_, y_hi_);
  return height_ - kBottom - (y - y_lo_) / (y_hi_ - y_lo_) * (height_ - kTop - kBottom);
}

void Plot::polyline(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& color, const std::string& label,
                    double stroke_width, bool dashed) {
  std::string pts;
  auto emit = [&] {
    if (pts.empty()) return;
    lines_.push_back("<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + f3(stroke_width) + "\"" +
                     (dashed ? " stroke-dasharray=\"6 4\"" : "") + " points=\"" + pts + "\"/>");
    pts.clear();
  };
  const std::size_t n = std::min(xs.size(), ys.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(xs[i]) || std::isnan(ys[i])) {
      emit();
      continue;
    }
    if (!pts.empty()) pts += ' ';
    pts += f3(px(xs[i])) + "," + f3(py(ys[i]));
  }
  emit();
  if (!label.empty()) legend_.emplace_back(color, label);
}

void Plot::band(double x_from, double x_to, const std::string& color, double opacity) {
  const double a = px(std::max(x_from, x_lo_)), b = px(std::min(x_to, x_hi_));
  if (!(b > a)) return;
  bands_.push_back("<rect x=\"" + f3(a) + "\" y=\"" + f3(kTop) + "\" width=\"" + f3(b - a) + "\" height=\"" + f3(height_ - kTop - kBottom) +
                   "\" fill=\"" + color + "\" fill-opacity=\"" + f3(opacity) + "\"/>");
}

std::string Plot::render() const {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
                  "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  if (!metadata_.empty()) s += "<metadata>" + escape(metadata_) + "</metadata>\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& b : bands_) s += b + "\n";
  const double x0 = px(x_lo_), x1 = px(x_hi_), y0 = py(y_lo_), y1 = py(y_hi_);
  s += "<rect x=\"" + f3(x0) + "\" y=\"" + f3(y1) + "\" width=\"" + f3(x1 - x0) + "\" height=\"" + f3(y0 - y1) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo_ + (x_hi_ - x_lo_) * i / 4.0, yv = y_lo_ + (y_hi_ - y_lo_) * i / 4.0;
    s += "<text x=\"" + f3(px(xv)) + "\" y=\"" + f3(y0 + 16) + "\" text-anchor=\"middle\">" + tick(xv) + "</text>\n";
    s += "<text x=\"" + f3(x0 - 6) + "\" y=\"" + f3(py(yv) + 4) + "\" text-anchor=\"end\">" + tick(yv) + "</text>\n";
  }
  for (const auto& l : lines_) s += l + "\n";
  if (!title_.empty()) s += "<text x=\"" + f3(kLeft) + "\" y=\"20\" font-size=\"13\">" + escape(title_) + "</text>\n";
  double ly = kTop + 14;
  for (const auto& [color, label] : legend_) {
    s += "<line x1=\"" + f3(x1 - 150) + "\" y1=\"" + f3(ly - 4) + "\" x2=\"" + f3(x1 - 130) + "\" y2=\"" + f3(ly - 4) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + f3(x1 - 125) + "\" y=\"" + f3(ly) + "\">" + escape(label) + "</text>\n";
    ly += 15;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace advrisk::cli::svg
