#pragma once

#include <compare>
#include <limits>
#include <string>

namespace advrisk {

/// A point of [-inf, +inf]. Stored as an IEEE double so that infinities
/// order and negate correctly; NaN is rejected at construction.
class ExtendedReal {
 public:
  enum class Tag { neg_inf, finite, pos_inf };

  constexpr ExtendedReal() = default;
  explicit ExtendedReal(double v);

  static constexpr ExtendedReal pos_inf() { return ExtendedReal(Raw{}, std::numeric_limits<double>::infinity()); }
  static constexpr ExtendedReal neg_inf() { return ExtendedReal(Raw{}, -std::numeric_limits<double>::infinity()); }

  Tag tag() const;
  bool is_finite() const { return tag() == Tag::finite; }
  double value() const { return v_; }

  ExtendedReal operator-() const { return ExtendedReal(Raw{}, -v_); }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) { return a.v_ == b.v_; }
  friend std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) { return a.v_ <=> b.v_; }

  std::string to_string() const;

 private:
  struct Raw {};
  constexpr ExtendedReal(Raw, double v) : v_(v) {}
  double v_ = 0.0;
};

}  // namespace advrisk
