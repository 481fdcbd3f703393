#include "advrisk/extended_real.hpp"

#include <cmath>
#include <cstdio>

#include "advrisk/errors.hpp"

namespace advrisk {

ExtendedReal::ExtendedReal(double v) : v_(v) {
  if (std::isnan(v)) throw DomainError("ExtendedReal: NaN is not an extended real");
}

ExtendedReal::Tag ExtendedReal::tag() const {
  if (v_ == std::numeric_limits<double>::infinity()) return Tag::pos_inf;
  if (v_ == -std::numeric_limits<double>::infinity()) return Tag::neg_inf;
  return Tag::finite;
}

std::string ExtendedReal::to_string() const {
  switch (tag()) {
    case Tag::pos_inf: return "inf";
    case Tag::neg_inf: return "-inf";
    case Tag::finite: break;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v_);
  return buf;
}

}  // namespace advrisk
