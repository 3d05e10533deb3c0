#include "kg/format.hpp"

#include <cmath>
#include <cstdio>

namespace kg {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_scientific(double x, int significant) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*e", significant - 1, x);
  return buf;
}

std::string format_compact(double x, int significant) {
  std::string s = format_scientific(x, significant);
  const auto e = s.find('e');
  if (e == std::string::npos) return s;
  std::string mantissa = s.substr(0, e);
  const std::string exponent = s.substr(e);
  if (mantissa.find('.') != std::string::npos) {
    while (!mantissa.empty() && mantissa.back() == '0') mantissa.pop_back();
    if (!mantissa.empty() && mantissa.back() == '.') mantissa.pop_back();
  }
  return mantissa + exponent;
}

}  // namespace kg
