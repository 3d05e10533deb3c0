#pragma once

#include <string>

namespace kg {

/// 17 significant digits; round-trips every finite double.
std::string format_real(double x);

/// Scientific notation with `significant` digits, e.g. 5.0037e-04.
std::string format_scientific(double x, int significant = 5);

/// Scientific notation with trailing mantissa zeros dropped: 1e-03, 6.6667e-03.
std::string format_compact(double x, int significant = 5);

}  // namespace kg
