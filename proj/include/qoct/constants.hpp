#pragma once

namespace qoct {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace qoct
