// angles.hpp
// Angle wrapping on the circle and small helpers shared by every module.

#pragma once

#include <cmath>
#include <numbers>

namespace phasematch {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Maps any angle into (-pi, pi]. Both -pi and pi land on +pi.
inline double wrap_angle(double x) noexcept {
    double r = std::remainder(x, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

// Shortest distance between two angles on the circle, in [0, pi].
inline double angular_distance(double a, double b) noexcept {
    return std::abs(wrap_angle(a - b));
}

// Round half away from zero to `digits` decimals (matches MATLAB round(x, d)).
inline double round_to(double x, int digits) noexcept {
    const double scale = std::pow(10.0, digits);
    return std::round(x * scale) / scale;
}

} // namespace phasematch
