#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "spiraldim/curve.hpp"

namespace testing {

inline spiraldim::Curve segment(double x0, double y0, double x1, double y1, std::size_t n) {
  std::vector<double> t(n), xy(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    t[i] = s;
    xy[2 * i] = x0 + s * (x1 - x0);
    xy[2 * i + 1] = y0 + s * (y1 - y0);
  }
  return spiraldim::Curve::with_measured_chord(2, std::move(t), std::move(xy), {"segment", {}});
}

inline spiraldim::Curve circle(double radius, std::size_t n, double turns = 1.0) {
  std::vector<double> t(n), xy(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * turns * static_cast<double>(i) / static_cast<double>(n - 1);
    t[i] = a;
    xy[2 * i] = radius * std::cos(a);
    xy[2 * i + 1] = radius * std::sin(a);
  }
  return spiraldim::Curve::with_measured_chord(2, std::move(t), std::move(xy), {"circle", {}});
}

inline spiraldim::Curve single_point(double x, double y) {
  return spiraldim::Curve::with_measured_chord(2, {0.0, 1.0}, {x, y, x, y}, {"point", {}});
}

}  // namespace testing
