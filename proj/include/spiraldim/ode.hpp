#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "spiraldim/error.hpp"

namespace spiraldim::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Tolerances {
  double rel = 1e-8;
  double abs = 1e-10;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// What the observer decides about a step that already met the error test.
enum class Verdict { kAccept, kReject, kStop };

/// Embedded Dormand-Prince 5(4) integration of y' = f(t, y) from t0 toward t1
/// (t1 may be below t0).
///
/// Each step must satisfy the mixed error test
///   rms(err_i / (abs + rel * max(|y_i|, |y_new_i|))) <= 1
/// and |h| <= cap(t, y). A step that passes is offered to observe(t, y); a
/// kReject answer halves the step and retries, which lets callers enforce
/// geometric constraints such as a chord bound on the emitted samples.
/// Throws StiffnessError when the step size underflows.
template <std::size_t N, class F, class Cap, class Observe>
Stats integrate_dopri5(F&& f, double t0, State<N> y, double t1, Tolerances tol, Cap&& cap,
                       Observe&& observe) {
  require(tol.rel > 0.0 && tol.abs > 0.0, "tolerances must be positive");
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Stats stats;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double t = t0;
  State<N> k1 = f(t, y), k2, k3, k4, k5, k6, k7, tmp, ynew;
  ++stats.evaluations;

  auto norm = [](const State<N>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(N));
  };
  double h;
  {
    const double d0 = norm(y), d1 = norm(k1);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, std::abs(t1 - t0), cap(t, y)});
  }

  while (dir * (t1 - t) > 0.0) {
    h = std::min({h, cap(t, y), std::abs(t1 - t)});
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw StiffnessError("step size underflow at t=" + std::to_string(t));
    const double hs = dir * h;

    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    k2 = f(t + c2 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                            a65 * k5[i]);
    k6 = f(t + hs, tmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const double tnew = (std::abs(t1 - t) <= h) ? t1 : t + hs;
    k7 = f(tnew, ynew);
    stats.evaluations += 6;

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                             e6 * k6[i] + e7 * k7[i]);
      const double sc = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(N));
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();

    if (err > 1.0) {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }
    const Verdict v = observe(tnew, ynew);
    if (v == Verdict::kReject) {
      ++stats.rejected;
      h *= 0.5;
      continue;
    }
    ++stats.accepted;
    t = tnew;
    y = ynew;
    k1 = k7;
    if (v == Verdict::kStop) break;
    const double grow = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    h *= grow;
  }
  return stats;
}

}  // namespace spiraldim::ode
