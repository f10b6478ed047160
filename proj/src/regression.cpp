#include "spiraldim/regression.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "spiraldim/error.hpp"

namespace spiraldim::regression {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "fit_line: x and y differ in length");
  require(x.size() >= 3, "fit_line: need at least 3 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "fit_line: x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    sse += r * r;
    f.max_residual = std::max(f.max_residual, std::abs(r));
  }
  f.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
  return f;
}

namespace {

struct Profiled {
  double sse;
  double a;
  double b;
};

Profiled profile(std::span<const double> eps, std::span<const double> counts, double d,
                 double background) {
  double uu = 0.0, uv = 0.0, vv = 0.0, u1 = 0.0, v1 = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double u = std::pow(eps[i], -d) / counts[i];
    const double v = std::pow(eps[i], -background) / counts[i];
    uu += u * u;
    uv += u * v;
    vv += v * v;
    u1 += u;
    v1 += v;
  }
  const double det = uu * vv - uv * uv;
  Profiled p{};
  if (std::abs(det) <= 1e-14 * uu * vv) {
    // Collinear columns: one term suffices.
    p.a = u1 / uu;
    p.b = 0.0;
  } else {
    p.a = (u1 * vv - v1 * uv) / det;
    p.b = (v1 * uu - u1 * uv) / det;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double r = (p.a * std::pow(eps[i], -d) + p.b * std::pow(eps[i], -background)) /
                         counts[i] -
                     1.0;
    sse += r * r;
  }
  p.sse = sse;
  return p;
}

}  // namespace

TwoTermFit fit_two_term(std::span<const double> eps, std::span<const double> counts, double d_lo,
                        double d_hi, double background) {
  require(eps.size() == counts.size(), "fit_two_term: size mismatch");
  require(eps.size() >= 4, "fit_two_term: need at least 4 scales");
  require(d_hi > d_lo, "fit_two_term: empty exponent range");
  for (std::size_t i = 0; i < eps.size(); ++i)
    require(eps[i] > 0.0 && counts[i] > 0.0, "fit_two_term: scales and counts must be positive");

  constexpr int kGrid = 1000;
  double best_d = d_lo;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kGrid; ++k) {
    const double d = d_lo + (d_hi - d_lo) * k / kGrid;
    const double s = profile(eps, counts, d, background).sse;
    if (s < best) {
      best = s;
      best_d = d;
    }
  }
  // Golden-section refinement inside the neighbouring grid cells.
  const double h = (d_hi - d_lo) / kGrid;
  double lo = std::max(d_lo, best_d - h), hi = std::min(d_hi, best_d + h);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = profile(eps, counts, x1, background).sse;
  double f2 = profile(eps, counts, x2, background).sse;
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = profile(eps, counts, x1, background).sse;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = profile(eps, counts, x2, background).sse;
    }
  }
  double d = 0.5 * (lo + hi);
  Profiled p = profile(eps, counts, d, background);
  if (best < p.sse) {
    d = best_d;
    p = profile(eps, counts, d, background);
  }

  TwoTermFit fit;
  fit.exponent = d;
  fit.a = p.a;
  fit.b = p.b;

  // Gauss-Newton covariance of (a, b, d).
  std::array<std::array<double, 3>, 3> jtj{};
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double u = std::pow(eps[i], -d) / counts[i];
    const double v = std::pow(eps[i], -background) / counts[i];
    const std::array<double, 3> j{u, v, -p.a * std::log(eps[i]) * u};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) jtj[r][c] += j[r] * j[c];
    const double model = p.a * std::pow(eps[i], -d) + p.b * std::pow(eps[i], -background);
    const double lr = model > 0.0 ? std::abs(std::log(model / counts[i]))
                                  : std::numeric_limits<double>::infinity();
    fit.max_residual = std::max(fit.max_residual, lr);
  }
  const auto& m = jtj;
  const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double c01 = m[1][0] * m[2][2] - m[1][2] * m[2][0];
  const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  const double det = m[0][0] * c00 - m[0][1] * c01 + m[0][2] * c02;
  const double inv22 = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  const double dof = static_cast<double>(eps.size()) - 3.0;
  const double sigma2 = dof > 0.0 ? p.sse / dof : p.sse;
  fit.exponent_se = (det > 0.0 && inv22 > 0.0) ? std::sqrt(sigma2 * inv22)
                                               : std::numeric_limits<double>::infinity();
  return fit;
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  require(x_.size() == y_.size() && x_.size() >= 2, "Pchip: need matching x, y with >= 2 points");
  const std::size_t n = x_.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    require(x_[i + 1] > x_[i], "Pchip: x must be strictly increasing");
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  m_.assign(n, 0.0);
  if (n == 2) {
    m_[0] = m_[1] = delta[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(m) > std::abs(3.0 * d0)) return 3.0 * d0;
    return m;
  };
  m_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  m_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double Pchip::operator()(double t) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

}  // namespace spiraldim::regression
