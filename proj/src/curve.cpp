#include "spiraldim/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "spiraldim/error.hpp"

namespace spiraldim {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double chord(std::span<const double> c, std::size_t i, std::size_t stride) {
  double s = 0.0;
  for (std::size_t a = 0; a < stride; ++a) {
    const double d = c[(i + 1) * stride + a] - c[i * stride + a];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

void Provenance::add(std::string key, double value) {
  fields.emplace_back(std::move(key), format_double(value));
}

Curve::Curve(int ambient, std::vector<double> params, std::vector<double> coords,
             double max_chord, Provenance provenance, bool open_tail)
    : ambient_(ambient),
      params_(std::move(params)),
      coords_(std::move(coords)),
      max_chord_(max_chord),
      provenance_(std::move(provenance)),
      open_tail_(open_tail) {
  require(ambient_ == 2 || ambient_ == 3, "curve ambient dimension must be 2 or 3");
  require(params_.size() >= 2, "curve needs at least 2 samples");
  require(coords_.size() == params_.size() * static_cast<std::size_t>(ambient_),
          "curve coordinate count does not match parameter count");
  const bool up = params_[1] > params_[0];
  for (std::size_t i = 0; i + 1 < params_.size(); ++i) {
    const bool ok = up ? params_[i + 1] > params_[i] : params_[i + 1] < params_[i];
    require(ok, "curve parameters must be strictly monotone");
  }
  for (double v : coords_) require(std::isfinite(v), "curve coordinates must be finite");
  const double measured = measured_max_chord();
  require(max_chord_ > 0.0 && measured <= max_chord_ * (1.0 + 1e-12),
          "curve chord " + format_double(measured) + " exceeds max_chord " +
              format_double(max_chord_));
}

Curve Curve::with_measured_chord(int ambient, std::vector<double> params,
                                 std::vector<double> coords, Provenance provenance,
                                 bool open_tail) {
  require(ambient == 2 || ambient == 3, "curve ambient dimension must be 2 or 3");
  double m = 0.0;
  const auto stride = static_cast<std::size_t>(ambient);
  const std::size_t n = coords.size() / stride;
  for (std::size_t i = 0; i + 1 < n; ++i) m = std::max(m, chord(coords, i, stride));
  if (m == 0.0) m = std::numeric_limits<double>::min();
  return Curve(ambient, std::move(params), std::move(coords), m, std::move(provenance),
               open_tail);
}

Point3 Curve::point(std::size_t i) const {
  const std::size_t b = i * static_cast<std::size_t>(ambient_);
  return {coords_[b], coords_[b + 1], ambient_ == 3 ? coords_[b + 2] : 0.0};
}

double Curve::measured_max_chord() const {
  double m = 0.0;
  const auto stride = static_cast<std::size_t>(ambient_);
  for (std::size_t i = 0; i + 1 < size(); ++i) m = std::max(m, chord(coords_, i, stride));
  return m;
}

double Curve::diameter() const {
  double best = 0.0;
  const auto stride = static_cast<std::size_t>(ambient_);
  for (std::size_t a = 0; a < stride; ++a) {
    double lo = coords_[a], hi = coords_[a];
    for (std::size_t i = 0; i < size(); ++i) {
      lo = std::min(lo, coords_[i * stride + a]);
      hi = std::max(hi, coords_[i * stride + a]);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

double Curve::max_radius() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const Point3 p = point(i);
    best = std::max(best, std::hypot(p[0], p[1], p[2]));
  }
  return best;
}

Curve clip_to_ball(const Curve& curve, double rho) {
  require(rho > 0.0, "clip radius must be positive");
  std::vector<double> params, coords;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const Point3 p = curve.point(i);
    if (std::hypot(p[0], p[1], p[2]) > rho) continue;
    params.push_back(curve.param(i));
    for (int a = 0; a < curve.ambient(); ++a) coords.push_back(curve.coord(i, a));
  }
  require(params.size() >= 2, "fewer than 2 samples inside the clipping ball");
  Provenance prov = curve.provenance();
  prov.add("clip_radius", rho);
  // Samples outside the ball may leave gaps, so the chord bound is remeasured.
  return Curve::with_measured_chord(curve.ambient(), std::move(params), std::move(coords),
                                    std::move(prov), curve.open_tail());
}

Curve rescale(const Curve& curve, double factor) {
  require(factor > 0.0, "rescale factor must be positive");
  std::vector<double> coords(curve.coords().begin(), curve.coords().end());
  for (double& v : coords) v *= factor;
  Provenance prov = curve.provenance();
  prov.add("rescale", factor);
  std::vector<double> params(curve.params().begin(), curve.params().end());
  return Curve(curve.ambient(), std::move(params), std::move(coords),
               curve.max_chord() * factor * (1.0 + 1e-12), std::move(prov), curve.open_tail());
}

Curve translate(const Curve& curve, const Point3& offset) {
  std::vector<double> coords(curve.coords().begin(), curve.coords().end());
  const auto stride = static_cast<std::size_t>(curve.ambient());
  for (std::size_t i = 0; i < curve.size(); ++i)
    for (std::size_t a = 0; a < stride; ++a) coords[i * stride + a] += offset[a];
  std::vector<double> params(curve.params().begin(), curve.params().end());
  Provenance prov = curve.provenance();
  prov.add("translate", std::to_string(offset[0]) + " " + std::to_string(offset[1]) + " " +
                            std::to_string(offset[2]));
  // Translation changes rounding of the differences, so remeasure.
  return Curve::with_measured_chord(curve.ambient(), std::move(params), std::move(coords),
                                    std::move(prov), curve.open_tail());
}

Curve reversed(const Curve& curve) {
  const auto stride = static_cast<std::size_t>(curve.ambient());
  const std::size_t n = curve.size();
  std::vector<double> params(n), coords(n * stride);
  for (std::size_t i = 0; i < n; ++i) {
    params[i] = curve.param(n - 1 - i);
    for (std::size_t a = 0; a < stride; ++a)
      coords[i * stride + a] = curve.coords()[(n - 1 - i) * stride + a];
  }
  return Curve(curve.ambient(), std::move(params), std::move(coords), curve.max_chord(),
               curve.provenance(), false);
}

}  // namespace spiraldim
