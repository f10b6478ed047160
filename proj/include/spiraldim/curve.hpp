#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spiraldim {

using Point3 = std::array<double, 3>;

/// Ordered key/value record describing how a curve was produced.
struct Provenance {
  std::string generator;
  std::vector<std::pair<std::string, std::string>> fields;

  void add(std::string key, std::string value) {
    fields.emplace_back(std::move(key), std::move(value));
  }
  void add(std::string key, double value);
};

/// Immutable sampled curve in the plane or in space.
///
/// Coordinates are stored interleaved with stride `ambient()`. Parameter
/// values are strictly monotone (either direction) and every chord between
/// consecutive samples is bounded by `max_chord()`; both are checked on
/// construction.
class Curve {
 public:
  Curve(int ambient, std::vector<double> params, std::vector<double> coords,
        double max_chord, Provenance provenance, bool open_tail = false);

  /// Builds a curve and sets max_chord to the measured maximum chord.
  static Curve with_measured_chord(int ambient, std::vector<double> params,
                                   std::vector<double> coords,
                                   Provenance provenance,
                                   bool open_tail = false);

  int ambient() const noexcept { return ambient_; }
  std::size_t size() const noexcept { return params_.size(); }
  std::span<const double> params() const noexcept { return params_; }
  std::span<const double> coords() const noexcept { return coords_; }
  double param(std::size_t i) const { return params_[i]; }
  double coord(std::size_t i, int axis) const {
    return coords_[i * static_cast<std::size_t>(ambient_) +
                   static_cast<std::size_t>(axis)];
  }
  /// Sample i with z = 0 for planar curves.
  Point3 point(std::size_t i) const;

  double max_chord() const noexcept { return max_chord_; }
  /// True when the sample is a finite prefix of a curve that continues
  /// toward an accumulation point beyond the last sample.
  bool open_tail() const noexcept { return open_tail_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Largest Euclidean chord between consecutive samples.
  double measured_max_chord() const;
  /// Largest coordinate extent over all axes.
  double diameter() const;
  /// Largest distance of any sample from the origin.
  double max_radius() const;

 private:
  int ambient_;
  std::vector<double> params_;
  std::vector<double> coords_;
  double max_chord_;
  Provenance provenance_;
  bool open_tail_;
};

/// Keeps only the samples inside the closed ball of radius rho about the
/// origin. The result's max_chord is the measured one.
Curve clip_to_ball(const Curve& curve, double rho);

/// Multiplies every coordinate by factor (params unchanged).
Curve rescale(const Curve& curve, double factor);

/// Adds offset to every coordinate (params unchanged).
Curve translate(const Curve& curve, const Point3& offset);

/// Reverses sample order (params reversed as well).
Curve reversed(const Curve& curve);

}  // namespace spiraldim
