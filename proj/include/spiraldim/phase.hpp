#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spiraldim/curve.hpp"
#include "spiraldim/regression.hpp"

namespace spiraldim::phase {

/// Unwrapped polar description of a planar curve about the origin.
struct PolarProfile {
  std::vector<double> phis;
  std::vector<double> radii;
  std::vector<double> params;  // parameters of the source curve
  bool open_tail = false;
};

/// Continuous angle from atan2 with cumulative unwrapping.
/// Throws UnderSampledError when a step reaches pi, PreconditionError for a
/// sample at the origin or a non-planar curve.
PolarProfile unwrap_phase(const Curve& curve);

/// Stretch of the curve on which r grows with the (oriented) angle.
struct Wave {
  double phi_begin = 0.0;
  double phi_end = 0.0;
  double rel_rise = 0.0;  // (r_end - r_begin) / r_begin
};

struct WavyReport {
  /// Across-turn violations: r(psi) > r(psi - 2 pi).
  std::size_t violation_count = 0;
  std::vector<std::pair<double, double>> violation_intervals;
  double max_rise = 0.0;
  /// Local increases of r along the curve.
  std::size_t wave_count = 0;
  std::vector<Wave> waves;
  double max_wave_rise = 0.0;
};

/// Compares r(psi) with r(psi - 2 pi) on a grid of grid_per_turn base angles
/// per turn (linear interpolation in the unwrapped angle), and lists the
/// local increases of r along the angle whose relative rise exceeds rel_tol.
/// Needs 3 turns.
WavyReport check_radially_decreasing(const PolarProfile& profile, int grid_per_turn = 512,
                                     double rel_tol = 1e-12);

struct ReturnSequence {
  double section_angle = 0.0;
  std::vector<double> radii;  // ordered toward the origin
  std::vector<double> phis;   // unwrapped crossing angles, same order
  double interpolation_error = 0.0;
  std::size_t violations = 0; // successive radii that fail to decrease
};

/// Crossings of the ray at section_angle, radii refined by monotone cubic
/// interpolation of r against the unwrapped angle. Needs 10 crossings.
ReturnSequence poincare_sequence(const PolarProfile& profile, double section_angle);

struct ExponentEstimate {
  double value = 0.0;
  double band = 0.0;
  std::size_t used = 0;
};

/// Slope of log(-d(r_n)) against log(r_n), d(r_n) = r_(n+1) - r_n.
/// Throws MixedSignError if some d(r_n) >= 0.
ExponentEstimate fit_return_exponent(const ReturnSequence& seq);

struct ArcLengthReport {
  std::vector<double> params;
  std::vector<double> lengths;  // cumulative chordal length
  std::string verdict;          // rectifiable | nonrectifiable | borderline
  double total_length = 0.0;
  double limit = 0.0;           // extrapolated length when rectifiable
  double limit_stability = 0.0; // relative disagreement of two extrapolations
  double tail_exponent = 0.0;   // eta (rectifiable) or divergence exponent
  double band = 0.0;
};

/// Needs at least 10^4 samples. A curve without an open tail is complete and
/// its length is exact. For an open tail the last 30% of the parameter range
/// is split into 8 geometric windows and log(length increment) is regressed
/// on log(window centre); the parameter used is |t|, or 1/|t| when |t|
/// decreases along the curve.
ArcLengthReport arc_length_profile(const Curve& curve);

/// z = g(r) = coefficient * r^beta with |g'(r)| <= derivative_bound * r^(beta-1).
struct SurfaceSpec {
  double beta = 0.5;
  double coefficient = 1.0;
  double derivative_bound = 1.0;

  void validate() const;
  double g(double r) const;
};

Curve lift_to_surface(const PolarProfile& profile, const SurfaceSpec& surface);

struct BilipschitzScan {
  std::vector<double> thresholds;  // parameter thresholds T
  std::vector<double> max_ratio;   // max |dz| / planar distance over pairs beyond T
  std::vector<double> pair_class_max;  // near, middle, far (all thresholds)
  double overall_max = 0.0;
  double trend_slope = 0.0;        // slope of log max_ratio against log T
  std::string trend;               // decreasing | increasing | flat
};

/// Random pairs (fixed seed) beyond each threshold, split between angular
/// separations |dphi| <= pi/3, pi/3 < |dphi| < 2 pi + pi/3 and beyond.
BilipschitzScan bilipschitz_ratio_scan(const Curve& curve3d, std::size_t pairs_budget,
                                       int thresholds = 6, std::uint64_t seed = 20240601);

enum class Plane { kXY, kXZ, kYZ };

Curve project(const Curve& curve3d, Plane plane);

enum class Regime { kNonAccumulating, kWavySpiral, kSpiral, kInconclusive };

std::string regime_name(Regime r);

struct Classification {
  Regime regime = Regime::kInconclusive;
  std::vector<double> turn_max_radius;  // last turns, in order
  std::size_t turns = 0;
  std::size_t violations = 0;           // across-turn violations
  double wave_rise = 0.0;               // largest relative wave in the last turns
  double turn_decay = 0.0;              // median relative drop of turn_max_radius
};

/// Regime of the phase curve (x, x') of x = t^-alpha sin(t^beta): the curve
/// accumulates when the per-turn maximum radius decreases over the final 10
/// turns. An accumulating curve is a wavy spiral if it has across-turn
/// violations or if its local waves in the final turns rise by more than the
/// turn-to-turn decay of the radius; otherwise it is a spiral.
Classification classify_curve(const Curve& curve, double alpha, double beta);

/// Envelope exponent of an oscillating graph: local maxima of |ordinate|
/// between sign changes regressed against the abscissa on log-log axes.
regression::LineFit fit_envelope_exponent(const Curve& graph, int abscissa_axis, int ordinate_axis);

}  // namespace spiraldim::phase
