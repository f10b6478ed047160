#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spiraldim/curve.hpp"
#include "spiraldim/curves.hpp"

namespace spiraldim::fractal {

/// Strictly decreasing geometric list of scales.
struct ScaleLadder {
  std::vector<double> epsilons;
  double ratio = 0.0;

  std::size_t size() const noexcept { return epsilons.size(); }
  double eps_max() const { return epsilons.front(); }
  double eps_min() const { return epsilons.back(); }

  /// Throws PreconditionError unless the ladder is geometric with the
  /// stored ratio (1e-12 relative) and has at least 8 scales.
  void validate() const;

  /// count scales from eps_max downward.
  static ScaleLadder geometric(double eps_max, double ratio, int count);
  /// Scales eps_min * ratio^-k for k < count, dropping those above eps_cap.
  /// Fails if fewer than 8 remain.
  static ScaleLadder anchored_fine(double eps_min, double ratio, int count, double eps_cap);
};

struct LadderOptions {
  int count = 20;
  double ratio = 0.70710678118654752;  // 2^-1/2
  double chord_factor = 4.0;           // eps_min = chord_factor * max_chord
  double coarse_fraction = 0.25;       // scales above coarse_fraction * diameter dropped
};

/// Default ladder for a curve: fine end at chord_factor * max_chord,
/// coarse end capped at coarse_fraction * diameter.
ScaleLadder ladder_for_curve(const Curve& curve, const LadderOptions& options = {});

struct ScaleCounts {
  ScaleLadder ladder;
  std::vector<std::uint64_t> counts;
  int ambient = 2;
  /// Counts on the same grid moved by each of kGridOffsets (in mesh units).
  std::vector<std::vector<std::uint64_t>> offset_counts;
};

/// Sub-cell offset of the grid, in units of the mesh (components in [0, 1)).
using GridShift = Point3;

/// Fixed sub-cell offsets (Halton points) used to measure grid sensitivity.
inline constexpr int kGridOffsets = 4;
GridShift grid_offset(int k);

/// N(eps) for every ladder scale: cells of the origin-anchored grid of mesh
/// eps that contain a sample. Requires eps_min >= 2 * max_chord. With
/// offsets = true the counts on the grids moved by grid_offset(k) are kept
/// as well, for the band of fit_dimension.
ScaleCounts box_count(const Curve& curve, const ScaleLadder& ladder, const GridShift& shift = {},
                      bool offsets = true);

enum class FitModel { kTwoTerm, kPowerLaw };

/// Window selection and model for fit_dimension. The two-term model fits
/// N ~ a eps^-d + b eps^-1, separating the rectifiable background of a
/// finite sample from the singular part; kPowerLaw is the plain log-log slope.
/// When the singular term is below 1% of N at the finest window scale the
/// exponent is not identified and the power-law fit is reported instead.
/// The band is 2 sqrt(se^2 + grid_spread^2).
struct FitPolicy {
  int trim_coarse = 2;
  int trim_fine = 2;
  FitModel model = FitModel::kTwoTerm;
};

struct DimensionEstimate {
  double value = 1.0;
  /// RMS change of the estimate over the offset grids (0 without them).
  double grid_spread = 0.0;
  std::size_t window_begin = 0;  // ladder index range [begin, end)
  std::size_t window_end = 0;
  double slope_residual = 0.0;
  double band = 0.0;
  bool sub_resolved = false;
  FitModel model = FitModel::kTwoTerm;
  /// Unclamped fitted exponent.
  double raw_value = 0.0;
};

DimensionEstimate fit_dimension(const ScaleCounts& counts, const FitPolicy& policy = {});

/// Epsilon-neighbourhood measures on a ladder.
struct MeasureProfile {
  ScaleLadder ladder;
  std::vector<double> measures;
  /// Pixel size used at eps_min; coarser scales use the same pixels per eps.
  double raster_cell = 0.0;
  /// Relative discretization bound sqrt(ambient) * pixel / eps per scale.
  std::vector<double> rel_error_bound;
  int ambient = 2;
};

struct MeasureOptions {
  /// Refuse when the number of pixels processed at one scale would exceed this.
  std::uint64_t max_pixels = 4'000'000'000ULL;
};

/// |A_eps| by rasterizing the samples on pixels of size eps / m
/// (m = round(eps_min / raster_cell) >= 8) anchored at the origin and
/// keeping pixels whose centre lies within eps of an occupied pixel centre.
MeasureProfile epsilon_measure(const Curve& curve, const ScaleLadder& ladder, double raster_cell,
                               const MeasureOptions& options = {});

struct ContentProfile {
  std::vector<double> epsilons;
  std::vector<double> quotients;  // |A_eps| / eps^(ambient - s)
  double s = 0.0;
  double spread = 0.0;            // max / min quotient
  bool monotone = false;
  std::string verdict;            // nondegenerate | degenerate-drift | inconclusive
  double spread_threshold = 4.0;
  double reversal_tolerance = 0.01;
};

ContentProfile content_profile(const MeasureProfile& profile, double s);

/// Chord and tau range used by graph_dimension for a given budget.
struct ChirpPlan {
  double max_chord = 0.0;
  double tau_end = 0.0;
  std::size_t samples = 0;
};

/// Smallest chord (on a quarter-octave grid) whose chirp graph reaches
/// kappa times the scale where the local wavelength equals the finest
/// ladder scale, within the budget.
ChirpPlan plan_chirp(const curves::ChirpSpec& spec, std::size_t budget, double kappa = 0.1,
                     double chord_factor = 4.0);

/// gen_chirp_graph -> box_count -> fit_dimension with the planned chord.
DimensionEstimate graph_dimension(const curves::ChirpSpec& spec, std::size_t budget,
                                  const FitPolicy& policy = {});

/// Kernels shared by the public operations; the reference namespace holds
/// straightforward serial versions kept for testing and benchmarking.
namespace kernels {
std::vector<std::uint64_t> box_counts(const Curve& curve, const std::vector<double>& epsilons,
                                      const GridShift& shift);
/// Pixel count of the neighbourhood at scale eps with m pixels per eps.
std::uint64_t neighbourhood_pixels(const Curve& curve, double eps, int m);
}  // namespace kernels

namespace reference {
std::vector<std::uint64_t> box_counts(const Curve& curve, const std::vector<double>& epsilons,
                                      const GridShift& shift);
std::uint64_t neighbourhood_pixels(const Curve& curve, double eps, int m);
}  // namespace reference

}  // namespace spiraldim::fractal
