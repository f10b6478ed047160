#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spiraldim/curves.hpp"
#include "spiraldim/error.hpp"
#include "spiraldim/fractal.hpp"
#include "spiraldim/io.hpp"

namespace spiraldim::experiments {

/// One comparison between a prediction and a measurement.
///
/// Numeric rows compare |predicted - estimated| with max(band, tolerance);
/// rows with a NaN prediction carry a verdict only. Rows with an expected
/// verdict also require it to match the observed one.
struct Row {
  std::string id;        // stable within the suite, used for file names
  std::string quantity;  // dimension, return_exponent, verdict, ...
  std::string spec;      // ';'-separated key=value snapshot of the inputs
  double predicted = 0.0;
  double estimated = 0.0;
  double band = 0.0;
  double tolerance = 0.0;
  std::string expected_verdict;
  std::string observed_verdict;
  bool experimental = false;
  bool pass = false;
  std::string diagnostic;
  /// Box counts behind a dimension row, written as a companion file.
  std::optional<fractal::ScaleCounts> counts;

  /// Pass flag as a function of the stored fields only.
  bool evaluate() const;
};

struct SuiteResult {
  std::string suite_id;
  std::vector<Row> rows;
  double runtime_seconds = 0.0;  // reported on the console, never written to files

  std::size_t passed() const;
  /// Non-experimental rows that fail.
  std::size_t failed() const;
};

// ------------------------------------------------------------------ planners

/// Radius where consecutive turns of the spiral are eps apart.
double spiral_core_radius(const curves::PowerSpiralSpec& spec, double eps);

struct SpiralPlan {
  double max_chord = 0.0;
  double r_min = 0.0;
  std::size_t samples = 0;
};

/// r_min = kappa * spiral_core_radius(spec, chord_factor * chord). samples is
/// limit + 1 when the plan needs more than limit samples.
SpiralPlan plan_spiral(const curves::PowerSpiralSpec& spec, double max_chord, double kappa,
                       std::size_t limit, double chord_factor = 4.0);

/// Time where consecutive turns of t^-alpha (planar) and t^-gamma (axial) are
/// eps apart: 2 pi |(alpha t^(-alpha-1), gamma t^(-gamma-1))| = eps.
double trajectory_core_time(double alpha, double gamma, double eps);

struct TrajectoryPlan {
  double max_chord = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
};

/// t_max = max(lambda * core time, 2 t0).
TrajectoryPlan plan_trajectory(const curves::TrajectoryFamilySpec& spec, double max_chord,
                               double lambda, std::size_t limit, double chord_factor = 4.0);

/// Smallest chord on the grid 1e-2 * 2^(-k/4) whose plan fits the budget.
/// count(chord) must grow as chord shrinks.
template <class Count>
double choose_chord(Count&& count, std::size_t budget);

/// Backward integration of the normal form onto the branch that accumulates
/// at the origin.
struct HopfSetup {
  int p = 2;
  int l = 1;
  double r0 = 1.0;
  double max_chord = 1e-4;
  double lambda = 20.0;
  std::size_t budget = 10'000'000;
  ode::Tolerances tol{1e-9, 1e-12};
  /// The transient ends where the windowed decay exponent of r stays within
  /// this relative distance of its value on the last octave.
  double transient_tolerance = 0.05;
};

struct HopfTrajectory {
  Curve curve;              // after the transient, ordered toward the origin
  double transient_end = 0.0;  // |t| where the kept part starts
  double decay_exponent = 0.0; // windowed exponent of r against |t| at the cut
  bool truncated = false;
  std::string truncation_reason;
  bool sign_flagged = false;   // odd p: b_p > 0 is used
};

/// Normal form for the setup: a = 0, b_p = -1 for even p and +1 for odd p.
curves::NormalFormSpec hopf_spec(int p, int l);

/// Predicted dimension 2/(1+a) or 2-(a+g)/(1+g) with a = 1/(2l), g = 1/(p-1).
double hopf_prediction(int p, int l);

HopfTrajectory hopf_trajectory(const HopfSetup& setup);

// -------------------------------------------------------------- predictions

inline double spiral_prediction(double alpha) { return alpha <= 1.0 ? 2.0 / (1.0 + alpha) : 1.0; }
inline double chirp_prediction(double alpha, double beta) {
  return 2.0 - (alpha + 1.0) / (beta + 1.0);
}
/// Trajectory of the chirp/spiral family in space.
double trajectory_prediction(double alpha, double gamma);

// ---------------------------------------------------------------- suites

struct SpiralRow {
  double alpha;
  double max_chord;
  double kappa;
};
struct ChirpRow {
  double alpha;
  double beta;
};
struct TrajectoryRow {
  double alpha;
  double gamma;
  double max_chord;
  double lambda;
};
struct ContentRow {
  double log_exponent;
  double max_chord;
  double kappa;
};

struct SuiteConfig {
  std::vector<std::string> suites{"tricot", "theorem_phase", "projections",
                                  "poincare", "hopf", "degenerate_content"};
  int row_threads = 1;
  double planar_tolerance = 0.06;
  double spatial_tolerance = 0.08;

  std::vector<SpiralRow> spirals{{0.25, 1e-3, 0.3}, {0.5, 1e-4, 0.1}, {0.75, 3e-5, 0.1},
                                 {1.0, 1e-5, 0.1}};
  std::vector<ChirpRow> chirps{{0.25, 1.0}, {0.5, 1.0}, {0.75, 1.0}};
  std::size_t chirp_budget = 4'000'000;
  double chirp_kappa = 0.1;
  std::size_t budget = 10'000'000;

  std::vector<TrajectoryRow> trajectories{{0.5, 1.0, 5e-5, 20.0},  {0.5, 0.5, 5e-5, 20.0},
                                          {0.25, 1.0, 2e-4, 3.0},  {0.5, 0.25, 5e-5, 20.0},
                                          {0.75, 0.25, 5e-5, 20.0}, {2.0, 1.0, 1e-5, 0.0}};
  /// Rectifiable rows run to this time instead of a core-time multiple.
  double rectifiable_t_max = 2000.0;
  /// Estimates at gamma = alpha (1 -+ continuity_offset) for the continuity check.
  double continuity_alpha = 0.5;
  double continuity_offset = 0.01;
  /// Oracle comparison with the integrated cubic system over one decade.
  double oracle_t_begin = 20.0;
  double oracle_max_chord = 1e-3;

  std::vector<TrajectoryRow> projections{{0.5, 1.0, 1e-4, 0.1}, {0.25, 0.5, 3e-4, 0.1}};
  std::vector<double> oscillatory_alphas{0.5};

  std::vector<double> poincare_alphas{0.5, 0.75, 1.0};
  double poincare_t_max = 2000.0;
  double poincare_max_chord = 1e-4;
  double poincare_tolerance = 0.15;

  std::vector<int> hopf_p{2, 3, 4, 6};
  double hopf_max_chord = 5e-5;
  double hopf_lambda = 20.0;
  std::vector<int> hopf_experimental_p{6};  // rows with l = 2
  double hopf_experimental_max_chord = 2e-4;
  double hopf_experimental_lambda = 5.0;

  std::vector<ContentRow> content{{0.0, 1e-4, 0.1}, {1.0, 3e-4, 0.3}, {2.0, 3e-3, 0.5}};
  double content_tolerance = 0.07;
  int content_pixels = 8;  // pixels per eps

  /// Reads `key = value` entries (see README for the keys).
  static SuiteConfig from(const io::Config& config);
};

SuiteResult suite_tricot_baselines(const SuiteConfig& config);
SuiteResult suite_theorem_phase(const SuiteConfig& config);
SuiteResult suite_projections(const SuiteConfig& config);
SuiteResult suite_poincare(const SuiteConfig& config);
SuiteResult suite_hopf(const SuiteConfig& config);
SuiteResult suite_degenerate_content(const SuiteConfig& config);

/// Runs a suite by name; throws PreconditionError for unknown names.
SuiteResult run_suite(const std::string& name, const SuiteConfig& config);

/// One CSV per suite, `<suite>/<row>_counts.csv` companions for rows with
/// box counts, and summary.csv. Output depends only on the results.
std::vector<std::string> emit_report(const std::vector<SuiteResult>& results,
                                     const std::string& out_dir);

// ----------------------------------------------------------------- inline

template <class Count>
double choose_chord(Count&& count, std::size_t budget) {
  auto chord_at = [](int k) { return 1e-2 * std::exp2(-k / 4.0); };
  if (count(chord_at(0)) > budget)
    throw BudgetError("budget " + std::to_string(budget) +
                          " is too small even for the coarsest chord 1e-2",
                      0.0);
  int lo = 0, hi = 96;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (count(chord_at(mid)) <= budget)
      lo = mid;
    else
      hi = mid;
  }
  return chord_at(lo);
}

}  // namespace spiraldim::experiments
