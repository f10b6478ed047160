#include "spiraldim/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "spiraldim/error.hpp"
#include "spiraldim/regression.hpp"

namespace spiraldim::fractal {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void ScaleLadder::validate() const {
  require(epsilons.size() >= 8, "scale ladder needs at least 8 scales");
  require(ratio > 0.0 && ratio < 1.0, "scale ladder ratio must lie in (0, 1)");
  for (std::size_t k = 0; k + 1 < epsilons.size(); ++k) {
    require(epsilons[k] > 0.0, "scale ladder entries must be positive");
    require(std::abs(epsilons[k + 1] / epsilons[k] - ratio) <= 1e-12,
            "scale ladder is not geometric with the stored ratio");
  }
}

ScaleLadder ScaleLadder::geometric(double eps_max, double ratio, int count) {
  require(eps_max > 0.0, "eps_max must be positive");
  require(ratio > 0.0 && ratio < 1.0, "ratio must lie in (0, 1)");
  require(count >= 8, "a ladder needs at least 8 scales");
  ScaleLadder l;
  l.ratio = ratio;
  for (int k = 0; k < count; ++k) l.epsilons.push_back(eps_max * std::pow(ratio, k));
  return l;
}

ScaleLadder ScaleLadder::anchored_fine(double eps_min, double ratio, int count, double eps_cap) {
  require(eps_min > 0.0, "eps_min must be positive");
  require(ratio > 0.0 && ratio < 1.0, "ratio must lie in (0, 1)");
  int kept = 0;
  for (int k = 0; k < count; ++k)
    if (eps_min * std::pow(ratio, -k) <= eps_cap) kept = k + 1;
  if (kept < 8)
    throw PreconditionError("only " + std::to_string(kept) + " scales fit between eps_min=" +
                            num(eps_min) + " and the cap " + num(eps_cap) +
                            "; at least 8 are required (refine the sampling)");
  return geometric(eps_min * std::pow(ratio, -(kept - 1)), ratio, kept);
}

ScaleLadder ladder_for_curve(const Curve& curve, const LadderOptions& o) {
  return ScaleLadder::anchored_fine(o.chord_factor * curve.max_chord(), o.ratio, o.count,
                                    o.coarse_fraction * curve.diameter());
}

GridShift grid_offset(int k) {
  require(k >= 0, "grid_offset: negative index");
  auto halton = [](int i, int base) {
    double f = 1.0, r = 0.0;
    for (; i > 0; i /= base) {
      f /= base;
      r += f * (i % base);
    }
    return r;
  };
  return {halton(k + 1, 2), halton(k + 1, 3), halton(k + 1, 5)};
}

ScaleCounts box_count(const Curve& curve, const ScaleLadder& ladder, const GridShift& shift,
                      bool offsets) {
  ladder.validate();
  const double min_eps = 2.0 * curve.max_chord();
  if (ladder.eps_min() < min_eps)
    throw PreconditionError("box_count: finest scale " + num(ladder.eps_min()) +
                            " is below the minimum admissible eps " + num(min_eps) +
                            " (2 * max_chord)");
  ScaleCounts out{ladder, kernels::box_counts(curve, ladder.epsilons, shift), curve.ambient(), {}};
  for (std::size_t k = 0; k + 1 < out.counts.size(); ++k)
    if (out.counts[k + 1] < out.counts[k])
      throw NumericalError("box_count: counts decrease from eps=" + num(ladder.epsilons[k]) +
                           " to eps=" + num(ladder.epsilons[k + 1]));
  if (offsets)
    for (int k = 0; k < kGridOffsets; ++k) {
      GridShift s = grid_offset(k);
      for (int i = 0; i < 3; ++i) s[i] = std::fmod(s[i] + shift[i], 1.0);
      out.offset_counts.push_back(kernels::box_counts(curve, ladder.epsilons, s));
    }
  return out;
}

namespace {

struct CoreFit {
  bool sub_resolved = false;
  double raw = 0.0;
  double se = 0.0;
  double residual = 0.0;
  FitModel model = FitModel::kTwoTerm;
};

// Singular share below which the two-term exponent is not identified.
constexpr double kMinSingularShare = 0.01;

CoreFit fit_window(const ScaleLadder& ladder, const std::vector<std::uint64_t>& counts,
                   std::size_t b, std::size_t e, double amb, FitModel model) {
  std::vector<double> eps, cnt, x, y;
  for (std::size_t k = b; k < e; ++k) {
    eps.push_back(ladder.epsilons[k]);
    cnt.push_back(static_cast<double>(counts[k]));
    x.push_back(-std::log(ladder.epsilons[k]));
    y.push_back(std::log(static_cast<double>(counts[k])));
  }
  CoreFit f;
  if (std::all_of(cnt.begin(), cnt.end(), [&](double c) { return c == cnt.front(); })) {
    f.sub_resolved = true;
    return f;
  }
  if (model == FitModel::kTwoTerm) {
    const regression::TwoTermFit tt = regression::fit_two_term(eps, cnt, 1.0, amb, 1.0);
    const double share = tt.a * std::pow(eps.back(), -tt.exponent) / cnt.back();
    if (share >= kMinSingularShare) {
      f.raw = tt.exponent;
      f.se = tt.exponent_se;
      f.residual = tt.max_residual;
      return f;
    }
  }
  const regression::LineFit line = regression::fit_line(x, y);
  f.raw = line.slope;
  f.se = line.slope_se;
  f.residual = line.max_residual;
  f.model = FitModel::kPowerLaw;
  return f;
}

}  // namespace

DimensionEstimate fit_dimension(const ScaleCounts& counts, const FitPolicy& policy) {
  const std::size_t n = counts.counts.size();
  require(n >= 8 && counts.ladder.size() == n, "fit_dimension: need at least 8 scales");
  require(policy.trim_coarse >= 0 && policy.trim_fine >= 0, "fit_dimension: negative trim");
  const auto b = static_cast<std::size_t>(policy.trim_coarse);
  const std::size_t e = n - std::min(n, static_cast<std::size_t>(policy.trim_fine));
  require(e > b && e - b >= 5, "fit_dimension: regression window shorter than 5 scales");

  DimensionEstimate est;
  est.window_begin = b;
  est.window_end = e;
  est.model = policy.model;
  const double amb = counts.ambient;

  const CoreFit f = fit_window(counts.ladder, counts.counts, b, e, amb, policy.model);
  if (f.sub_resolved) {
    est.sub_resolved = true;
    est.raw_value = 0.0;
    est.value = 1.0;
    est.band = std::numeric_limits<double>::min();
    return est;
  }
  est.raw_value = f.raw;
  est.slope_residual = f.residual;
  est.model = f.model;
  est.value = std::clamp(est.raw_value, 1.0, amb);

  // Offset grids are refitted with the model chosen on the anchored grid.
  double ss = 0.0;
  std::size_t used = 0;
  for (const auto& oc : counts.offset_counts) {
    if (oc.size() != n) continue;
    const CoreFit g = fit_window(counts.ladder, oc, b, e, amb, f.model);
    const double v = g.sub_resolved ? 1.0 : std::clamp(g.raw, 1.0, amb);
    ss += (v - est.value) * (v - est.value);
    ++used;
  }
  if (used > 0) est.grid_spread = std::sqrt(ss / static_cast<double>(used));
  est.band = 2.0 * std::sqrt(f.se * f.se + est.grid_spread * est.grid_spread);
  if (!(est.band > 0.0)) est.band = std::numeric_limits<double>::min();
  return est;
}

MeasureProfile epsilon_measure(const Curve& curve, const ScaleLadder& ladder, double raster_cell,
                               const MeasureOptions& options) {
  ladder.validate();
  require(raster_cell > 0.0, "epsilon_measure: raster_cell must be positive");
  require(raster_cell <= ladder.eps_min() / 8.0 * (1.0 + 1e-12),
          "epsilon_measure: raster_cell must be at most eps_min / 8 = " +
              num(ladder.eps_min() / 8.0));
  const int m = std::max(8, static_cast<int>(std::lround(ladder.eps_min() / raster_cell)));
  const int dim = curve.ambient();
  // Work estimate: along a curve each occupied eps-cell adds about 3^(dim-1)
  // candidate tiles of (3m)^dim pixels.
  {
    const ScaleCounts c = box_count(curve, ladder, {}, false);
    const double per_tile = std::pow(3.0 * m, dim) * std::pow(3.0, dim - 1);
    const double work = static_cast<double>(c.counts.back()) * per_tile;
    if (work > static_cast<double>(options.max_pixels)) {
      const double suggest = raster_cell * std::pow(work / static_cast<double>(options.max_pixels),
                                                    1.0 / dim);
      throw PreconditionError("epsilon_measure: raster work estimate " + num(work) +
                              " pixels exceeds the budget; use a raster_cell of at least " +
                              num(std::min(suggest, ladder.eps_min() / 8.0)) +
                              " or a coarser ladder");
    }
  }
  MeasureProfile out;
  out.ladder = ladder;
  out.raster_cell = ladder.eps_min() / m;
  out.ambient = dim;
  for (double eps : ladder.epsilons) {
    const double h = eps / m;
    const std::uint64_t pix = kernels::neighbourhood_pixels(curve, eps, m);
    out.measures.push_back(static_cast<double>(pix) * std::pow(h, dim));
    out.rel_error_bound.push_back(std::sqrt(static_cast<double>(dim)) / m);
  }
  for (std::size_t k = 0; k + 1 < out.measures.size(); ++k)
    if (out.measures[k + 1] > out.measures[k])
      throw NumericalError("epsilon_measure: measure increases from eps=" +
                           num(ladder.epsilons[k]) + " to eps=" + num(ladder.epsilons[k + 1]));
  return out;
}

ContentProfile content_profile(const MeasureProfile& profile, double s) {
  require(s > 0.0 && s <= profile.ambient, "content_profile: s must lie in (0, ambient]");
  require(profile.measures.size() == profile.ladder.size() && profile.measures.size() >= 2,
          "content_profile: malformed profile");
  ContentProfile c;
  c.s = s;
  const double power = profile.ambient - s;
  for (std::size_t k = 0; k < profile.measures.size(); ++k) {
    const double eps = profile.ladder.epsilons[k];
    c.epsilons.push_back(eps);
    c.quotients.push_back(profile.measures[k] / std::pow(eps, power));
  }
  const auto [mn, mx] = std::minmax_element(c.quotients.begin(), c.quotients.end());
  c.spread = *mx / *mn;
  const double dir = c.quotients.back() >= c.quotients.front() ? 1.0 : -1.0;
  c.monotone = true;
  for (std::size_t k = 0; k + 1 < c.quotients.size(); ++k) {
    const double step = c.quotients[k + 1] - c.quotients[k];
    if (step * dir < 0.0 && std::abs(step) > c.reversal_tolerance * c.quotients[k])
      c.monotone = false;
  }
  if (c.spread <= c.spread_threshold)
    c.verdict = "nondegenerate";
  else if (c.monotone)
    c.verdict = "degenerate-drift";
  else
    c.verdict = "inconclusive";
  return c;
}

ChirpPlan plan_chirp(const curves::ChirpSpec& spec, std::size_t budget, double kappa,
                     double chord_factor) {
  spec.validate();
  require(budget >= 1000, "plan_chirp: budget must be at least 1000");
  require(kappa > 0.0 && kappa <= 1.0, "plan_chirp: kappa must lie in (0, 1]");
  constexpr double kCoarsest = 1e-2;
  auto tau_end_for = [&](double chord) {
    const double eps = chord_factor * chord;
    const double tau_c = std::pow(spec.beta * eps / (2.0 * std::numbers::pi), 1.0 / (spec.beta + 1.0));
    return std::min(0.5, kappa * tau_c);
  };
  auto count = [&](int k) {
    const double chord = kCoarsest * std::pow(2.0, -k / 4.0);
    return curves::chirp_sample_count(spec, 1.0, tau_end_for(chord), chord, budget);
  };
  // count(k) grows with k; find the largest k that fits.
  int lo = 0, hi = 96;
  if (count(lo) > budget)
    throw BudgetError("plan_chirp: budget " + std::to_string(budget) +
                          " cannot reach the accumulation region even at the coarsest chord",
                      1.0);
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (count(mid) <= budget)
      lo = mid;
    else
      hi = mid;
  }
  ChirpPlan plan;
  plan.max_chord = kCoarsest * std::pow(2.0, -lo / 4.0);
  plan.tau_end = tau_end_for(plan.max_chord);
  plan.samples = count(lo);
  return plan;
}

DimensionEstimate graph_dimension(const curves::ChirpSpec& spec, std::size_t budget,
                                  const FitPolicy& policy) {
  const ChirpPlan plan = plan_chirp(spec, budget);
  const Curve curve =
      curves::gen_chirp_graph(spec, 1.0, curves::Sampling{budget, plan.max_chord}, plan.tau_end);
  return fit_dimension(box_count(curve, ladder_for_curve(curve)), policy);
}

}  // namespace spiraldim::fractal
