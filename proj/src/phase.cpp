#include "spiraldim/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "spiraldim/error.hpp"

namespace spiraldim::phase {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Angle made increasing along the curve (sign flipped for clockwise curves).
struct Oriented {
  std::vector<double> psi;
  std::vector<double> r;
};

Oriented oriented(const PolarProfile& p) {
  Oriented o;
  const double sgn = p.phis.back() >= p.phis.front() ? 1.0 : -1.0;
  // Keep first visits only so that psi is strictly increasing.
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.phis.size(); ++i) {
    const double v = sgn * p.phis[i];
    if (v > best) {
      best = v;
      o.psi.push_back(v);
      o.r.push_back(p.radii[i]);
    }
  }
  return o;
}

/// Linear interpolation with a forward-only cursor (queries non-decreasing).
struct Cursor {
  const Oriented& o;
  std::size_t i = 0;

  double at(double x) {
    while (i + 2 < o.psi.size() && o.psi[i + 1] < x) ++i;
    const double w = (x - o.psi[i]) / (o.psi[i + 1] - o.psi[i]);
    return o.r[i] + w * (o.r[i + 1] - o.r[i]);
  }
};

double unit_param(double t, bool invert) { return invert ? 1.0 / std::abs(t) : std::abs(t); }

}  // namespace

PolarProfile unwrap_phase(const Curve& curve) {
  require(curve.ambient() == 2, "unwrap_phase needs a planar curve");
  PolarProfile p;
  p.open_tail = curve.open_tail();
  const std::size_t n = curve.size();
  p.phis.reserve(n);
  p.radii.reserve(n);
  p.params.assign(curve.params().begin(), curve.params().end());
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = curve.coord(i, 0), y = curve.coord(i, 1);
    const double r = std::hypot(x, y);
    require(r > 0.0, "unwrap_phase: sample " + std::to_string(i) + " lies at the origin");
    const double a = std::atan2(y, x);
    if (i == 0) {
      p.phis.push_back(a);
    } else {
      double d = a - prev;
      d -= kTwoPi * std::round(d / kTwoPi);
      if (std::abs(d) >= kPi * (1.0 - 1e-12))
        throw UnderSampledError("unwrap_phase: angular step of pi or more at sample " +
                                std::to_string(i));
      p.phis.push_back(p.phis.back() + d);
    }
    prev = a;
    p.radii.push_back(r);
  }
  return p;
}

std::vector<Wave> local_waves(const Oriented& o, double sgn, double rel_tol) {
  std::vector<Wave> waves;
  std::size_t i = 0;
  const std::size_t n = o.r.size();
  while (i + 1 < n) {
    if (!(o.r[i + 1] > o.r[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j + 1 < n && o.r[j + 1] > o.r[j]) ++j;
    const double rise = (o.r[j] - o.r[i]) / o.r[i];
    if (rise > rel_tol) waves.push_back({sgn * o.psi[i], sgn * o.psi[j], rise});
    i = j;
  }
  return waves;
}

WavyReport check_radially_decreasing(const PolarProfile& profile, int grid_per_turn,
                                     double rel_tol) {
  require(grid_per_turn >= 8, "check_radially_decreasing: grid too coarse");
  require(profile.phis.size() >= 2, "check_radially_decreasing: empty profile");
  const Oriented o = oriented(profile);
  const double span = o.psi.back() - o.psi.front();
  require(span >= 3.0 * kTwoPi, "check_radially_decreasing: profile spans fewer than 3 turns");
  const double sgn = profile.phis.back() >= profile.phis.front() ? 1.0 : -1.0;

  WavyReport rep;
  const double step = kTwoPi / grid_per_turn;
  const double start = o.psi.front() + kTwoPi;
  const auto total = static_cast<std::size_t>(std::floor((o.psi.back() - start) / step)) + 1;
  Cursor now{o}, back{o};
  bool in_run = false;
  double run_start = 0.0, run_end = 0.0;
  for (std::size_t g = 0; g < total; ++g) {
    const double psi = start + static_cast<double>(g) * step;
    const double r1 = now.at(psi);
    const double r0 = back.at(psi - kTwoPi);
    const bool bad = r1 > r0 * (1.0 + rel_tol);
    if (bad) {
      rep.max_rise = std::max(rep.max_rise, r1 - r0);
      if (!in_run) {
        in_run = true;
        run_start = psi;
      }
      run_end = psi;
    }
    if ((!bad || g + 1 == total) && in_run) {
      rep.violation_intervals.emplace_back(sgn * run_start, sgn * run_end);
      in_run = false;
    }
  }
  rep.violation_count = rep.violation_intervals.size();
  rep.waves = local_waves(o, sgn, rel_tol);
  rep.wave_count = rep.waves.size();
  for (const Wave& w : rep.waves) rep.max_wave_rise = std::max(rep.max_wave_rise, w.rel_rise);
  return rep;
}

ReturnSequence poincare_sequence(const PolarProfile& profile, double section_angle) {
  const std::size_t n = profile.phis.size();
  require(n >= 5, "poincare_sequence: profile too short");
  ReturnSequence seq;
  seq.section_angle = section_angle;
  const auto& ph = profile.phis;
  const auto& r = profile.radii;
  auto level_index = [&](double phi) { return std::floor((phi - section_angle) / kTwoPi); };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double k0 = level_index(ph[i]), k1 = level_index(ph[i + 1]);
    if (k0 == k1) continue;
    // Between samples the angle moves by less than pi, so one level at most.
    const double level = section_angle + kTwoPi * std::max(k0, k1);
    // Local window of 4 samples around the crossing, angle made increasing.
    const std::size_t lo = i >= 1 ? i - 1 : 0;
    const std::size_t hi = std::min(n - 1, lo + 3);
    std::vector<double> xs, ys;
    const double sgn = ph[i + 1] > ph[i] ? 1.0 : -1.0;
    bool monotone = true;
    for (std::size_t j = lo; j <= hi; ++j) {
      xs.push_back(sgn * ph[j]);
      ys.push_back(r[j]);
      if (xs.size() >= 2 && !(xs[xs.size() - 1] > xs[xs.size() - 2])) monotone = false;
    }
    double radius;
    if (monotone) {
      radius = regression::Pchip(xs, ys)(sgn * level);
    } else {
      const double w = (level - ph[i]) / (ph[i + 1] - ph[i]);
      radius = r[i] + w * (r[i + 1] - r[i]);
    }
    // Fourth difference of r around the crossing bounds the cubic error.
    if (i >= 2 && i + 2 < n) {
      const double d4 = r[i - 2] - 4 * r[i - 1] + 6 * r[i] - 4 * r[i + 1] + r[i + 2];
      seq.interpolation_error = std::max(seq.interpolation_error, std::abs(d4) / 16.0);
    }
    seq.radii.push_back(radius);
    seq.phis.push_back(level);
  }
  if (seq.radii.size() < 10)
    throw PreconditionError("poincare_sequence: only " + std::to_string(seq.radii.size()) +
                            " crossings of the section; at least 10 are required");
  if (seq.radii.front() < seq.radii.back()) {
    std::reverse(seq.radii.begin(), seq.radii.end());
    std::reverse(seq.phis.begin(), seq.phis.end());
  }
  for (std::size_t k = 0; k + 1 < seq.radii.size(); ++k)
    if (!(seq.radii[k + 1] < seq.radii[k])) ++seq.violations;
  return seq;
}

ExponentEstimate fit_return_exponent(const ReturnSequence& seq) {
  require(seq.radii.size() >= 11, "fit_return_exponent: need at least 10 returns");
  std::vector<double> x, y;
  for (std::size_t k = 0; k + 1 < seq.radii.size(); ++k) {
    const double d = seq.radii[k + 1] - seq.radii[k];
    if (!(d < 0.0))
      throw MixedSignError("fit_return_exponent: d(r_n) = " + num(d) + " >= 0 at return " +
                           std::to_string(k) + " (r_n = " + num(seq.radii[k]) + ")");
    x.push_back(std::log(seq.radii[k]));
    y.push_back(std::log(-d));
  }
  const regression::LineFit f = regression::fit_line(x, y);
  return {f.slope, std::max(2.0 * f.slope_se, std::numeric_limits<double>::min()), x.size()};
}

ArcLengthReport arc_length_profile(const Curve& curve) {
  const std::size_t n = curve.size();
  require(n >= 10000, "arc_length_profile: need at least 10^4 samples");
  ArcLengthReport rep;
  rep.params.assign(curve.params().begin(), curve.params().end());
  rep.lengths.resize(n);
  // Kahan summation keeps the total exact to rounding for long curves.
  double sum = 0.0, comp = 0.0;
  rep.lengths[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const Point3 a = curve.point(i - 1), b = curve.point(i);
    const double c = std::hypot(b[0] - a[0], b[1] - a[1], b[2] - a[2]) - comp;
    const double t = sum + c;
    comp = (t - sum) - c;
    sum = t;
    rep.lengths[i] = sum;
  }
  rep.total_length = sum;
  if (!curve.open_tail()) {
    rep.verdict = "rectifiable";
    rep.limit = sum;
    return rep;
  }

  const bool invert = std::abs(curve.param(n - 1)) < std::abs(curve.param(0));
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = unit_param(curve.param(i), invert);
  require(u.front() > 0.0, "arc_length_profile: parameter must not start at 0");
  const double ua = u.front() + 0.7 * (u.back() - u.front());
  const double ub = u.back();
  constexpr int kWindows = 8;
  auto length_at = [&](double v) {
    const auto it = std::lower_bound(u.begin(), u.end(), v);
    if (it == u.begin()) return rep.lengths.front();
    if (it == u.end()) return rep.lengths.back();
    const auto j = static_cast<std::size_t>(it - u.begin());
    const double w = (v - u[j - 1]) / (u[j] - u[j - 1]);
    return rep.lengths[j - 1] + w * (rep.lengths[j] - rep.lengths[j - 1]);
  };
  std::vector<double> edges(kWindows + 1);
  for (int j = 0; j <= kWindows; ++j) edges[static_cast<std::size_t>(j)] = ua * std::pow(ub / ua, double(j) / kWindows);
  std::vector<double> lx, ly, dl;
  for (int j = 0; j < kWindows; ++j) {
    const double d = length_at(edges[static_cast<std::size_t>(j) + 1]) - length_at(edges[static_cast<std::size_t>(j)]);
    require(d > 0.0, "arc_length_profile: tail windows hold no length");
    dl.push_back(d);
    lx.push_back(0.5 * (std::log(edges[static_cast<std::size_t>(j)]) + std::log(edges[static_cast<std::size_t>(j) + 1])));
    ly.push_back(std::log(d));
  }
  const regression::LineFit f = regression::fit_line(lx, ly);
  rep.band = std::max(2.0 * f.slope_se, 1e-12);
  const double s = f.slope;
  if (std::abs(s) <= rep.band) {
    rep.verdict = "borderline";
    rep.tail_exponent = s;
    rep.limit = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  if (s > 0.0) {
    rep.verdict = "nonrectifiable";
    rep.tail_exponent = s;
    rep.limit = std::numeric_limits<double>::infinity();
    return rep;
  }
  const double eta = -s;
  const double q = std::pow(ub / ua, 1.0 / kWindows);
  const double qe = std::pow(q, eta) - 1.0;
  // Remainder beyond an edge w is c w^-eta = (increment over the window ending at w) / (q^eta - 1).
  const double lim1 = length_at(ub) + dl[kWindows - 1] / qe;
  const double lim2 = length_at(edges[kWindows - 1]) + dl[kWindows - 2] / qe;
  rep.tail_exponent = eta;
  rep.limit = lim1;
  rep.limit_stability = std::abs(lim1 - lim2) / lim1;
  rep.verdict = rep.limit_stability < 0.01 ? "rectifiable" : "borderline";
  return rep;
}

void SurfaceSpec::validate() const {
  require(beta > 0.0, "surface beta must be positive");
  require(coefficient > 0.0, "surface coefficient must be positive");
  require(derivative_bound > 0.0, "surface derivative bound must be positive");
  require(coefficient * beta <= derivative_bound * (1.0 + 1e-12),
          "surface violates |g'(r)| <= D r^(beta-1): coefficient*beta = " +
              num(coefficient * beta) + " > D = " + num(derivative_bound));
}

double SurfaceSpec::g(double r) const { return coefficient * std::pow(r, beta); }

Curve lift_to_surface(const PolarProfile& profile, const SurfaceSpec& surface) {
  surface.validate();
  const std::size_t n = profile.phis.size();
  require(n >= 2, "lift_to_surface: profile too short");
  std::vector<double> coords;
  coords.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = profile.radii[i];
    require(r > 0.0, "lift_to_surface: radius must be positive");
    coords.push_back(r * std::cos(profile.phis[i]));
    coords.push_back(r * std::sin(profile.phis[i]));
    coords.push_back(surface.g(r));
  }
  Provenance prov{"surface_lift", {}};
  prov.add("beta", surface.beta);
  prov.add("coefficient", surface.coefficient);
  prov.add("derivative_bound", surface.derivative_bound);
  return Curve::with_measured_chord(3, profile.params, std::move(coords), std::move(prov),
                                    profile.open_tail);
}

BilipschitzScan bilipschitz_ratio_scan(const Curve& curve3d, std::size_t pairs_budget,
                                       int thresholds, std::uint64_t seed) {
  require(curve3d.ambient() == 3, "bilipschitz_ratio_scan needs a spatial curve");
  require(thresholds >= 2, "bilipschitz_ratio_scan: need at least 2 thresholds");
  require(pairs_budget >= static_cast<std::size_t>(3 * thresholds),
          "bilipschitz_ratio_scan: pairs budget too small");
  const PolarProfile prof = unwrap_phase(project(curve3d, Plane::kXY));
  const std::size_t n = curve3d.size();
  const double sgn = prof.phis.back() >= prof.phis.front() ? 1.0 : -1.0;
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = sgn * prof.phis[i];
  for (std::size_t i = 1; i < n; ++i) psi[i] = std::max(psi[i], psi[i - 1]);

  const bool invert = std::abs(curve3d.param(n - 1)) < std::abs(curve3d.param(0));
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = unit_param(curve3d.param(i), invert);

  BilipschitzScan scan;
  scan.pair_class_max.assign(3, 0.0);
  const std::size_t per = pairs_budget / static_cast<std::size_t>(thresholds);
  const double u0 = u.front(), u1 = u.back();
  for (int k = 0; k < thresholds; ++k) {
    // Thresholds spread geometrically over the first 3/4 of the range.
    const double T = u0 * std::pow((u0 + 0.75 * (u1 - u0)) / u0, double(k) / (thresholds - 1));
    const auto first = static_cast<std::size_t>(std::lower_bound(u.begin(), u.end(), T) - u.begin());
    scan.thresholds.push_back(T);
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
    double best = 0.0;
    for (std::size_t p = 0; p < per; ++p) {
      const int cls = static_cast<int>(p % 3);
      std::uniform_int_distribution<std::size_t> pick(first, n - 2);
      const std::size_t i = pick(rng);
      double lo = 0.0, hi = 0.0;
      if (cls == 0) {
        lo = 0.0;
        hi = kPi / 3.0;
      } else if (cls == 1) {
        lo = kPi / 3.0;
        hi = kTwoPi + kPi / 3.0;
      } else {
        lo = kTwoPi + kPi / 3.0;
        hi = 4.0 * kTwoPi;
      }
      std::uniform_real_distribution<double> dphi(lo, hi);
      const double target = psi[i] + dphi(rng);
      auto it = std::lower_bound(psi.begin() + static_cast<std::ptrdiff_t>(i) + 1, psi.end(), target);
      if (it == psi.end()) continue;
      const auto j = static_cast<std::size_t>(it - psi.begin());
      const Point3 a = curve3d.point(i), b = curve3d.point(j);
      const double planar = std::hypot(a[0] - b[0], a[1] - b[1]);
      if (!(planar > 0.0)) continue;
      const double ratio = std::abs(a[2] - b[2]) / planar;
      best = std::max(best, ratio);
      scan.pair_class_max[static_cast<std::size_t>(cls)] =
          std::max(scan.pair_class_max[static_cast<std::size_t>(cls)], ratio);
    }
    scan.max_ratio.push_back(best);
    scan.overall_max = std::max(scan.overall_max, best);
  }
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < scan.thresholds.size(); ++k)
    if (scan.max_ratio[k] > 0.0) {
      lx.push_back(std::log(scan.thresholds[k]));
      ly.push_back(std::log(scan.max_ratio[k]));
    }
  if (lx.size() >= 3) {
    const regression::LineFit f = regression::fit_line(lx, ly);
    scan.trend_slope = f.slope;
    const double band = 2.0 * f.slope_se;
    scan.trend = f.slope < -band ? "decreasing" : (f.slope > band ? "increasing" : "flat");
  } else {
    scan.trend = "flat";
  }
  return scan;
}

Curve project(const Curve& curve3d, Plane plane) {
  require(curve3d.ambient() == 3, "project needs a spatial curve");
  int a = 0, b = 1;
  const char* name = "xy";
  if (plane == Plane::kXZ) {
    b = 2;
    name = "xz";
  } else if (plane == Plane::kYZ) {
    a = 1;
    b = 2;
    name = "yz";
  }
  std::vector<double> coords;
  coords.reserve(2 * curve3d.size());
  for (std::size_t i = 0; i < curve3d.size(); ++i) {
    coords.push_back(curve3d.coord(i, a));
    coords.push_back(curve3d.coord(i, b));
  }
  Provenance prov = curve3d.provenance();
  prov.add("projection", name);
  std::vector<double> params(curve3d.params().begin(), curve3d.params().end());
  // Dropping a coordinate never lengthens a chord.
  return Curve(2, std::move(params), std::move(coords), curve3d.max_chord(), std::move(prov),
               curve3d.open_tail());
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::kNonAccumulating:
      return "non-accumulating";
    case Regime::kWavySpiral:
      return "wavy-spiral";
    case Regime::kSpiral:
      return "spiral";
    case Regime::kInconclusive:
      break;
  }
  return "inconclusive";
}

Classification classify_curve(const Curve& curve, double alpha, double beta) {
  require(alpha > 0.0 && beta > 0.0, "classify_curve: alpha and beta must be positive");
  Classification c;
  const PolarProfile prof = unwrap_phase(curve);
  const double sgn = prof.phis.back() >= prof.phis.front() ? 1.0 : -1.0;
  const double psi0 = sgn * prof.phis.front();
  auto turn_of = [&](double phi) { return std::floor((sgn * phi - psi0) / kTwoPi); };
  std::vector<double> turn_max;
  for (std::size_t i = 0; i < prof.phis.size(); ++i) {
    const double turn = turn_of(prof.phis[i]);
    if (turn < 0.0) continue;
    const auto k = static_cast<std::size_t>(turn);
    if (k >= turn_max.size()) turn_max.resize(k + 1, 0.0);
    turn_max[k] = std::max(turn_max[k], prof.radii[i]);
  }
  // The last turn is usually incomplete.
  if (!turn_max.empty()) turn_max.pop_back();
  c.turns = turn_max.size();
  constexpr std::size_t kTail = 10;
  if (turn_max.size() < kTail + 2) {
    c.regime = Regime::kInconclusive;
    return c;
  }
  c.turn_max_radius.assign(turn_max.end() - kTail, turn_max.end());
  std::size_t rises = 0;
  std::vector<double> drops;
  for (std::size_t k = 0; k + 1 < kTail; ++k) {
    if (!(c.turn_max_radius[k + 1] < c.turn_max_radius[k])) ++rises;
    drops.push_back(1.0 - c.turn_max_radius[k + 1] / c.turn_max_radius[k]);
  }
  if (rises > 0) {
    c.regime = rises == kTail - 1 ? Regime::kNonAccumulating : Regime::kInconclusive;
    return c;
  }
  std::nth_element(drops.begin(), drops.begin() + drops.size() / 2, drops.end());
  c.turn_decay = drops[drops.size() / 2];

  const WavyReport w = check_radially_decreasing(prof);
  c.violations = w.violation_count;
  const double tail_turn = static_cast<double>(turn_max.size() - kTail);
  for (const Wave& wave : w.waves)
    if (turn_of(wave.phi_begin) >= tail_turn && turn_of(wave.phi_begin) < tail_turn + kTail)
      c.wave_rise = std::max(c.wave_rise, wave.rel_rise);
  c.regime = c.violations > 0 || c.wave_rise > c.turn_decay ? Regime::kWavySpiral : Regime::kSpiral;
  return c;
}

regression::LineFit fit_envelope_exponent(const Curve& graph, int abscissa_axis,
                                          int ordinate_axis) {
  require(abscissa_axis >= 0 && abscissa_axis < graph.ambient() && ordinate_axis >= 0 &&
              ordinate_axis < graph.ambient() && abscissa_axis != ordinate_axis,
          "fit_envelope_exponent: bad axes");
  std::vector<double> x, y;
  double best = 0.0, best_at = 0.0;
  bool have = false;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const double v = graph.coord(i, ordinate_axis);
    if (i > 0 && (v > 0.0) != (graph.coord(i - 1, ordinate_axis) > 0.0)) {
      if (have && best > 0.0 && best_at > 0.0) {
        x.push_back(std::log(best_at));
        y.push_back(std::log(best));
      }
      best = 0.0;
      have = true;  // the first segment may be partial, so it is skipped
    }
    if (std::abs(v) > best) {
      best = std::abs(v);
      best_at = std::abs(graph.coord(i, abscissa_axis));
    }
  }
  require(x.size() >= 3, "fit_envelope_exponent: fewer than 3 complete oscillations");
  return regression::fit_line(x, y);
}

}  // namespace spiraldim::phase
