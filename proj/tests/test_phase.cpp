#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spiraldim/curves.hpp"
#include "spiraldim/error.hpp"
#include "spiraldim/fractal.hpp"
#include "spiraldim/phase.hpp"
#include "spiraldim/regression.hpp"
#include "support.hpp"

using namespace spiraldim;
using std::numbers::pi;

namespace {

Curve power_spiral(double alpha, double r_min, double chord, bool mirror = false) {
  curves::PowerSpiralSpec s;
  s.alpha = alpha;
  s.mirror = mirror;
  return curves::gen_power_spiral(s, r_min, {5'000'000, chord});
}

Curve phase_curve(double alpha, double beta, double t_end) {
  curves::ChirpSpec s;
  s.alpha = alpha;
  s.beta = beta;
  return curves::gen_chirp_phase_curve(s, 1.0, t_end, {5'000'000, 1e-3});
}

}  // namespace

TEST_CASE("circle unwraps to one turn of radius 1") {
  const auto p = phase::unwrap_phase(testing::circle(1.0, 128));
  CHECK(p.phis.back() - p.phis.front() == doctest::Approx(2 * pi).epsilon(1e-9));
  for (double r : p.radii) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mirrored curve has negated angles") {
  const auto a = phase::unwrap_phase(power_spiral(0.5, 0.3, 1e-3));
  const auto b = phase::unwrap_phase(power_spiral(0.5, 0.3, 1e-3, true));
  REQUIRE(a.phis.size() == b.phis.size());
  for (std::size_t i = 0; i < a.phis.size(); i += 31) CHECK(b.phis[i] == doctest::Approx(-a.phis[i]));
}

TEST_CASE("property: rewrapping the profile reconstructs the points") {
  const Curve c = power_spiral(0.5, 0.05, 1e-3);
  const auto p = phase::unwrap_phase(c);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double x = p.radii[i] * std::cos(p.phis[i]), y = p.radii[i] * std::sin(p.phis[i]);
    worst = std::max(worst, std::hypot(x - c.coord(i, 0), y - c.coord(i, 1)) / p.radii[i]);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("unwrap rejects under-sampled curves and the origin") {
  const Curve coarse = Curve::with_measured_chord(2, {0, 1, 2}, {1, 0, -1, 0, 1, 0}, {});
  CHECK_THROWS_AS(phase::unwrap_phase(coarse), UnderSampledError);
  const Curve origin = testing::segment(0, 0, 1, 0, 10);
  CHECK_THROWS_AS(phase::unwrap_phase(origin), PreconditionError);
}

TEST_CASE("family phase angle follows t up to O(1/t)") {
  curves::TrajectoryFamilySpec s;
  s.alpha = 0.5;
  const Curve c = phase::project(curves::gen_phase_trajectory(s, 500.0, {1'000'000, 1e-3}), phase::Plane::kXY);
  const auto p = phase::unwrap_phase(c);
  // orientation of the closed form x = p sin t: angle = pi/2 - t (mod 2 pi)
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double t = c.param(i);
    const double d = std::remainder(p.phis[i] - (pi / 2 - t), 2 * pi);
    worst = std::max(worst, std::abs(d) * t);
  }
  CHECK(worst < 1.0);
}

TEST_CASE("property: f comparable to phi^-alpha on the family") {
  for (double alpha : {0.25, 0.5, 0.75}) {
    curves::TrajectoryFamilySpec s;
    s.alpha = alpha;
    s.t0 = 3.0;
    const Curve c = phase::project(curves::gen_phase_trajectory(s, 3000.0, {5'000'000, 1e-3}), phase::Plane::kXY);
    const auto p = phase::unwrap_phase(c);
    std::vector<double> x, y;
    // the angle lags t by a bounded offset, negligible relative to phi from t = 30 on
    for (std::size_t i = 0; i < p.phis.size(); i += 7) {
      if (c.param(i) < 30.0) continue;
      x.push_back(std::log(std::abs(p.phis[i])));
      y.push_back(std::log(p.radii[i]));
    }
    CHECK(regression::fit_line(x, y).slope == doctest::Approx(-alpha).epsilon(0.03 / alpha));
  }
}

TEST_CASE("power spiral and circle are radially decreasing") {
  const auto r = phase::check_radially_decreasing(phase::unwrap_phase(power_spiral(0.5, 0.05, 1e-3)));
  CHECK(r.violation_count == 0);
  CHECK(r.wave_count == 0);
  const auto c = phase::check_radially_decreasing(phase::unwrap_phase(testing::circle(1.0, 2000, 4.0)));
  CHECK(c.violation_count == 0);
  CHECK(c.max_rise == 0.0);
  CHECK_THROWS_AS(phase::check_radially_decreasing(phase::unwrap_phase(testing::circle(1.0, 200, 2.0))),
                  PreconditionError);
}

TEST_CASE("wavy phase curve shows radial increases") {
  const auto r = phase::check_radially_decreasing(phase::unwrap_phase(phase_curve(0.5, 0.75, 2000.0)));
  CHECK(r.violation_count + r.wave_count > 0);
  CHECK(r.violation_count == r.violation_intervals.size());
  CHECK(r.wave_count == r.waves.size());
  CHECK(r.max_wave_rise > 0.0);
}

TEST_CASE("classify_curve regimes") {
  CHECK(phase::classify_curve(phase_curve(0.5, 1.75, 40.0), 0.5, 1.75).regime ==
        phase::Regime::kNonAccumulating);
  CHECK(phase::classify_curve(phase_curve(0.5, 0.75, 2000.0), 0.5, 0.75).regime ==
        phase::Regime::kWavySpiral);
  CHECK(phase::classify_curve(phase_curve(0.5, 1.0, 400.0), 0.5, 1.0).regime == phase::Regime::kSpiral);
  CHECK(phase::regime_name(phase::Regime::kWavySpiral) == "wavy-spiral");
}

TEST_CASE("poincare radii of r = 1/phi match the closed form") {
  const auto p = phase::unwrap_phase(power_spiral(1.0, 0.005, 1e-4));
  const auto seq = phase::poincare_sequence(p, 0.0);
  REQUIRE(seq.radii.size() >= 10);
  for (std::size_t n = 0; n < seq.radii.size(); ++n) {
    const double exact = 1.0 / seq.phis[n];
    CHECK(std::abs(seq.radii[n] - exact) <= std::max(1e-8, 4 * seq.interpolation_error));
    CHECK(std::remainder(seq.phis[n], 2 * pi) == doctest::Approx(0.0).epsilon(1e-9));
  }
  CHECK(seq.violations == 0);
  // reversed input gives the same radii
  const auto back = phase::poincare_sequence(phase::unwrap_phase(reversed(power_spiral(1.0, 0.005, 1e-4))), 0.0);
  REQUIRE(back.radii.size() == seq.radii.size());
  for (std::size_t n = 0; n < seq.radii.size(); ++n) CHECK(back.radii[n] == doctest::Approx(seq.radii[n]).epsilon(1e-9));
}

TEST_CASE("property: returns of power spirals strictly decrease") {
  const struct {
    double alpha, r_min, chord;
  } cases[] = {{0.5, 0.01, 1e-4}, {1.0, 0.01, 1e-4}, {2.0, 2e-5, 1e-5}};
  for (const auto& k : cases) {
    const auto seq = phase::poincare_sequence(phase::unwrap_phase(power_spiral(k.alpha, k.r_min, k.chord)), 1.0);
    CHECK(seq.radii.size() >= 10);
    for (std::size_t n = 0; n + 1 < seq.radii.size(); ++n) CHECK(seq.radii[n + 1] < seq.radii[n]);
  }
}

TEST_CASE("poincare needs ten crossings") {
  const auto p = phase::unwrap_phase(testing::circle(1.0, 4000, 5.0));
  CHECK_THROWS_AS(phase::poincare_sequence(p, 0.5), PreconditionError);
}

TEST_CASE("family returns decrease with exponent 1/alpha + 1") {
  curves::TrajectoryFamilySpec s;
  s.alpha = 0.5;
  const Curve c = phase::project(curves::gen_phase_trajectory(s, 2000.0, {5'000'000, 1e-4}), phase::Plane::kXY);
  const auto seq = phase::poincare_sequence(phase::unwrap_phase(c), 0.0);
  for (std::size_t n = 0; n + 1 < seq.radii.size(); ++n) CHECK(seq.radii[n + 1] - seq.radii[n] < 0.0);
  const auto e = phase::fit_return_exponent(seq);
  CHECK(std::abs(e.value - 3.0) <= 0.15);
}

TEST_CASE("harmonic radii give return exponent 2") {
  phase::ReturnSequence seq;
  for (int n = 100; n < 2000; ++n) seq.radii.push_back(1.0 / n);
  CHECK(phase::fit_return_exponent(seq).value == doctest::Approx(2.0).epsilon(0.01));
  seq.radii[50] = seq.radii[48];
  CHECK_THROWS_AS(phase::fit_return_exponent(seq), MixedSignError);
}

TEST_CASE("segment length is exact") {
  const auto r = phase::arc_length_profile(testing::segment(0, 0, 3, 4, 20'001));
  CHECK(r.verdict == "rectifiable");
  CHECK(r.total_length == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_THROWS_AS(phase::arc_length_profile(testing::segment(0, 0, 1, 0, 100)), PreconditionError);
}

TEST_CASE("spiral phi^-1/2 is nonrectifiable with length growing like phi^1/2") {
  const auto r = phase::arc_length_profile(power_spiral(0.5, 0.01, 1e-4));
  CHECK(r.verdict == "nonrectifiable");
  CHECK(std::abs(r.tail_exponent - 0.5) <= 0.1);
}

TEST_CASE("family with alpha = 2 is rectifiable") {
  curves::TrajectoryFamilySpec s;
  s.alpha = 2.0;
  s.gamma = 1.0;
  const auto r = phase::arc_length_profile(curves::gen_phase_trajectory(s, 2000.0, {5'000'000, 1e-5}));
  CHECK(r.verdict == "rectifiable");
  CHECK(r.limit_stability < 0.01);
  CHECK(std::abs(r.tail_exponent - 1.0) <= 0.2);
}

TEST_CASE("lifts onto Hoelder surfaces") {
  const auto planar = phase::unwrap_phase(power_spiral(2.0, 1e-4, 1e-5));
  for (double beta : {0.25, 0.125}) {
    phase::SurfaceSpec g;
    g.beta = beta;
    g.derivative_bound = beta;
    const Curve lifted = phase::lift_to_surface(planar, g);
    CHECK(lifted.ambient() == 3);
    CHECK(phase::arc_length_profile(lifted).verdict == "rectifiable");
  }
  phase::SurfaceSpec id;
  id.beta = 1.0;
  const Curve flat = power_spiral(2.0, 1e-4, 1e-5);
  const double planar_len = phase::arc_length_profile(flat).total_length;
  const auto lifted = phase::arc_length_profile(phase::lift_to_surface(planar, id));
  CHECK(lifted.verdict == "rectifiable");
  CHECK(lifted.total_length <= 2 * planar_len);
  phase::SurfaceSpec bad;
  bad.beta = -1.0;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("bi-Lipschitz ratio trends") {
  curves::TrajectoryFamilySpec s;
  s.alpha = 0.5;
  s.gamma = 1.0;
  auto scan = phase::bilipschitz_ratio_scan(curves::gen_phase_trajectory(s, 2000.0, {5'000'000, 1e-3}), 60'000);
  CHECK(scan.trend == "decreasing");
  s.gamma = 0.25;
  scan = phase::bilipschitz_ratio_scan(curves::gen_phase_trajectory(s, 2000.0, {5'000'000, 1e-3}), 60'000);
  CHECK(scan.trend == "increasing");
  // z = 0
  std::vector<double> t, xyz;
  const Curve sp = power_spiral(0.5, 0.1, 1e-3);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    t.push_back(sp.param(i));
    xyz.insert(xyz.end(), {sp.coord(i, 0), sp.coord(i, 1), 0.0});
  }
  scan = phase::bilipschitz_ratio_scan(Curve(3, t, xyz, sp.max_chord(), {}), 10'000);
  CHECK(scan.overall_max == 0.0);
}

TEST_CASE("projections drop one coordinate") {
  curves::TrajectoryFamilySpec s;
  const Curve c = curves::gen_phase_trajectory(s, 100.0, {1'000'000, 1e-3});
  const Curve xy = phase::project(c, phase::Plane::kXY);
  const Curve yz = phase::project(c, phase::Plane::kYZ);
  for (std::size_t i = 0; i < c.size(); i += 17) {
    CHECK(xy.coord(i, 0) == c.coord(i, 0));
    CHECK(xy.coord(i, 1) == c.coord(i, 1));
    CHECK(yz.coord(i, 0) == c.coord(i, 1));
    CHECK(yz.coord(i, 1) == c.coord(i, 2));
  }
  CHECK(xy.max_chord() == c.max_chord());
}

TEST_CASE("property: xy projection dimension equals the planar phase dimension") {
  curves::TrajectoryFamilySpec s;
  const Curve c = curves::gen_phase_trajectory(s, 3000.0, {5'000'000, 2e-4});
  const Curve xy = phase::project(c, phase::Plane::kXY);
  std::vector<double> t, pts;
  for (std::size_t i = 0; i < c.size(); ++i) {
    t.push_back(c.param(i));
    pts.insert(pts.end(), {c.coord(i, 0), c.coord(i, 1)});
  }
  const Curve planar = Curve::with_measured_chord(2, t, pts, {});
  const auto a = fractal::fit_dimension(fractal::box_count(xy, fractal::ladder_for_curve(xy)));
  const auto b = fractal::fit_dimension(fractal::box_count(planar, fractal::ladder_for_curve(planar)));
  CHECK(std::abs(a.value - b.value) <= std::max(a.band, b.band));
}

TEST_CASE("yz projection envelope exponent is alpha / gamma") {
  curves::TrajectoryFamilySpec s;
  s.alpha = 0.5;
  s.gamma = 1.0;
  s.t0 = 3.0;
  const Curve yz = phase::project(curves::gen_phase_trajectory(s, 1000.0, {5'000'000, 1e-3}), phase::Plane::kYZ);
  CHECK(std::abs(phase::fit_envelope_exponent(yz, 1, 0).slope - 0.5) <= 0.05);
}
