#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spiraldim/curves.hpp"
#include "spiraldim/error.hpp"
#include "spiraldim/jet.hpp"
#include "spiraldim/ode.hpp"
#include "support.hpp"

using namespace spiraldim;
using curves::Sampling;

TEST_CASE("jet power and log derivatives") {
  const Jet p = Jet::power(2.0, -0.5);
  CHECK(p[0] == doctest::Approx(std::pow(2.0, -0.5)));
  CHECK(p[1] == doctest::Approx(-0.5 * std::pow(2.0, -1.5)));
  CHECK(p[2] == doctest::Approx(0.75 * std::pow(2.0, -2.5)));
  CHECK(p[3] == doctest::Approx(-1.875 * std::pow(2.0, -3.5)));
  const Jet l = Jet::log(3.0);
  CHECK(l[1] == doctest::Approx(1.0 / 3.0));
  CHECK(l[3] == doctest::Approx(2.0 / 27.0));
}

TEST_CASE("jet product follows Leibniz") {
  // t^2 * log t at t = 2
  const Jet f = Jet::power(2.0, 2.0) * Jet::log(2.0);
  const double L = std::log(2.0);
  CHECK(f[0] == doctest::Approx(4.0 * L));
  CHECK(f[1] == doctest::Approx(2.0 * 2.0 * L + 2.0));
  CHECK(f[2] == doctest::Approx(2.0 * L + 3.0));
  CHECK(f[3] == doctest::Approx(2.0 / 2.0));
  const Jet g = ipow(Jet::log(2.0), 3);
  CHECK(g[0] == doctest::Approx(L * L * L));
  CHECK(g[1] == doctest::Approx(3.0 * L * L / 2.0));
}

TEST_CASE("dopri5 reproduces exponential decay") {
  ode::State<1> y{1.0};
  double last_t = 0.0, last_y = 1.0;
  const auto stats = ode::integrate_dopri5<1>(
      [](double, const ode::State<1>& v) { return ode::State<1>{-v[0]}; }, 0.0, y, 5.0,
      {1e-10, 1e-12}, [](double, const ode::State<1>&) { return 1.0; },
      [&](double t, const ode::State<1>& v) {
        last_t = t;
        last_y = v[0];
        return ode::Verdict::kAccept;
      });
  CHECK(last_t == 5.0);
  CHECK(last_y == doctest::Approx(std::exp(-5.0)).epsilon(1e-8));
  CHECK(stats.accepted > 0);
}

TEST_CASE("dopri5 integrates backward") {
  double last_y = 0.0;
  ode::integrate_dopri5<1>(
      [](double, const ode::State<1>& v) { return ode::State<1>{v[0]}; }, 1.0, ode::State<1>{1.0},
      0.0, {1e-10, 1e-12}, [](double, const ode::State<1>&) { return 0.1; },
      [&](double, const ode::State<1>& v) {
        last_y = v[0];
        return ode::Verdict::kAccept;
      });
  CHECK(last_y == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("spiral generator respects chord and radius law") {
  curves::PowerSpiralSpec s;
  s.alpha = 0.5;
  const Curve c = curves::gen_power_spiral(s, 0.05, {1'000'000, 1e-3});
  CHECK(c.measured_max_chord() <= 1e-3 * (1 + 1e-12));
  CHECK(c.ambient() == 2);
  for (std::size_t i = 0; i < c.size(); i += c.size() / 50) {
    const double phi = c.param(i);
    const Point3 p = c.point(i);
    CHECK(std::hypot(p[0], p[1]) == doctest::Approx(std::pow(phi, -0.5)).epsilon(1e-12));
  }
  const Point3 end = c.point(c.size() - 1);
  CHECK(std::hypot(end[0], end[1]) <= 0.05 * (1 + 1e-9));
  CHECK(curves::power_spiral_sample_count(s, 0.05, 1e-3, 10'000'000) == c.size());
}

TEST_CASE("spiral generator reports budget exhaustion") {
  curves::PowerSpiralSpec s;
  CHECK_THROWS_AS(curves::gen_power_spiral(s, 1e-3, {1000, 1e-4}), BudgetError);
}

TEST_CASE("mirrored spiral negates y") {
  curves::PowerSpiralSpec s;
  const Curve a = curves::gen_power_spiral(s, 0.2, {100'000, 1e-3});
  s.mirror = true;
  const Curve b = curves::gen_power_spiral(s, 0.2, {100'000, 1e-3});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); i += 97) {
    CHECK(a.coord(i, 0) == b.coord(i, 0));
    CHECK(a.coord(i, 1) == -b.coord(i, 1));
  }
}

TEST_CASE("chirp graph samples the closed form in decreasing tau") {
  curves::ChirpSpec s;
  s.alpha = 0.5;
  s.beta = 1.0;
  const Curve c = curves::gen_chirp_graph(s, 1.0, {200'000, 1e-3}, 0.05);
  CHECK(c.param(0) > c.param(1));
  CHECK(c.measured_max_chord() <= 1e-3 * (1 + 1e-12));
  for (std::size_t i = 0; i < c.size(); i += 101)
    CHECK(c.coord(i, 1) == doctest::Approx(std::sqrt(c.coord(i, 0)) * std::sin(1.0 / c.coord(i, 0))));
  CHECK(c.coord(c.size() - 1, 0) <= 0.05 * (1 + 1e-9));
}

TEST_CASE("chirp spec validation") {
  curves::ChirpSpec s;
  s.alpha = -1.0;
  CHECK_THROWS_AS(s.validate(), PreconditionError);
}

TEST_CASE("family trajectory matches closed form and has derivative y = x'") {
  curves::TrajectoryFamilySpec s;
  const Curve c = curves::gen_phase_trajectory(s, 200.0, {1'000'000, 1e-3});
  CHECK(c.ambient() == 3);
  for (std::size_t i = c.size() / 40; i < c.size(); i += c.size() / 40) {
    const double t = c.param(i);
    const Point3 q = curves::phase_trajectory_point(s, t);
    CHECK(c.coord(i, 0) == q[0]);
    CHECK(c.coord(i, 2) == doctest::Approx(std::pow(t, -s.gamma)));
    // x' by central differences
    const double h = 1e-5;
    const double d = (curves::phase_trajectory_point(s, t + h)[0] -
                      curves::phase_trajectory_point(s, t - h)[0]) / (2 * h);
    CHECK(c.coord(i, 1) == doctest::Approx(d).epsilon(1e-6));
  }
}

TEST_CASE("family t0 must exceed e") {
  curves::TrajectoryFamilySpec s;
  s.t0 = 2.0;
  CHECK_THROWS_AS(s.validate(100.0), PreconditionError);
}

TEST_CASE("cubic system integration follows the exact solution") {
  curves::TrajectoryFamilySpec s;
  s.alpha = 0.5;
  s.gamma = 1.0;
  const Point3 p0 = curves::cubic_system_solution(s, s.t0);
  const auto ir = curves::integrate_cubic_system(s, {p0[0], p0[1], p0[2]}, {s.t0, 4 * s.t0},
                                                 {1e-11, 1e-13}, {1'000'000, 1e-3});
  REQUIRE_FALSE(ir.truncated);
  double worst = 0.0;
  for (std::size_t i = 0; i < ir.curve.size(); ++i) {
    const Point3 e = curves::cubic_system_solution(s, ir.curve.param(i));
    const Point3 q = ir.curve.point(i);
    worst = std::max(worst, std::hypot(q[0] - e[0], q[1] - e[1], q[2] - e[2]));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("normal form backward integration follows the radial law") {
  curves::NormalFormSpec s;  // l = 1, a0 = 0, b2 = -1
  const auto ir = curves::integrate_normal_form(s, {1.0, 0.0, -1.0}, {0.0, -50.0}, {1e-10, 1e-12},
                                                {1'000'000, 1e-3});
  REQUIRE_FALSE(ir.truncated);
  // r^-2 = 2 (s + 1/2), z = -1 / (s + 1)
  const std::size_t i = ir.curve.size() - 1;
  const double sb = -ir.curve.param(i);
  const Point3 q = ir.curve.point(i);
  CHECK(std::hypot(q[0], q[1]) == doctest::Approx(1.0 / std::sqrt(2.0 * (sb + 0.5))).epsilon(1e-7));
  CHECK(q[2] == doctest::Approx(-1.0 / (sb + 1.0)).epsilon(1e-7));
}

TEST_CASE("reflected solution is x(1/tau)") {
  curves::TrajectoryFamilySpec s;
  s.t0 = 3.0;
  const Curve c = curves::gen_reflected_solution(s, 100.0, {1'000'000, 1e-3});
  for (std::size_t i = 0; i < c.size(); i += 53) {
    const double tau = c.coord(i, 0);
    CHECK(c.coord(i, 1) == doctest::Approx(curves::phase_trajectory_point(s, 1.0 / tau)[0]));
  }
}

TEST_CASE("curve construction rejects bad input") {
  CHECK_THROWS_AS(Curve(2, {0.0, 1.0}, {0.0, 0.0, 1.0, 0.0}, 0.5, {}), PreconditionError);
  CHECK_THROWS_AS(Curve(2, {0.0, 0.0}, {0.0, 0.0, 0.1, 0.0}, 0.5, {}), PreconditionError);
  CHECK_THROWS_AS(Curve(4, {0.0, 1.0}, {0, 0, 0, 0, 0, 0, 0, 0}, 1.0, {}), PreconditionError);
}

TEST_CASE("rescale, translate, reversed, clip") {
  const Curve c = testing::segment(0, 0, 1, 0, 101);
  CHECK(rescale(c, 2.0).diameter() == doctest::Approx(2.0));
  CHECK(translate(c, {1.0, 0.0, 0.0}).coord(0, 0) == 1.0);
  CHECK(reversed(c).coord(0, 0) == 1.0);
  const Curve k = clip_to_ball(c, 0.5);
  CHECK(k.max_radius() <= 0.5);
  CHECK(k.size() == 51);
}
