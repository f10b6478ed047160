#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <tuple>

#include "spiraldim/curves.hpp"
#include "spiraldim/error.hpp"
#include "spiraldim/experiments.hpp"
#include "spiraldim/fractal.hpp"
#include "support.hpp"

using namespace spiraldim;
using fractal::ScaleLadder;

namespace {

std::uint64_t brute_count(const Curve& c, double eps, const fractal::GridShift& shift) {
  std::set<std::tuple<long long, long long, long long>> cells;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point3 p = c.point(i);
    cells.emplace(static_cast<long long>(std::floor(p[0] / eps + shift[0])),
                  static_cast<long long>(std::floor(p[1] / eps + shift[1])),
                  c.ambient() == 3 ? static_cast<long long>(std::floor(p[2] / eps + shift[2])) : 0);
  }
  return cells.size();
}

const Curve& half_spiral() {
  static const Curve c = [] {
    curves::PowerSpiralSpec s;
    s.alpha = 0.5;
    const auto plan = experiments::plan_spiral(s, 1e-4, 0.1, 10'000'000);
    return curves::gen_power_spiral(s, plan.r_min, {10'000'000, 1e-4});
  }();
  return c;
}

}  // namespace

TEST_CASE("ladder construction and validation") {
  const ScaleLadder l = ScaleLadder::geometric(1.0, 0.5, 10);
  CHECK(l.size() == 10);
  CHECK(l.eps_min() == doctest::Approx(std::pow(0.5, 9)));
  CHECK_NOTHROW(l.validate());
  CHECK_THROWS_AS(ScaleLadder::geometric(1.0, 0.5, 5).validate(), PreconditionError);
  const ScaleLadder a = ScaleLadder::anchored_fine(1e-3, 0.5, 20, 1.0);
  CHECK(a.eps_min() == doctest::Approx(1e-3));
  CHECK(a.eps_max() <= 1.0);
  CHECK_THROWS_AS(ScaleLadder::anchored_fine(1e-3, 0.5, 20, 0.1), PreconditionError);
}

TEST_CASE("unit segment at eps 1/4") {
  const Curve c = testing::segment(0, 0, 1, 0, 10001);
  const ScaleLadder l = ScaleLadder::geometric(0.25 * 128, 0.5, 8);
  const auto counts = fractal::box_count(c, l);
  CHECK(counts.counts.back() == brute_count(c, 0.25, {}));
  CHECK((counts.counts.back() == 4 || counts.counts.back() == 5));
}

TEST_CASE("single point occupies one cell at every scale") {
  const Curve c = testing::single_point(0.3, 0.7);
  const auto counts = fractal::box_count(c, ScaleLadder::geometric(1.0, 0.5, 10));
  for (auto n : counts.counts) CHECK(n == 1);
}

TEST_CASE("box_count refuses scales below twice the chord") {
  const Curve c = testing::segment(0, 0, 1, 0, 11);
  try {
    fractal::box_count(c, ScaleLadder::geometric(1.0, 0.5, 10));
    FAIL("expected a refusal");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("0.2") != std::string::npos);
  }
}

TEST_CASE("property: box counts equal brute-force enumeration on small inputs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    curves::PowerSpiralSpec s;
    s.alpha = 0.25 + 0.75 * u(rng);
    s.mirror = trial % 2 == 1;
    const double chord = 2e-3 * (1.0 + u(rng));
    Curve c = curves::gen_power_spiral(s, 0.3 + 0.2 * u(rng), {10'000, chord});
    if (trial % 3 == 2) c = translate(c, {-0.37, 0.21, 0.0});
    const ScaleLadder l = ScaleLadder::anchored_fine(2.0 * c.max_chord() * (1.0 + u(rng)), 0.7, 12, 10.0);
    const fractal::GridShift shift{u(rng), u(rng), 0.0};
    const auto counts = fractal::box_count(c, l, shift);
    for (std::size_t k = 0; k < l.size(); ++k) CHECK(counts.counts[k] == brute_count(c, l.epsilons[k], shift));
  }
  // spatial
  curves::TrajectoryFamilySpec f;
  const Curve c = curves::gen_phase_trajectory(f, 60.0, {10'000, 5e-3});
  const ScaleLadder l = ScaleLadder::anchored_fine(1e-2, 0.7, 12, 10.0);
  const auto counts = fractal::box_count(c, l, {0.3, 0.6, 0.1});
  for (std::size_t k = 0; k < l.size(); ++k) CHECK(counts.counts[k] == brute_count(c, l.epsilons[k], {0.3, 0.6, 0.1}));
}

TEST_CASE("property: parallel kernels equal the serial reference") {
  const Curve& c = half_spiral();
  const ScaleLadder l = fractal::ladder_for_curve(c);
  CHECK(fractal::kernels::box_counts(c, l.epsilons, {0.25, 0.5, 0.0}) ==
        fractal::reference::box_counts(c, l.epsilons, {0.25, 0.5, 0.0}));
  const Curve small = clip_to_ball(c, 0.05);
  for (int m : {8, 12}) {
    const double eps = 4.0 * l.eps_min();
    CHECK(fractal::kernels::neighbourhood_pixels(small, eps, m) ==
          fractal::reference::neighbourhood_pixels(small, eps, m));
  }
}

TEST_CASE("property: counts never decrease as eps halves") {
  const Curve& c = half_spiral();
  const auto counts = fractal::box_count(c, fractal::ladder_for_curve(c));
  for (std::size_t k = 0; k + 1 < counts.counts.size(); ++k) CHECK(counts.counts[k + 1] >= counts.counts[k]);
}

TEST_CASE("spiral r = phi^-1/2 has dimension 4/3") {
  const Curve& c = half_spiral();
  const auto e = fractal::fit_dimension(fractal::box_count(c, fractal::ladder_for_curve(c)));
  CHECK(std::abs(e.value - 4.0 / 3.0) <= std::max(e.band, 0.05));
  CHECK(e.band <= 0.05);
  CHECK(e.value >= 1.0);
  CHECK(e.value <= 2.0);
}

TEST_CASE("straight segment has dimension 1") {
  const Curve c = testing::segment(0.1, 0.1, 0.9, 0.6, 200'001);
  const auto counts = fractal::box_count(c, fractal::ladder_for_curve(c));
  for (auto model : {fractal::FitModel::kTwoTerm, fractal::FitModel::kPowerLaw}) {
    fractal::FitPolicy p;
    p.model = model;
    const auto e = fractal::fit_dimension(counts, p);
    CHECK(e.value == doctest::Approx(1.0).epsilon(0.02));
    // no singular part: the two-term exponent is unidentified
    CHECK(e.model == fractal::FitModel::kPowerLaw);
  }
}

TEST_CASE("band covers the spread over offset grids") {
  for (int k = 0; k < fractal::kGridOffsets; ++k)
    for (double v : fractal::grid_offset(k)) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  const Curve& c = half_spiral();
  const auto counts = fractal::box_count(c, fractal::ladder_for_curve(c));
  CHECK(counts.offset_counts.size() == static_cast<std::size_t>(fractal::kGridOffsets));
  const auto e = fractal::fit_dimension(counts);
  CHECK(e.grid_spread > 0.0);
  CHECK(e.band >= 2.0 * e.grid_spread);
  auto bare = counts;
  bare.offset_counts.clear();
  CHECK(fractal::fit_dimension(bare).grid_spread == 0.0);
  CHECK(fractal::fit_dimension(bare).value == e.value);
}

TEST_CASE("flat counts are sub-resolved") {
  fractal::ScaleCounts sc{ScaleLadder::geometric(1.0, 0.5, 10), std::vector<std::uint64_t>(10, 3), 2};
  const auto e = fractal::fit_dimension(sc);
  CHECK(e.sub_resolved);
  CHECK_THROWS_AS(fractal::fit_dimension({ScaleLadder{}, {}, 2}), PreconditionError);
}

TEST_CASE("property: grid shift moves the estimate by less than its band") {
  const Curve& c = half_spiral();
  const ScaleLadder l = fractal::ladder_for_curve(c);
  const auto base = fractal::fit_dimension(fractal::box_count(c, l));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 3; ++k) {
    const auto e = fractal::fit_dimension(fractal::box_count(c, l, {u(rng), u(rng), 0.0}, false));
    CHECK(std::abs(e.value - base.value) < base.band);
  }
}

TEST_CASE("property: rescaling rescales eps and keeps the estimate") {
  const Curve& c = half_spiral();
  const ScaleLadder l = fractal::ladder_for_curve(c);
  const auto base = fractal::box_count(c, l);
  const double f = 4.0;  // a power of two keeps the grid nested exactly
  const Curve big = rescale(c, f);
  ScaleLadder lf = l;
  for (double& e : lf.epsilons) e *= f;
  const auto scaled = fractal::box_count(big, lf);
  CHECK(scaled.counts == base.counts);
  const double factor = 3.0;
  const Curve odd = rescale(c, factor);
  const auto e0 = fractal::fit_dimension(base);
  const auto e1 = fractal::fit_dimension(fractal::box_count(odd, fractal::ladder_for_curve(odd)));
  CHECK(std::abs(e1.value - e0.value) < std::max(e0.band, e1.band));
}

TEST_CASE("epsilon measure of a point is a disc") {
  const Curve c = testing::single_point(0.3, -0.2);
  const ScaleLadder l = ScaleLadder::geometric(0.1, 0.8, 8);
  const auto m = fractal::epsilon_measure(c, l, l.eps_min() / 16);
  for (std::size_t k = 0; k < l.size(); ++k)
    CHECK(m.measures[k] == doctest::Approx(std::numbers::pi * l.epsilons[k] * l.epsilons[k]).epsilon(0.03));
}

TEST_CASE("epsilon measure of a segment is a stadium") {
  const Curve c = testing::segment(0.05, 0.1, 0.85, 0.5, 100'001);
  const double L = std::hypot(0.8, 0.4);
  const ScaleLadder l = ScaleLadder::geometric(0.02, 0.8, 8);
  const auto m = fractal::epsilon_measure(c, l, l.eps_min() / 16);
  for (std::size_t k = 0; k < l.size(); ++k) {
    const double e = l.epsilons[k];
    CHECK(m.measures[k] == doctest::Approx(2 * L * e + std::numbers::pi * e * e).epsilon(0.03));
    CHECK(m.rel_error_bound[k] > 0.0);
  }
  for (std::size_t k = 0; k + 1 < l.size(); ++k) CHECK(m.measures[k + 1] <= m.measures[k]);
}

TEST_CASE("epsilon measure refuses a coarse raster") {
  const Curve c = testing::segment(0, 0, 1, 0, 1001);
  const ScaleLadder l = ScaleLadder::geometric(0.1, 0.8, 8);
  CHECK_THROWS_AS(fractal::epsilon_measure(c, l, l.eps_min() / 4), PreconditionError);
  fractal::MeasureOptions tiny;
  tiny.max_pixels = 1000;
  CHECK_THROWS_AS(fractal::epsilon_measure(c, l, l.eps_min() / 8, tiny), PreconditionError);
}

TEST_CASE("content of r = phi^-1/2 is nondegenerate at s = 4/3") {
  const Curve& c = half_spiral();
  const ScaleLadder l = fractal::ladder_for_curve(c);
  const auto m = fractal::epsilon_measure(c, l, l.eps_min() / 8);
  const auto p = fractal::content_profile(m, 4.0 / 3.0);
  CHECK(p.verdict == "nondegenerate");
  CHECK(p.spread <= 4.0);
  // s = ambient leaves the raw measures, nonincreasing toward fine scales
  const auto q = fractal::content_profile(m, 2.0);
  CHECK(q.quotients == m.measures);
  for (std::size_t k = 0; k + 1 < q.quotients.size(); ++k) CHECK(q.quotients[k + 1] <= q.quotients[k]);
  CHECK_THROWS_AS(fractal::content_profile(m, 0.0), PreconditionError);
}

TEST_CASE("content verdict rules") {
  fractal::MeasureProfile m;
  m.ladder = ScaleLadder::geometric(1.0, 0.5, 8);
  m.ambient = 2;
  for (double e : m.ladder.epsilons) m.measures.push_back(e * e);
  const auto flat = fractal::content_profile(m, 1.0);  // quotient = eps, spread 128
  CHECK(flat.monotone);
  CHECK(flat.verdict == "degenerate-drift");
  for (std::size_t k = 0; k < m.measures.size(); ++k) m.measures[k] = m.ladder.epsilons[k] * (k % 2 ? 1.0 : 2.0);
  CHECK(fractal::content_profile(m, 1.0).verdict == "nondegenerate");
  for (std::size_t k = 0; k < m.measures.size(); ++k)
    m.measures[k] = m.ladder.epsilons[k] * (k % 2 ? 1.0 : 20.0);
  CHECK(fractal::content_profile(m, 1.0).verdict == "inconclusive");
}

TEST_CASE("graph dimension of chirps") {
  curves::ChirpSpec s;
  s.alpha = 0.5;
  s.beta = 1.0;
  auto e = fractal::graph_dimension(s, 2'000'000);
  CHECK(std::abs(e.value - 1.25) <= std::max(e.band, 0.06));
  s.beta = 0.75;
  e = fractal::graph_dimension(s, 2'000'000);
  CHECK(std::abs(e.value - 8.0 / 7.0) <= std::max(e.band, 0.06));
  s.alpha = 1.5;
  s.beta = 1.0;
  e = fractal::graph_dimension(s, 1'000'000);
  CHECK(e.value == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("chirp plan fits the budget") {
  curves::ChirpSpec s;
  const auto plan = fractal::plan_chirp(s, 500'000);
  CHECK(plan.samples <= 500'000);
  CHECK(plan.tau_end > 0.0);
}
