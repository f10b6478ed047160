#include "spiraldim/curves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "spiraldim/error.hpp"

namespace spiraldim::curves {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One evaluated sample for the adaptive sampler.
struct Sample {
  Point3 p;
  double phase;       // oscillation phase, monotone along the curve
  double speed;       // |dP/ds|
  double phase_rate;  // |d phase/ds|
};

enum class OnBudget { kThrow, kStop };

struct SamplerOut {
  std::vector<double>* params = nullptr;
  std::vector<double>* coords = nullptr;
  int dim = 2;

  void emit(double s, const Point3& p) const {
    if (params == nullptr) return;
    params->push_back(s);
    for (int a = 0; a < dim; ++a) coords->push_back(p[static_cast<std::size_t>(a)]);
  }
};

double dist(const Point3& a, const Point3& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

/// Walks the parameter from s0 in direction dir with steps bounded by the
/// phase step and the chord bound. Stops after `done` holds, at s_limit (if
/// finite), or when the budget is exhausted (throw or stop per policy).
/// Returns the number of samples and writes the last parameter to s_end.
template <class Eval, class Done>
std::size_t run_sampler(Eval&& eval, double s0, double dir, double s_limit, Done&& done,
                        const Sampling& smp, OnBudget policy, const SamplerOut& out,
                        double* s_end, const char* what) {
  require(smp.max_chord > 0.0, "max_chord must be positive");
  require(smp.budget >= 2, "budget must allow at least 2 samples");
  const bool limited = std::isfinite(s_limit);
  double s = s0;
  Sample cur = eval(s);
  out.emit(s, cur.p);
  std::size_t n = 1;
  while (!done(s, cur)) {
    if (limited && dir * (s_limit - s) <= 0.0) break;
    if (n >= smp.budget) {
      if (policy == OnBudget::kStop) break;
      if (s_end) *s_end = s;
      throw BudgetError(std::string(what) + ": sampling budget of " + std::to_string(smp.budget) +
                            " exhausted at parameter " + num(s),
                        s);
    }
    double h = std::min(0.98 * kPhaseStep / cur.phase_rate, 0.9 * smp.max_chord / cur.speed);
    for (;;) {
      if (!(h > 1e-15 * std::max(1.0, std::abs(s))))
        throw NumericalError(std::string(what) + ": sampling step underflow at parameter " + num(s));
      double sn = s + dir * h;
      if (limited && dir * (sn - s_limit) >= 0.0) sn = s_limit;
      const Sample nx = eval(sn);
      const double c = dist(cur.p, nx.p);
      const double dphase = std::abs(nx.phase - cur.phase);
      if (c <= smp.max_chord && dphase <= kPhaseStep) {
        s = sn;
        cur = nx;
        out.emit(s, cur.p);
        ++n;
        break;
      }
      const double shrink = std::min(c > 0.0 ? 0.9 * smp.max_chord / c : 1.0,
                                     dphase > 0.0 ? 0.95 * kPhaseStep / dphase : 1.0);
      h *= std::clamp(shrink, 0.1, 0.7);
    }
  }
  if (s_end) *s_end = s;
  return n;
}

/// x = A p sin(q + theta) and its first two derivatives.
struct SolutionValues {
  double x, dx, ddx;
};

SolutionValues solution_values(const Jet& p, const Jet& q, double A, double theta) {
  const double w = q[0] + theta;
  const double s = std::sin(w), c = std::cos(w);
  SolutionValues v;
  v.x = A * p[0] * s;
  v.dx = A * (p[1] * s + p[0] * q[1] * c);
  v.ddx = A * (p[2] * s + 2.0 * p[1] * q[1] * c + p[0] * (q[2] * c - q[1] * q[1] * s));
  return v;
}

void add_family(Provenance& prov, const TrajectoryFamilySpec& s) {
  prov.add("alpha", s.alpha);
  prov.add("gamma", s.gamma);
  prov.add("K", s.K);
  prov.add("log_p_exponent", std::to_string(s.log_p_exponent));
  prov.add("log_q_exponent", std::to_string(s.log_q_exponent));
  prov.add("C1", s.C1);
  prov.add("C2", s.C2);
  prov.add("C3", s.C3);
  prov.add("t0", s.t0);
}

void add_chirp(Provenance& prov, const ChirpSpec& s) {
  prov.add("alpha", s.alpha);
  prov.add("beta", s.beta);
  prov.add("phase_shift", s.phase_shift);
  prov.add("trig", s.trig == Trig::kSin ? "sin" : "cos");
}

double trig_shift(const ChirpSpec& s) {
  return s.phase_shift + (s.trig == Trig::kCos ? kPi / 2.0 : 0.0);
}

}  // namespace

// ---------------------------------------------------------------- specs

void ChirpSpec::validate() const {
  require(alpha > 0.0, "chirp alpha must be positive");
  require(beta > 0.0, "chirp beta must be positive");
  require(std::isfinite(phase_shift), "chirp phase_shift must be finite");
}

void PowerSpiralSpec::validate() const {
  require(alpha > 0.0, "spiral alpha must be positive");
  require(phi_min > 1.0, "spiral phi_min must exceed 1 so that log phi > 0");
  require(std::isfinite(log_exponent), "spiral log_exponent must be finite");
}

double PowerSpiralSpec::radius(double phi) const {
  double r = std::pow(phi, -alpha);
  if (log_exponent != 0.0) r *= std::pow(std::log(phi), log_exponent);
  return r;
}

double PowerSpiralSpec::radius_slope(double phi) const {
  const double L = std::log(phi);
  return radius(phi) * (-alpha / phi + (log_exponent != 0.0 ? log_exponent / (phi * L) : 0.0));
}

double TrajectoryFamilySpec::amplitude() const { return std::hypot(C1, C2); }

double TrajectoryFamilySpec::phase() const { return std::atan2(C2, C1); }

double TrajectoryFamilySpec::default_t0(int log_p_exponent, int log_q_exponent) {
  return (log_p_exponent > 0 || log_q_exponent > 0) ? std::exp(2.0) : 20.0;
}

void TrajectoryFamilySpec::validate(double t_max) const {
  require(alpha > 0.0, "family alpha must be positive");
  require(gamma > 0.0, "family gamma must be positive");
  require(K > 0.0, "family K must be positive");
  require(log_p_exponent >= 0 && log_q_exponent >= 0, "log exponents must be nonnegative");
  require(t0 > std::numbers::e, "family t0 must exceed e");
  require(C1 != 0.0 || C2 != 0.0, "(C1, C2) must not both be zero");
  require(t_max > t0, "t_max must exceed t0");
  constexpr int kProbes = 256;
  for (int i = 0; i <= kProbes; ++i) {
    const double t = t0 * std::pow(t_max / t0, static_cast<double>(i) / kProbes);
    const FamilyValues fv = eval_family(*this, t, 1);
    require(fv.p[0] > 0.0, "p(t) must be positive on [t0, t_max]; t=" + num(t));
    require(fv.p[1] <= 0.0, "p'(t) must be nonpositive on [t0, t_max]; raise t0 (t=" + num(t) + ")");
    require(fv.q[0] > 0.0 && fv.q[1] > 0.0, "q and q' must be positive on [t0, t_max]; t=" + num(t));
    const double L = std::log(t);
    const double pref = std::pow(t, -alpha) * std::pow(L, log_p_exponent);
    const double qref = K * t * std::pow(L, log_q_exponent);
    require(std::abs(fv.p[0] / pref - 1.0) < 1e-12 && std::abs(fv.q[0] / qref - 1.0) < 1e-12,
            "family comparability check failed at t=" + num(t));
  }
}

int NormalFormSpec::p_index() const {
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[i] != 0.0) return static_cast<int>(i) + 2;
  return 0;
}

double NormalFormSpec::leading_b() const {
  const int p = p_index();
  return p == 0 ? 0.0 : b[static_cast<std::size_t>(p - 2)];
}

void NormalFormSpec::validate() const {
  require(l >= 1, "normal form codimension l must be >= 1");
  require(a.size() == static_cast<std::size_t>(l), "normal form needs exactly l coefficients a_0..a_{l-1}");
  require(p_index() >= 2, "normal form needs a nonzero b_p");
  require(omega > 0.0, "omega must be positive");
}

double NormalFormSpec::r_rate(double r) const {
  const double r2 = r * r;
  double poly = std::pow(r2, l);
  double rp = 1.0;
  for (double ai : a) {
    poly += ai * rp;
    rp *= r2;
  }
  return r * poly;
}

double NormalFormSpec::z_rate(double z) const {
  double s = 0.0;
  double zp = z * z;
  for (double bi : b) {
    s += bi * zp;
    zp *= z;
  }
  return s;
}

// ---------------------------------------------------------------- closed forms

FamilyValues eval_family(const TrajectoryFamilySpec& spec, double t, int derivative_order) {
  require(derivative_order >= 0 && derivative_order <= 3, "derivative order must be in 0..3");
  if (!(t >= spec.t0))
    throw PreconditionError("eval_family: t=" + num(t) + " below t0=" + num(spec.t0));
  const Jet logt = Jet::log(t);
  Jet p = Jet::power(t, -spec.alpha);
  if (spec.log_p_exponent > 0) p = p * ipow(logt, spec.log_p_exponent);
  Jet q = Jet::identity(t);
  if (spec.log_q_exponent > 0) q = q * ipow(logt, spec.log_q_exponent);
  q = spec.K * q;
  return {p, q};
}

CubicCoefficients cubic_coefficients(const TrajectoryFamilySpec& spec, double z) {
  require(z > 0.0, "cubic system needs z > 0");
  const double t = spec.gamma * std::pow(z, -1.0 / spec.gamma);
  const FamilyValues fv = eval_family(spec, t, 2);
  const Jet& p = fv.p;
  const Jet& q = fv.q;
  const double pr = p[1] / p[0];
  const double U = q[1] * q[1] + 2.0 * pr * pr - p[2] / p[0] + pr * q[2] / q[1];
  const double V = 2.0 * pr + q[2] / q[1];
  return {U, V};
}

double chirp_value(const ChirpSpec& spec, double tau) {
  require(tau > 0.0, "chirp is defined for tau > 0");
  return std::pow(tau, spec.alpha) * std::sin(std::pow(tau, -spec.beta) + trig_shift(spec));
}

Point3 phase_trajectory_point(const TrajectoryFamilySpec& spec, double t) {
  const FamilyValues fv = eval_family(spec, t, 2);
  const SolutionValues v = solution_values(fv.p, fv.q, spec.amplitude(), spec.phase());
  return {v.x, v.dx, std::pow(t, -spec.gamma)};
}

Point3 cubic_system_solution(const TrajectoryFamilySpec& spec, double t) {
  const double s = t - spec.C3;
  const FamilyValues fv = eval_family(spec, s, 2);
  const SolutionValues v = solution_values(fv.p, fv.q, spec.amplitude(), spec.phase());
  return {v.x, v.dx, std::pow(spec.gamma / s, spec.gamma)};
}

// ---------------------------------------------------------------- generators

namespace {

Sample chirp_graph_sample(const ChirpSpec& spec, double tau) {
  const double u = std::pow(tau, -spec.beta);
  const double w = u + trig_shift(spec);
  const double amp = std::pow(tau, spec.alpha);
  const double X = amp * std::sin(w);
  const double du = spec.beta * u / tau;  // |d u / d tau|
  const double dX = spec.alpha * amp / tau * std::sin(w) - amp * std::cos(w) * du;
  return {{tau, X, 0.0}, u, std::sqrt(1.0 + dX * dX), du};
}

std::size_t chirp_run(const ChirpSpec& spec, double tau_max, const Sampling& smp, double tau_min,
                      const SamplerOut& out, double* tau_end) {
  auto eval = [&](double tau) { return chirp_graph_sample(spec, tau); };
  auto never = [](double, const Sample&) { return false; };
  const double limit = tau_min > 0.0 ? tau_min : std::numeric_limits<double>::quiet_NaN();
  return run_sampler(eval, tau_max, -1.0, limit, never, smp, OnBudget::kStop, out, tau_end,
                     "gen_chirp_graph");
}

}  // namespace

std::size_t chirp_sample_count(const ChirpSpec& spec, double tau_max, double tau_min,
                               double max_chord, std::size_t limit) {
  spec.validate();
  require(tau_min > 0.0 && tau_min < tau_max, "chirp_sample_count: need 0 < tau_min < tau_max");
  double tau_end = tau_max;
  const std::size_t n =
      chirp_run(spec, tau_max, Sampling{limit, max_chord}, tau_min, SamplerOut{}, &tau_end);
  return tau_end > tau_min ? limit + 1 : n;
}

std::size_t chirp_min_budget(const ChirpSpec& spec, double tau_max, double max_chord) {
  spec.validate();
  const double u0 = std::pow(tau_max, -spec.beta);
  auto eval = [&](double tau) { return chirp_graph_sample(spec, tau); };
  auto one_turn = [&](double, const Sample& s) { return s.phase >= u0 + 2.0 * kPi; };
  Sampling smp{std::numeric_limits<std::size_t>::max(), max_chord};
  return run_sampler(eval, tau_max, -1.0, std::numeric_limits<double>::quiet_NaN(), one_turn, smp,
                     OnBudget::kStop, SamplerOut{}, nullptr, "chirp_min_budget");
}

Curve gen_chirp_graph(const ChirpSpec& spec, double tau_max, const Sampling& sampling,
                      double tau_min) {
  spec.validate();
  require(tau_max > 0.0 && tau_max <= 1.0, "gen_chirp_graph: tau_max must lie in (0, 1]");
  require(sampling.budget >= 1000, "gen_chirp_graph: budget must be at least 1000");
  require(tau_min >= 0.0 && tau_min < tau_max, "gen_chirp_graph: tau_min must lie in [0, tau_max)");
  const std::size_t needed = chirp_min_budget(spec, tau_max, sampling.max_chord);
  if (sampling.budget < needed)
    throw BudgetError("gen_chirp_graph: budget " + std::to_string(sampling.budget) +
                          " cannot resolve one oscillation; at least " + std::to_string(needed) +
                          " samples required",
                      tau_max, needed);
  std::vector<double> params, coords;
  params.reserve(sampling.budget);
  coords.reserve(2 * sampling.budget);
  double tau_end = tau_max;
  chirp_run(spec, tau_max, sampling, tau_min, SamplerOut{&params, &coords, 2}, &tau_end);
  Provenance prov{"chirp_graph", {}};
  add_chirp(prov, spec);
  prov.add("tau_max", tau_max);
  prov.add("tau_min_reached", tau_end);
  prov.add("budget", std::to_string(sampling.budget));
  prov.add("max_chord", sampling.max_chord);
  return Curve(2, std::move(params), std::move(coords), sampling.max_chord, std::move(prov), true);
}

namespace {

Sample spiral_sample(const PowerSpiralSpec& spec, double phi) {
  const double r = spec.radius(phi);
  const double dr = spec.radius_slope(phi);
  const double sgn = spec.mirror ? -1.0 : 1.0;
  return {{r * std::cos(phi), sgn * r * std::sin(phi), 0.0}, phi, std::hypot(r, dr), 1.0};
}

std::size_t spiral_run(const PowerSpiralSpec& spec, double r_min, const Sampling& smp,
                       const SamplerOut& out, double* phi_end) {
  auto eval = [&](double phi) { return spiral_sample(spec, phi); };
  auto reached = [&](double phi, const Sample&) { return spec.radius(phi) <= r_min; };
  return run_sampler(eval, spec.phi_min, 1.0, std::numeric_limits<double>::quiet_NaN(), reached,
                     smp, OnBudget::kThrow, out, phi_end, "gen_power_spiral");
}

}  // namespace

std::size_t power_spiral_sample_count(const PowerSpiralSpec& spec, double r_min, double max_chord,
                                      std::size_t limit) {
  spec.validate();
  try {
    return spiral_run(spec, r_min, Sampling{limit, max_chord}, SamplerOut{}, nullptr);
  } catch (const BudgetError&) {
    return limit + 1;
  }
}

Curve gen_power_spiral(const PowerSpiralSpec& spec, double r_min, const Sampling& sampling) {
  spec.validate();
  require(r_min > 0.0 && r_min < spec.radius(spec.phi_min),
          "gen_power_spiral: r_min must lie in (0, r(phi_min))");
  std::vector<double> params, coords;
  double phi_end = spec.phi_min;
  try {
    spiral_run(spec, r_min, sampling, SamplerOut{&params, &coords, 2}, &phi_end);
  } catch (const BudgetError& e) {
    const double reached = spec.radius(e.reached());
    throw BudgetError("gen_power_spiral: budget exhausted at radius " + num(reached) +
                          " before reaching r_min=" + num(r_min),
                      reached);
  }
  Provenance prov{"power_spiral", {}};
  prov.add("alpha", spec.alpha);
  prov.add("log_exponent", spec.log_exponent);
  prov.add("phi_min", spec.phi_min);
  prov.add("mirror", spec.mirror ? "true" : "false");
  prov.add("r_min", r_min);
  prov.add("phi_end", phi_end);
  prov.add("max_chord", sampling.max_chord);
  return Curve(2, std::move(params), std::move(coords), sampling.max_chord, std::move(prov), true);
}

namespace {

Sample trajectory_sample(const TrajectoryFamilySpec& spec, double t) {
  const FamilyValues fv = eval_family(spec, t, 3);
  const SolutionValues v = solution_values(fv.p, fv.q, spec.amplitude(), spec.phase());
  const double z = std::pow(t, -spec.gamma);
  const double dz = spec.gamma * z / t;
  return {{v.x, v.dx, z}, fv.q[0], std::hypot(v.dx, v.ddx, dz), fv.q[1]};
}

std::size_t trajectory_run(const TrajectoryFamilySpec& spec, double t_max, const Sampling& smp,
                           const SamplerOut& out) {
  auto eval = [&](double t) { return trajectory_sample(spec, t); };
  auto never = [](double, const Sample&) { return false; };
  return run_sampler(eval, spec.t0, 1.0, t_max, never, smp, OnBudget::kThrow, out, nullptr,
                     "gen_phase_trajectory");
}

}  // namespace

std::size_t phase_trajectory_sample_count(const TrajectoryFamilySpec& spec, double t_max,
                                          double max_chord, std::size_t limit) {
  try {
    return trajectory_run(spec, t_max, Sampling{limit, max_chord}, SamplerOut{});
  } catch (const BudgetError&) {
    return limit + 1;
  }
}

Curve gen_phase_trajectory(const TrajectoryFamilySpec& spec, double t_max,
                           const Sampling& sampling) {
  spec.validate(t_max);
  std::vector<double> params, coords;
  trajectory_run(spec, t_max, sampling, SamplerOut{&params, &coords, 3});
  Provenance prov{"phase_trajectory", {}};
  add_family(prov, spec);
  prov.add("t_max", t_max);
  prov.add("max_chord", sampling.max_chord);
  return Curve(3, std::move(params), std::move(coords), sampling.max_chord, std::move(prov), true);
}

Curve gen_chirp_phase_curve(const ChirpSpec& spec, double t_begin, double t_end,
                            const Sampling& sampling) {
  spec.validate();
  require(t_begin > 0.0 && t_end > t_begin, "gen_chirp_phase_curve: need 0 < t_begin < t_end");
  const double shift = trig_shift(spec);
  auto eval = [&](double t) {
    const Jet p = Jet::power(t, -spec.alpha);
    const Jet q = Jet::power(t, spec.beta);
    const SolutionValues v = solution_values(p, q, 1.0, shift);
    return Sample{{v.x, v.dx, 0.0}, q[0], std::hypot(v.dx, v.ddx), q[1]};
  };
  auto never = [](double, const Sample&) { return false; };
  std::vector<double> params, coords;
  run_sampler(eval, t_begin, 1.0, t_end, never, sampling, OnBudget::kThrow,
              SamplerOut{&params, &coords, 2}, nullptr, "gen_chirp_phase_curve");
  Provenance prov{"chirp_phase_curve", {}};
  add_chirp(prov, spec);
  prov.add("t_begin", t_begin);
  prov.add("t_end", t_end);
  prov.add("max_chord", sampling.max_chord);
  return Curve(2, std::move(params), std::move(coords), sampling.max_chord, std::move(prov), true);
}

Curve gen_reflected_solution(const TrajectoryFamilySpec& spec, double t_max,
                             const Sampling& sampling) {
  spec.validate(t_max);
  const double A = spec.amplitude(), theta = spec.phase();
  auto eval = [&](double tau) {
    const double t = 1.0 / tau;
    const FamilyValues fv = eval_family(spec, std::max(t, spec.t0), 2);
    const SolutionValues v = solution_values(fv.p, fv.q, A, theta);
    const double dX = -v.dx / (tau * tau);
    return Sample{{tau, v.x, 0.0}, fv.q[0], std::hypot(1.0, dX), fv.q[1] / (tau * tau)};
  };
  auto never = [](double, const Sample&) { return false; };
  std::vector<double> params, coords;
  run_sampler(eval, 1.0 / spec.t0, -1.0, 1.0 / t_max, never, sampling, OnBudget::kThrow,
              SamplerOut{&params, &coords, 2}, nullptr, "gen_reflected_solution");
  Provenance prov{"reflected_solution", {}};
  add_family(prov, spec);
  prov.add("t_max", t_max);
  prov.add("max_chord", sampling.max_chord);
  return Curve(2, std::move(params), std::move(coords), sampling.max_chord, std::move(prov), true);
}

// ---------------------------------------------------------------- integrators

IntegrationResult integrate_cubic_system(const TrajectoryFamilySpec& spec, CubicState init,
                                         TimeRange range, ode::Tolerances tol,
                                         const Sampling& sampling) {
  require(spec.gamma > 0.0 && spec.alpha > 0.0 && spec.K > 0.0, "invalid family spec");
  require(tol.rel > 0.0 && tol.rel <= 1e-3 && tol.abs > 0.0 && tol.abs <= 1e-3,
          "integrate_cubic_system: tolerances must lie in (0, 1e-3]");
  const double z0 = std::pow(spec.gamma / spec.t0, spec.gamma);
  require(init.z > 0.0 && init.z <= z0 * (1.0 + 1e-12),
          "integrate_cubic_system: init.z must lie in (0, z0] with z0=" + num(z0));
  require(range.end > range.begin, "integrate_cubic_system: range must run forward in t");
  require(sampling.max_chord > 0.0, "max_chord must be positive");

  const double delta = spec.delta();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto f = [&](double, const ode::State<3>& y) -> ode::State<3> {
    if (!(y[2] > 0.0)) return {nan, nan, nan};
    const double s = spec.gamma * std::pow(y[2], -1.0 / spec.gamma);
    if (!(s >= spec.t0)) return {nan, nan, nan};
    const CubicCoefficients c = cubic_coefficients(spec, y[2]);
    return {y[1], -c.U * y[0] + c.V * y[1], -std::pow(y[2], delta)};
  };

  std::vector<double> params{range.begin};
  std::vector<double> coords{init.x, init.y, init.z};
  Point3 last{init.x, init.y, init.z};
  bool truncated = false;
  std::string reason;

  auto cap = [&](double, const ode::State<3>& y) {
    const double s = spec.gamma * std::pow(y[2], -1.0 / spec.gamma);
    const FamilyValues fv = eval_family(spec, std::max(s, spec.t0), 1);
    const ode::State<3> v = f(0.0, y);
    const double speed = std::hypot(v[0], v[1], v[2]);
    return std::min(0.98 * kPhaseStep / fv.q[1], 0.9 * sampling.max_chord / speed);
  };
  auto observe = [&](double t, const ode::State<3>& y) {
    const Point3 p{y[0], y[1], y[2]};
    if (dist(p, last) > sampling.max_chord) return ode::Verdict::kReject;
    if (params.size() >= sampling.budget)
      throw BudgetError("integrate_cubic_system: sampling budget exhausted at t=" + num(t), t);
    params.push_back(t);
    coords.insert(coords.end(), {y[0], y[1], y[2]});
    last = p;
    if (!(y[2] > 0.0)) {
      truncated = true;
      reason = "z reached 0";
      return ode::Verdict::kStop;
    }
    return ode::Verdict::kAccept;
  };
  const ode::Stats stats = ode::integrate_dopri5<3>(
      f, range.begin, ode::State<3>{init.x, init.y, init.z}, range.end, tol, cap, observe);

  Provenance prov{"cubic_system", {}};
  add_family(prov, spec);
  prov.add("t_begin", range.begin);
  prov.add("t_end", range.end);
  prov.add("rel_tol", tol.rel);
  prov.add("abs_tol", tol.abs);
  prov.add("max_chord", sampling.max_chord);
  Curve curve(3, std::move(params), std::move(coords), sampling.max_chord, std::move(prov), true);
  return {std::move(curve), truncated, reason, stats};
}

IntegrationResult integrate_normal_form(const NormalFormSpec& spec, CylindricalState init,
                                        TimeRange range, ode::Tolerances tol,
                                        const Sampling& sampling, double r_floor) {
  spec.validate();
  require(init.r > 0.0, "integrate_normal_form: init.r must be positive");
  require(range.end != range.begin, "integrate_normal_form: empty time range");
  require(tol.rel > 0.0 && tol.rel <= 1e-3 && tol.abs > 0.0 && tol.abs <= 1e-3,
          "integrate_normal_form: tolerances must lie in (0, 1e-3]");
  require(sampling.max_chord > 0.0, "max_chord must be positive");

  auto f = [&](double, const ode::State<3>& y) -> ode::State<3> {
    return {spec.r_rate(y[0]), spec.omega, spec.z_rate(y[2])};
  };
  auto cart = [](const ode::State<3>& y) {
    return Point3{y[0] * std::cos(y[1]), y[0] * std::sin(y[1]), y[2]};
  };
  const ode::State<3> y0{init.r, init.phi, init.z};
  Point3 last = cart(y0);
  std::vector<double> params{range.begin};
  std::vector<double> coords{last[0], last[1], last[2]};
  bool truncated = false;
  std::string reason;

  auto cap = [&](double, const ode::State<3>& y) {
    const ode::State<3> v = f(0.0, y);
    const double speed = std::hypot(v[0], y[0] * v[1], v[2]);
    return std::min(0.98 * kPhaseStep / spec.omega, 0.9 * sampling.max_chord / speed);
  };
  auto observe = [&](double t, const ode::State<3>& y) {
    const Point3 p = cart(y);
    if (dist(p, last) > sampling.max_chord) return ode::Verdict::kReject;
    if (params.size() >= sampling.budget)
      throw BudgetError("integrate_normal_form: sampling budget exhausted at t=" + num(t), t);
    params.push_back(t);
    coords.insert(coords.end(), {p[0], p[1], p[2]});
    last = p;
    if (y[0] < r_floor) {
      truncated = true;
      reason = "r fell below solver resolution";
      return ode::Verdict::kStop;
    }
    if (!std::isfinite(y[0]) || y[0] > 1e6) {
      truncated = true;
      reason = "r escaped";
      return ode::Verdict::kStop;
    }
    return ode::Verdict::kAccept;
  };
  const ode::Stats stats =
      ode::integrate_dopri5<3>(f, range.begin, y0, range.end, tol, cap, observe);

  Provenance prov{"normal_form", {}};
  prov.add("l", std::to_string(spec.l));
  std::string as, bs;
  for (double v : spec.a) as += (as.empty() ? "" : " ") + num(v);
  for (double v : spec.b) bs += (bs.empty() ? "" : " ") + num(v);
  prov.add("a", as);
  prov.add("b", bs);
  prov.add("omega", spec.omega);
  prov.add("t_begin", range.begin);
  prov.add("t_end", range.end);
  prov.add("rel_tol", tol.rel);
  prov.add("abs_tol", tol.abs);
  prov.add("max_chord", sampling.max_chord);
  Curve curve(3, std::move(params), std::move(coords), sampling.max_chord, std::move(prov), true);
  return {std::move(curve), truncated, reason, stats};
}

}  // namespace spiraldim::curves
