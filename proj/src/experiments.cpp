#include "spiraldim/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "spiraldim/phase.hpp"
#include "spiraldim/regression.hpp"

namespace spiraldim::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// `key=value;key=value` snapshot builder.
class Snap {
 public:
  Snap& add(const std::string& k, double v) { return add(k, num(v)); }
  Snap& add(const std::string& k, const std::string& v) {
    if (!text_.empty()) text_ += ';';
    text_ += k + '=' + v;
    return *this;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

Row make_row(std::string id, std::string quantity, std::string spec, double predicted,
             double tolerance) {
  Row r;
  r.id = std::move(id);
  r.quantity = std::move(quantity);
  r.spec = std::move(spec);
  r.predicted = predicted;
  r.estimated = kNaN;
  r.tolerance = tolerance;
  return r;
}

Row& finish(Row& r) {
  r.pass = r.evaluate();
  return r;
}

/// Fills a dimension row from a curve.
void measure_dimension(Row& row, const Curve& curve) {
  const fractal::ScaleCounts counts = fractal::box_count(curve, fractal::ladder_for_curve(curve));
  const fractal::DimensionEstimate est = fractal::fit_dimension(counts);
  row.counts = counts;
  row.band = est.band;
  if (est.sub_resolved) {
    row.diagnostic = "sub-resolved: counts are flat over the regression window";
    row.estimated = kNaN;
  } else {
    row.estimated = est.value;
  }
  finish(row);
}

using Job = std::function<std::vector<Row>()>;

/// A job that fails turns every row it would have produced into an error row.
Job guarded(std::vector<Row> templates, std::function<std::vector<Row>(std::vector<Row>)> body) {
  return [templates = std::move(templates), body = std::move(body)]() {
    try {
      return body(templates);
    } catch (const Error& e) {
      std::vector<Row> rows = templates;
      for (Row& r : rows) {
        r.estimated = kNaN;
        r.observed_verdict = r.expected_verdict.empty() ? "" : "error";
        r.diagnostic = e.what();
        r.pass = false;
      }
      return rows;
    }
  };
}

std::vector<std::vector<Row>> run_jobs(const std::vector<Job>& jobs, int threads) {
  std::vector<std::vector<Row>> out(jobs.size());
  const auto n = static_cast<long>(jobs.size());
  if (threads > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = jobs[static_cast<std::size_t>(i)]();
  } else {
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = jobs[static_cast<std::size_t>(i)]();
  }
  return out;
}

SuiteResult collect(std::string id, std::vector<std::vector<Row>> parts) {
  SuiteResult res;
  res.suite_id = std::move(id);
  for (auto& part : parts)
    for (Row& r : part) res.rows.push_back(std::move(r));
  return res;
}

const Row* find_row(const SuiteResult& s, const std::string& id) {
  for (const Row& r : s.rows)
    if (r.id == id) return &r;
  return nullptr;
}

std::string tag(double v) {
  std::string s = num(v);
  for (char& c : s)
    if (c == '-') c = 'm';
  return s;
}

Snap family_snap(const curves::TrajectoryFamilySpec& spec) {
  Snap s;
  s.add("family", "trajectory").add("alpha", spec.alpha).add("gamma", spec.gamma).add("K", spec.K);
  s.add("t0", spec.t0);
  return s;
}

}  // namespace

// ----------------------------------------------------------------------- rows

bool Row::evaluate() const {
  const bool numeric_ok =
      std::isnan(predicted) ||
      (std::isfinite(estimated) &&
       std::abs(predicted - estimated) <= std::max(std::isfinite(band) ? band : 0.0, tolerance));
  const bool verdict_ok = expected_verdict.empty() || expected_verdict == observed_verdict;
  return numeric_ok && verdict_ok;
}

std::size_t SuiteResult::passed() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const Row& r) { return r.pass; }));
}

std::size_t SuiteResult::failed() const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [](const Row& r) { return !r.pass && !r.experimental; }));
}

// ------------------------------------------------------------------- planners

double spiral_core_radius(const curves::PowerSpiralSpec& spec, double eps) {
  spec.validate();
  require(eps > 0.0, "spiral_core_radius: eps must be positive");
  auto gap = [&](double phi) { return spec.radius(phi) - spec.radius(phi + kTwoPi); };
  double lo = std::log(spec.phi_min), hi = std::log(spec.phi_min) + 1.0;
  if (gap(spec.phi_min) <= eps) return spec.radius(spec.phi_min);
  while (gap(std::exp(hi)) > eps) {
    hi += 2.0;
    require(hi < 700.0, "spiral_core_radius: turn gap never reaches eps");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(std::exp(mid)) > eps ? lo : hi) = mid;
  }
  return spec.radius(std::exp(lo));
}

SpiralPlan plan_spiral(const curves::PowerSpiralSpec& spec, double max_chord, double kappa,
                       std::size_t limit, double chord_factor) {
  require(max_chord > 0.0, "plan_spiral: max_chord must be positive");
  require(kappa > 0.0 && kappa <= 1.0, "plan_spiral: kappa must lie in (0, 1]");
  SpiralPlan plan;
  plan.max_chord = max_chord;
  plan.r_min = kappa * spiral_core_radius(spec, chord_factor * max_chord);
  plan.samples = curves::power_spiral_sample_count(spec, plan.r_min, max_chord, limit);
  return plan;
}

double trajectory_core_time(double alpha, double gamma, double eps) {
  require(alpha > 0.0 && gamma > 0.0 && eps > 0.0, "trajectory_core_time: bad arguments");
  auto gap = [&](double t) {
    return kTwoPi * std::hypot(alpha * std::pow(t, -alpha - 1.0), gamma * std::pow(t, -gamma - 1.0));
  };
  double lo = std::log(1e-6), hi = std::log(1e15);
  require(gap(std::exp(hi)) < eps, "trajectory_core_time: eps too small");
  if (gap(std::exp(lo)) <= eps) return std::exp(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(std::exp(mid)) > eps ? lo : hi) = mid;
  }
  return std::exp(lo);
}

TrajectoryPlan plan_trajectory(const curves::TrajectoryFamilySpec& spec, double max_chord,
                               double lambda, std::size_t limit, double chord_factor) {
  require(max_chord > 0.0, "plan_trajectory: max_chord must be positive");
  require(lambda > 0.0, "plan_trajectory: lambda must be positive");
  TrajectoryPlan plan;
  plan.max_chord = max_chord;
  plan.t_max = std::max(lambda * trajectory_core_time(spec.alpha, spec.gamma, chord_factor * max_chord),
                        2.0 * spec.t0);
  plan.samples = curves::phase_trajectory_sample_count(spec, plan.t_max, max_chord, limit);
  return plan;
}

double trajectory_prediction(double alpha, double gamma) {
  require(alpha > 0.0 && gamma > 0.0, "trajectory_prediction: alpha and gamma must be positive");
  if (alpha > 1.0) return 1.0;
  if (gamma >= alpha) return 2.0 / (1.0 + alpha);
  return 2.0 - (alpha + gamma) / (1.0 + gamma);
}

// ----------------------------------------------------------------------- hopf

curves::NormalFormSpec hopf_spec(int p, int l) {
  require(p >= 2, "hopf: p must be at least 2");
  require(l >= 1, "hopf: l must be at least 1");
  curves::NormalFormSpec spec;
  spec.l = l;
  spec.a.assign(static_cast<std::size_t>(l), 0.0);
  spec.b.assign(static_cast<std::size_t>(p - 1), 0.0);
  spec.b.back() = p % 2 == 0 ? -1.0 : 1.0;
  spec.omega = 1.0;
  return spec;
}

double hopf_prediction(int p, int l) {
  return trajectory_prediction(1.0 / (2.0 * l), 1.0 / (p - 1.0));
}

HopfTrajectory hopf_trajectory(const HopfSetup& setup) {
  const curves::NormalFormSpec spec = hopf_spec(setup.p, setup.l);
  require(setup.r0 > 0.0, "hopf: r0 must be positive");
  require(setup.lambda > 0.0 && setup.max_chord > 0.0, "hopf: lambda and max_chord must be positive");
  require(setup.transient_tolerance > 0.0 && setup.transient_tolerance < 1.0,
          "hopf: transient_tolerance must lie in (0, 1)");
  const double p = setup.p, l2 = 2.0 * setup.l;
  const double b = spec.leading_b();
  // In backward time s = -t: r^-2l = 2l (s + c), |z|^-(p-1) = (p-1)|b| (s + c).
  const double c = std::pow(setup.r0, -l2) / l2;
  const double z_sign = setup.p % 2 == 0 ? (b < 0.0 ? -1.0 : 1.0) : 1.0;
  const double w0 = std::pow((p - 1.0) * std::abs(b) * c, -1.0 / (p - 1.0));

  const double alpha = 1.0 / l2, gamma = 1.0 / (p - 1.0);
  const double t_end = setup.lambda * trajectory_core_time(alpha, gamma, 4.0 * setup.max_chord);
  // Length of the planar part: integral of r ds.
  const double length = std::pow(l2, -alpha) *
                        (std::pow(t_end + c, 1.0 - alpha) - std::pow(c, 1.0 - alpha)) /
                        (1.0 - alpha);
  const double estimate =
      1.2 * (length / (0.9 * setup.max_chord) + t_end / (0.98 * curves::kPhaseStep));
  if (estimate > static_cast<double>(setup.budget))
    throw BudgetError("hopf: about " + num(estimate) + " samples needed for T=" + num(t_end) +
                          " at max_chord " + num(setup.max_chord) + ", budget " +
                          std::to_string(setup.budget),
                      0.0, static_cast<std::size_t>(estimate));

  curves::IntegrationResult ir = curves::integrate_normal_form(
      spec, {setup.r0, 0.0, z_sign * w0}, {0.0, -t_end}, setup.tol,
      curves::Sampling{setup.budget, setup.max_chord});

  // Windowed decay exponent of r against s on octaves; the transient ends
  // where it stays within transient_tolerance of the value on the last octave.
  const Curve& full = ir.curve;
  const std::size_t n = full.size();
  std::vector<double> s(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::abs(full.param(i));
    const Point3 q = full.point(i);
    r[i] = std::hypot(q[0], q[1]);
  }
  auto r_at = [&](double v) {
    const auto it = std::lower_bound(s.begin(), s.end(), v);
    const auto j = std::clamp<std::size_t>(static_cast<std::size_t>(it - s.begin()), 1, n - 1);
    const double w = (v - s[j - 1]) / (s[j] - s[j - 1]);
    return r[j - 1] + w * (r[j] - r[j - 1]);
  };
  auto exponent = [&](double v) { return std::log(r_at(2.0 * v) / r_at(v)) / std::log(2.0); };
  const double s_last = s.back() / 2.0;
  const double reference = exponent(s_last);
  double cut = s_last;
  for (double v = s_last; v > s[1]; v /= 1.25) {
    if (std::abs(exponent(v) - reference) > setup.transient_tolerance * std::abs(reference)) break;
    cut = v;
  }
  require(cut <= s.back() / 16.0,
          "hopf: the decay exponent does not settle before the last 4 octaves; increase lambda");

  const auto first = static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), cut) - s.begin());
  std::vector<double> params(full.params().begin() + static_cast<std::ptrdiff_t>(first), full.params().end());
  std::vector<double> coords(full.coords().begin() + static_cast<std::ptrdiff_t>(3 * first),
                             full.coords().end());
  Provenance prov = full.provenance();
  prov.add("transient_end", cut);
  HopfTrajectory out{Curve(3, std::move(params), std::move(coords), full.max_chord(), std::move(prov), true),
                     cut, exponent(cut), ir.truncated, ir.truncation_reason, setup.p % 2 == 1};
  return out;
}

// ---------------------------------------------------------------------- suites

SuiteResult suite_tricot_baselines(const SuiteConfig& cfg) {
  std::vector<Job> jobs;
  for (const ChirpRow& cr : cfg.chirps) {
    curves::ChirpSpec spec;
    spec.alpha = cr.alpha;
    spec.beta = cr.beta;
    Snap snap;
    snap.add("family", "chirp").add("alpha", cr.alpha).add("beta", cr.beta);
    snap.add("budget", static_cast<double>(cfg.chirp_budget)).add("kappa", cfg.chirp_kappa);
    Row t = make_row("chirp_a" + tag(cr.alpha) + "_b" + tag(cr.beta), "dimension", snap.str(),
                     chirp_prediction(cr.alpha, cr.beta), cfg.planar_tolerance);
    jobs.push_back(guarded({t}, [spec, cfg, snap](std::vector<Row> rows) {
      const fractal::ChirpPlan plan = fractal::plan_chirp(spec, cfg.chirp_budget, cfg.chirp_kappa);
      const Curve c = curves::gen_chirp_graph(spec, 1.0, {cfg.chirp_budget, plan.max_chord}, plan.tau_end);
      Snap s = snap;
      s.add("max_chord", plan.max_chord).add("tau_end", plan.tau_end).add("samples", static_cast<double>(c.size()));
      rows[0].spec = s.str();
      measure_dimension(rows[0], c);
      return rows;
    }));
  }
  for (const SpiralRow& sr : cfg.spirals) {
    curves::PowerSpiralSpec spec;
    spec.alpha = sr.alpha;
    Snap snap;
    snap.add("family", "power_spiral").add("alpha", sr.alpha).add("max_chord", sr.max_chord);
    snap.add("kappa", sr.kappa);
    Row t = make_row("spiral_a" + tag(sr.alpha), "dimension", snap.str(), spiral_prediction(sr.alpha),
                     cfg.planar_tolerance);
    jobs.push_back(guarded({t}, [spec, sr, cfg, snap](std::vector<Row> rows) {
      const SpiralPlan plan = plan_spiral(spec, sr.max_chord, sr.kappa, cfg.budget);
      const Curve c = curves::gen_power_spiral(spec, plan.r_min, {cfg.budget, sr.max_chord});
      Snap s = snap;
      s.add("r_min", plan.r_min).add("samples", static_cast<double>(c.size()));
      rows[0].spec = s.str();
      measure_dimension(rows[0], c);
      return rows;
    }));
  }
  return collect("tricot", run_jobs(jobs, cfg.row_threads));
}

SuiteResult suite_theorem_phase(const SuiteConfig& cfg) {
  std::vector<Job> jobs;
  auto trajectory_job = [&](const TrajectoryRow& tr, const std::string& id, bool envelope) {
    curves::TrajectoryFamilySpec spec;
    spec.alpha = tr.alpha;
    spec.gamma = tr.gamma;
    Snap snap = family_snap(spec);
    snap.add("max_chord", tr.max_chord);
    const bool rectifiable = tr.alpha > 1.0;
    if (rectifiable)
      snap.add("t_max", cfg.rectifiable_t_max);
    else
      snap.add("lambda", tr.lambda);
    std::vector<Row> templates{make_row(id, "dimension", snap.str(),
                                        trajectory_prediction(tr.alpha, tr.gamma),
                                        cfg.spatial_tolerance)};
    if (rectifiable) {
      Row v = make_row(id + "_rectifiable", "rectifiability", snap.str(), kNaN, 0.0);
      v.expected_verdict = "rectifiable";
      templates.push_back(v);
      templates.push_back(make_row(id + "_tail", "tail_exponent", snap.str(), tr.alpha - 1.0, 0.2));
    }
    if (envelope) {
      Row v = make_row(id + "_envelope", "envelope", snap.str(), kNaN, cfg.spatial_tolerance);
      v.expected_verdict = "inside";
      templates.push_back(v);
    }
    return guarded(templates, [spec, tr, cfg, snap, rectifiable, envelope](std::vector<Row> rows) {
      double t_max = cfg.rectifiable_t_max;
      if (!rectifiable)
        t_max = plan_trajectory(spec, tr.max_chord, tr.lambda, cfg.budget).t_max;
      const Curve c = curves::gen_phase_trajectory(spec, t_max, {cfg.budget, tr.max_chord});
      Snap s = snap;
      s.add("t_max_used", t_max).add("samples", static_cast<double>(c.size()));
      for (Row& r : rows) r.spec = s.str();
      measure_dimension(rows[0], c);
      std::size_t k = 1;
      if (rectifiable) {
        const phase::ArcLengthReport arc = phase::arc_length_profile(c);
        Row& v = rows[k++];
        v.observed_verdict = arc.verdict;
        v.estimated = arc.limit_stability;
        v.diagnostic = "limit=" + num(arc.limit) + " stability=" + num(arc.limit_stability);
        finish(v);
        Row& e = rows[k++];
        e.estimated = arc.tail_exponent;
        e.band = arc.band;
        finish(e);
      }
      if (envelope) {
        Row& v = rows[k++];
        const double d = rows[0].estimated;
        const double slack = std::max(rows[0].band, v.tolerance);
        const double lo = 2.0 / (1.0 + tr.alpha), hi = 2.0 - tr.alpha;
        v.estimated = d;
        v.observed_verdict = d >= lo - slack && d < hi + slack ? "inside" : "outside";
        v.diagnostic = "range=[" + num(lo) + "," + num(hi) + ")";
        finish(v);
      }
      return rows;
    });
  };

  for (const TrajectoryRow& tr : cfg.trajectories) {
    const std::string id = "traj_a" + tag(tr.alpha) + "_g" + tag(tr.gamma);
    jobs.push_back(trajectory_job(tr, id, tr.alpha < 1.0));
  }
  // Continuity across gamma = alpha.
  const double ca = cfg.continuity_alpha;
  // Resolution follows the grid row at (alpha, gamma >= alpha) when there is one.
  TrajectoryRow below{ca, ca * (1.0 - cfg.continuity_offset), 5e-5, 20.0};
  TrajectoryRow above{ca, ca * (1.0 + cfg.continuity_offset), 5e-5, 20.0};
  for (const TrajectoryRow& tr : cfg.trajectories)
    if (tr.alpha == ca && tr.gamma >= ca) {
      below.max_chord = above.max_chord = tr.max_chord;
      below.lambda = above.lambda = tr.lambda;
      break;
    }
  jobs.push_back(trajectory_job(below, "continuity_below", false));
  jobs.push_back(trajectory_job(above, "continuity_above", false));

  // Integrated cubic system against its exact solution over one decade.
  for (const TrajectoryRow& tr : cfg.trajectories) {
    if (tr.alpha > 1.0) continue;
    curves::TrajectoryFamilySpec spec;
    spec.alpha = tr.alpha;
    spec.gamma = tr.gamma;
    spec.t0 = cfg.oracle_t_begin;
    Snap snap = family_snap(spec);
    snap.add("t_end", 10.0 * cfg.oracle_t_begin).add("max_chord", cfg.oracle_max_chord);
    Row t = make_row("oracle_a" + tag(tr.alpha) + "_g" + tag(tr.gamma), "oracle_distance",
                     snap.str(), 0.0, 1e-5);
    jobs.push_back(guarded({t}, [spec, cfg](std::vector<Row> rows) {
      const double t0 = cfg.oracle_t_begin;
      const Point3 p0 = curves::cubic_system_solution(spec, t0);
      const curves::IntegrationResult ir = curves::integrate_cubic_system(
          spec, {p0[0], p0[1], p0[2]}, {t0, 10.0 * t0}, {1e-11, 1e-13},
          curves::Sampling{cfg.budget, cfg.oracle_max_chord});
      Row& r = rows[0];
      if (ir.truncated) {
        r.diagnostic = "integration truncated: " + ir.truncation_reason;
        r.estimated = kNaN;
        finish(r);
        return rows;
      }
      double sup = 0.0;
      for (std::size_t i = 0; i < ir.curve.size(); ++i) {
        const Point3 e = curves::cubic_system_solution(spec, ir.curve.param(i));
        const Point3 q = ir.curve.point(i);
        sup = std::max(sup, std::hypot(q[0] - e[0], q[1] - e[1], q[2] - e[2]));
      }
      r.estimated = sup / ir.curve.diameter();
      r.diagnostic = "steps=" + std::to_string(ir.stats.accepted);
      finish(r);
      return rows;
    }));
  }

  SuiteResult res = collect("theorem_phase", run_jobs(jobs, cfg.row_threads));

  Snap snap;
  snap.add("alpha", ca);
  Row pc = make_row("continuity_prediction", "prediction_gap", snap.str(), 2.0 / (1.0 + ca), 1e-12);
  pc.estimated = 2.0 - (ca + ca) / (1.0 + ca);
  res.rows.push_back(finish(pc));

  snap.add("gamma_below", below.gamma).add("gamma_above", above.gamma);
  Row ce = make_row("continuity_estimate", "estimate_gap", snap.str(), 0.0, 0.0);
  const Row* lo = find_row(res, "continuity_below");
  const Row* hi = find_row(res, "continuity_above");
  if (lo && hi && std::isfinite(lo->estimated) && std::isfinite(hi->estimated)) {
    ce.estimated = std::abs(hi->estimated - lo->estimated);
    ce.band = 2.0 * std::max(lo->band, hi->band);
  } else {
    ce.diagnostic = "an estimate next to gamma = alpha is missing";
  }
  res.rows.push_back(finish(ce));
  return res;
}

SuiteResult suite_projections(const SuiteConfig& cfg) {
  std::vector<Job> jobs;
  for (const TrajectoryRow& pr : cfg.projections) {
    curves::TrajectoryFamilySpec spec;
    spec.alpha = pr.alpha;
    spec.gamma = pr.gamma;
    spec.t0 = 3.0;  // z reaches 1/3, so the coarse scales see resolved oscillations
    Snap snap = family_snap(spec);
    snap.add("max_chord", pr.max_chord).add("kappa", pr.lambda);
    const std::string id = "proj_a" + tag(pr.alpha) + "_g" + tag(pr.gamma);
    const double pred = 2.0 - (pr.alpha + pr.gamma) / (1.0 + pr.gamma);
    std::vector<Row> templates{
        make_row(id + "_xz", "dimension", snap.str(), pred, cfg.planar_tolerance),
        make_row(id + "_yz", "dimension", snap.str(), pred, cfg.planar_tolerance),
        make_row(id + "_yz_envelope", "envelope_exponent", snap.str(), pr.alpha / pr.gamma, 0.05)};
    jobs.push_back(guarded(templates, [spec, pr, cfg, snap](std::vector<Row> rows) {
      // Over z = t^-gamma the projections are (alpha/gamma, 1/gamma)-chirps;
      // the run stops at kappa times the chirp's core scale.
      const double beta = 1.0 / spec.gamma;
      const double tau_c = std::pow(beta * 4.0 * pr.max_chord / kTwoPi, 1.0 / (beta + 1.0));
      const double t_max = std::max(std::pow(pr.lambda * tau_c, -1.0 / spec.gamma), 2.0 * spec.t0);
      const Curve c = curves::gen_phase_trajectory(spec, t_max, {cfg.budget, pr.max_chord});
      Snap s = snap;
      s.add("t_max", t_max).add("samples", static_cast<double>(c.size()));
      for (Row& r : rows) r.spec = s.str();
      const Curve xz = phase::project(c, phase::Plane::kXZ);
      const Curve yz = phase::project(c, phase::Plane::kYZ);
      measure_dimension(rows[0], xz);
      measure_dimension(rows[1], yz);
      const regression::LineFit env = phase::fit_envelope_exponent(yz, 1, 0);
      rows[2].estimated = env.slope;
      rows[2].band = 2.0 * env.slope_se;
      finish(rows[2]);
      return rows;
    }));
  }
  for (double a : cfg.oscillatory_alphas) {
    curves::TrajectoryFamilySpec spec;
    spec.alpha = a;
    spec.gamma = 1.0;
    spec.t0 = 3.0;
    Snap snap = family_snap(spec);
    snap.add("budget", static_cast<double>(cfg.chirp_budget)).add("kappa", cfg.chirp_kappa);
    Row t = make_row("oscillatory_a" + tag(a), "dimension", snap.str(), (3.0 - a) / 2.0,
                     cfg.planar_tolerance);
    jobs.push_back(guarded({t}, [spec, cfg, snap](std::vector<Row> rows) {
      curves::ChirpSpec chirp;
      chirp.alpha = spec.alpha;
      chirp.beta = 1.0;
      const fractal::ChirpPlan plan = fractal::plan_chirp(chirp, cfg.chirp_budget, cfg.chirp_kappa);
      const double t_max = 1.0 / plan.tau_end;
      const Curve c = curves::gen_reflected_solution(spec, t_max, {cfg.chirp_budget, plan.max_chord});
      Snap s = snap;
      s.add("max_chord", plan.max_chord).add("t_max", t_max).add("samples", static_cast<double>(c.size()));
      rows[0].spec = s.str();
      measure_dimension(rows[0], c);
      return rows;
    }));
  }
  return collect("projections", run_jobs(jobs, cfg.row_threads));
}

SuiteResult suite_poincare(const SuiteConfig& cfg) {
  std::vector<Job> jobs;
  for (double a : cfg.poincare_alphas) {
    curves::TrajectoryFamilySpec spec;
    spec.alpha = a;
    spec.gamma = 1.0;
    Snap snap = family_snap(spec);
    snap.add("t_max", cfg.poincare_t_max).add("max_chord", cfg.poincare_max_chord);
    snap.add("section_angle", 0.0);
    Row t = make_row("return_a" + tag(a), "return_exponent", snap.str(), 1.0 / a + 1.0,
                     cfg.poincare_tolerance);
    jobs.push_back(guarded({t}, [spec, cfg](std::vector<Row> rows) {
      const Curve c = curves::gen_phase_trajectory(spec, cfg.poincare_t_max,
                                                   {cfg.budget, cfg.poincare_max_chord});
      const phase::PolarProfile prof = phase::unwrap_phase(phase::project(c, phase::Plane::kXY));
      const phase::ReturnSequence seq = phase::poincare_sequence(prof, 0.0);
      const phase::ExponentEstimate e = phase::fit_return_exponent(seq);
      Row& r = rows[0];
      r.estimated = e.value;
      r.band = e.band;
      r.diagnostic = "returns=" + std::to_string(seq.radii.size()) +
                     " interpolation_error=" + num(seq.interpolation_error);
      finish(r);
      return rows;
    }));
  }
  return collect("poincare", run_jobs(jobs, cfg.row_threads));
}

SuiteResult suite_hopf(const SuiteConfig& cfg) {
  std::vector<Job> jobs;
  auto add = [&](int p, int l, double chord, double lambda, bool experimental) {
    HopfSetup setup;
    setup.p = p;
    setup.l = l;
    setup.max_chord = chord;
    setup.lambda = lambda;
    setup.budget = cfg.budget;
    const curves::NormalFormSpec spec = hopf_spec(p, l);
    Snap snap;
    snap.add("family", "normal_form").add("l", l).add("p", p).add("a0", 0.0);
    snap.add("b_p", spec.leading_b()).add("r0", setup.r0).add("max_chord", chord).add("lambda", lambda);
    // The closing formula for l > 1 is reported as stated.
    const double pred = l == 1 ? hopf_prediction(p, l)
                               : ((4.0 * l - 1.0) * p - 2.0 * l + 1.0) / (2.0 * l * p);
    Row t = make_row("hopf_l" + std::to_string(l) + "_p" + std::to_string(p), "dimension", snap.str(),
                     pred, cfg.spatial_tolerance);
    t.experimental = experimental;
    jobs.push_back(guarded({t}, [setup, snap](std::vector<Row> rows) {
      const HopfTrajectory h = hopf_trajectory(setup);
      Row& r = rows[0];
      Snap s = snap;
      s.add("transient_end", h.transient_end).add("samples", static_cast<double>(h.curve.size()));
      r.spec = s.str();
      if (h.truncated) {
        r.diagnostic = "integration truncated: " + h.truncation_reason;
        r.estimated = kNaN;
        finish(r);
        return rows;
      }
      measure_dimension(r, h.curve);
      std::string d = "decay_exponent=" + num(h.decay_exponent);
      if (h.sign_flagged) d += " odd p: b_p=+1, z>0 branch";
      r.diagnostic = r.diagnostic.empty() ? d : r.diagnostic + " " + d;
      return rows;
    }));
  };
  for (int p : cfg.hopf_p) add(p, 1, cfg.hopf_max_chord, cfg.hopf_lambda, false);
  for (int p : cfg.hopf_experimental_p)
    add(p, 2, cfg.hopf_experimental_max_chord, cfg.hopf_experimental_lambda, true);
  return collect("hopf", run_jobs(jobs, cfg.row_threads));
}

SuiteResult suite_degenerate_content(const SuiteConfig& cfg) {
  std::vector<Job> jobs;
  constexpr double kAlpha = 0.5;
  const double s_dim = 2.0 / (1.0 + kAlpha);
  for (const ContentRow& cr : cfg.content) {
    curves::PowerSpiralSpec spec;
    spec.alpha = kAlpha;
    spec.log_exponent = cr.log_exponent;
    if (cr.log_exponent > 0.0) spec.phi_min = std::exp(cr.log_exponent / kAlpha);
    Snap snap;
    snap.add("family", "power_spiral").add("alpha", kAlpha).add("log_exponent", cr.log_exponent);
    snap.add("phi_min", spec.phi_min).add("max_chord", cr.max_chord).add("kappa", cr.kappa);
    snap.add("pixels_per_eps", cfg.content_pixels);
    const std::string id = "content_b" + tag(cr.log_exponent);
    Row v = make_row(id + "_verdict", "content", snap.str(), kNaN, 0.0);
    v.expected_verdict = cr.log_exponent == 0.0 ? "nondegenerate" : "degenerate-drift";
    std::vector<Row> templates{make_row(id, "dimension", snap.str(), s_dim, cfg.content_tolerance), v,
                               make_row(id + "_drift_rate", "drift_rate", snap.str(), kNaN, 0.0)};
    jobs.push_back(guarded(templates, [spec, cr, cfg, snap, s_dim](std::vector<Row> rows) {
      const SpiralPlan plan = plan_spiral(spec, cr.max_chord, cr.kappa, cfg.budget);
      const Curve c = curves::gen_power_spiral(spec, plan.r_min, {cfg.budget, cr.max_chord});
      Snap s = snap;
      s.add("r_min", plan.r_min).add("samples", static_cast<double>(c.size()));
      for (Row& r : rows) r.spec = s.str();
      measure_dimension(rows[0], c);
      const fractal::ScaleLadder ladder = rows[0].counts->ladder;
      const fractal::MeasureProfile m =
          fractal::epsilon_measure(c, ladder, ladder.eps_min() / cfg.content_pixels);
      const fractal::ContentProfile prof = fractal::content_profile(m, s_dim);
      Row& v = rows[1];
      v.observed_verdict = prof.verdict;
      v.estimated = prof.spread;
      v.diagnostic = std::string("monotone=") + (prof.monotone ? "yes" : "no");
      finish(v);
      // Growth of log quotient per unit of log(1/eps), comparable across ladders.
      Row& d = rows[2];
      d.estimated = std::log(prof.quotients.back() / prof.quotients.front()) /
                    std::log(prof.epsilons.front() / prof.epsilons.back());
      finish(d);
      return rows;
    }));
  }
  SuiteResult res = collect("degenerate_content", run_jobs(jobs, cfg.row_threads));

  // Drift grows with the log exponent.
  std::vector<std::pair<double, double>> spreads;
  for (const ContentRow& cr : cfg.content)
    if (cr.log_exponent > 0.0)
      if (const Row* r = find_row(res, "content_b" + tag(cr.log_exponent) + "_drift_rate"))
        spreads.emplace_back(cr.log_exponent, r->estimated);
  std::sort(spreads.begin(), spreads.end());
  for (std::size_t k = 0; k + 1 < spreads.size(); ++k) {
    Snap snap;
    snap.add("log_exponent_low", spreads[k].first).add("log_exponent_high", spreads[k + 1].first);
    Row r = make_row("drift_b" + tag(spreads[k + 1].first) + "_vs_b" + tag(spreads[k].first),
                     "drift_order", snap.str(), kNaN, 0.0);
    r.expected_verdict = "larger";
    r.estimated = spreads[k + 1].second / spreads[k].second;
    r.observed_verdict = std::isfinite(r.estimated) && r.estimated > 1.0 ? "larger" : "not-larger";
    res.rows.push_back(finish(r));
  }
  return res;
}

SuiteResult run_suite(const std::string& name, const SuiteConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  if (name == "tricot")
    r = suite_tricot_baselines(config);
  else if (name == "theorem_phase")
    r = suite_theorem_phase(config);
  else if (name == "projections")
    r = suite_projections(config);
  else if (name == "poincare")
    r = suite_poincare(config);
  else if (name == "hopf")
    r = suite_hopf(config);
  else if (name == "degenerate_content")
    r = suite_degenerate_content(config);
  else
    throw PreconditionError("unknown suite '" + name +
                            "' (tricot, theorem_phase, projections, poincare, hopf, degenerate_content)");
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// --------------------------------------------------------------------- config

namespace {

std::vector<std::vector<double>> parse_tuples(const std::string& text, const std::string& key,
                                              std::size_t arity) {
  std::vector<std::vector<double>> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ';')) {
    std::vector<double> v = io::parse_doubles(item, key);
    if (v.empty()) continue;
    if (v.size() != arity)
      throw PreconditionError(key + ": each entry needs " + std::to_string(arity) + " numbers, got '" +
                              item + "'");
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<int> to_ints(const std::vector<double>& v, const std::string& key) {
  std::vector<int> out;
  for (double d : v) {
    if (d != std::floor(d)) throw PreconditionError(key + ": expected integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

}  // namespace

SuiteConfig SuiteConfig::from(const io::Config& c) {
  static const std::vector<std::string> known{
      "out_dir", "suites", "row_threads", "tolerance.planar", "tolerance.spatial", "budget",
      "tricot.spirals", "tricot.chirps", "tricot.chirp_budget", "tricot.chirp_kappa",
      "theorem_phase.rows", "theorem_phase.rectifiable_t_max", "theorem_phase.continuity_alpha",
      "theorem_phase.continuity_offset", "theorem_phase.oracle_t_begin",
      "theorem_phase.oracle_max_chord", "projections.rows", "projections.oscillatory_alphas",
      "poincare.alphas", "poincare.t_max", "poincare.max_chord", "poincare.tolerance", "hopf.p",
      "hopf.max_chord", "hopf.lambda", "hopf.experimental_p", "hopf.experimental_max_chord",
      "hopf.experimental_lambda", "content.rows", "content.tolerance", "content.pixels"};
  for (const auto& [k, v] : c.values())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw PreconditionError("unknown suite configuration key '" + k + "'");

  SuiteConfig s;
  if (c.has("suites")) {
    s.suites.clear();
    std::string item;
    std::istringstream in(c.get("suites", ""));
    while (std::getline(in, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (!item.empty()) s.suites.push_back(item);
    }
  }
  s.row_threads = static_cast<int>(c.get_int("row_threads", s.row_threads));
  require(s.row_threads >= 1, "row_threads must be at least 1");
  s.planar_tolerance = c.get_double("tolerance.planar", s.planar_tolerance);
  s.spatial_tolerance = c.get_double("tolerance.spatial", s.spatial_tolerance);
  s.budget = static_cast<std::size_t>(c.get_int("budget", static_cast<long long>(s.budget)));
  if (c.has("tricot.spirals")) {
    s.spirals.clear();
    for (const auto& v : parse_tuples(c.get("tricot.spirals", ""), "tricot.spirals", 3))
      s.spirals.push_back({v[0], v[1], v[2]});
  }
  if (c.has("tricot.chirps")) {
    s.chirps.clear();
    for (const auto& v : parse_tuples(c.get("tricot.chirps", ""), "tricot.chirps", 2))
      s.chirps.push_back({v[0], v[1]});
  }
  s.chirp_budget = static_cast<std::size_t>(
      c.get_int("tricot.chirp_budget", static_cast<long long>(s.chirp_budget)));
  s.chirp_kappa = c.get_double("tricot.chirp_kappa", s.chirp_kappa);
  if (c.has("theorem_phase.rows")) {
    s.trajectories.clear();
    for (const auto& v : parse_tuples(c.get("theorem_phase.rows", ""), "theorem_phase.rows", 4))
      s.trajectories.push_back({v[0], v[1], v[2], v[3]});
  }
  s.rectifiable_t_max = c.get_double("theorem_phase.rectifiable_t_max", s.rectifiable_t_max);
  s.continuity_alpha = c.get_double("theorem_phase.continuity_alpha", s.continuity_alpha);
  s.continuity_offset = c.get_double("theorem_phase.continuity_offset", s.continuity_offset);
  s.oracle_t_begin = c.get_double("theorem_phase.oracle_t_begin", s.oracle_t_begin);
  s.oracle_max_chord = c.get_double("theorem_phase.oracle_max_chord", s.oracle_max_chord);
  if (c.has("projections.rows")) {
    s.projections.clear();
    for (const auto& v : parse_tuples(c.get("projections.rows", ""), "projections.rows", 4))
      s.projections.push_back({v[0], v[1], v[2], v[3]});
  }
  s.oscillatory_alphas = c.get_doubles("projections.oscillatory_alphas", s.oscillatory_alphas);
  s.poincare_alphas = c.get_doubles("poincare.alphas", s.poincare_alphas);
  s.poincare_t_max = c.get_double("poincare.t_max", s.poincare_t_max);
  s.poincare_max_chord = c.get_double("poincare.max_chord", s.poincare_max_chord);
  s.poincare_tolerance = c.get_double("poincare.tolerance", s.poincare_tolerance);
  if (c.has("hopf.p")) s.hopf_p = to_ints(c.get_doubles("hopf.p", {}), "hopf.p");
  s.hopf_max_chord = c.get_double("hopf.max_chord", s.hopf_max_chord);
  s.hopf_lambda = c.get_double("hopf.lambda", s.hopf_lambda);
  if (c.has("hopf.experimental_p"))
    s.hopf_experimental_p = to_ints(c.get_doubles("hopf.experimental_p", {}), "hopf.experimental_p");
  s.hopf_experimental_max_chord = c.get_double("hopf.experimental_max_chord", s.hopf_experimental_max_chord);
  s.hopf_experimental_lambda = c.get_double("hopf.experimental_lambda", s.hopf_experimental_lambda);
  if (c.has("content.rows")) {
    s.content.clear();
    for (const auto& v : parse_tuples(c.get("content.rows", ""), "content.rows", 3))
      s.content.push_back({v[0], v[1], v[2]});
  }
  s.content_tolerance = c.get_double("content.tolerance", s.content_tolerance);
  s.content_pixels = static_cast<int>(c.get_int("content.pixels", s.content_pixels));
  require(s.content_pixels >= 8, "content.pixels must be at least 8");
  return s;
}

// --------------------------------------------------------------------- report

std::vector<std::string> emit_report(const std::vector<SuiteResult>& results,
                                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory " + out_dir + ": " + ec.message());
  std::vector<std::string> written;
  auto put = [&](const fs::path& path, const std::string& text) {
    io::write_file(path.string(), text);
    written.push_back(path.string());
  };
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + '"';
  };
  auto number = [](double v) { return std::isnan(v) ? std::string("nan") : io::format_double(v); };

  std::ostringstream summary;
  summary << "suite,rows,passed,failed,experimental\n";
  for (const SuiteResult& s : results) {
    std::ostringstream csv;
    csv << "row,quantity,spec,predicted,estimated,band,tolerance,expected_verdict,"
           "observed_verdict,experimental,pass,diagnostic\n";
    std::size_t experimental = 0;
    for (const Row& r : s.rows) {
      experimental += r.experimental ? 1 : 0;
      csv << field(r.id) << ',' << field(r.quantity) << ',' << field(r.spec) << ','
          << number(r.predicted) << ',' << number(r.estimated) << ',' << number(r.band) << ','
          << number(r.tolerance) << ',' << field(r.expected_verdict) << ','
          << field(r.observed_verdict) << ',' << (r.experimental ? "true" : "false") << ','
          << (r.pass ? "true" : "false") << ',' << field(r.diagnostic) << '\n';
      if (r.counts) {
        std::ostringstream cc;
        io::write_counts(cc, *r.counts);
        fs::create_directories(fs::path(out_dir) / s.suite_id, ec);
        if (ec) throw Error("cannot create " + (fs::path(out_dir) / s.suite_id).string());
        put(fs::path(out_dir) / s.suite_id / (r.id + "_counts.csv"), cc.str());
      }
    }
    put(fs::path(out_dir) / (s.suite_id + ".csv"), csv.str());
    summary << s.suite_id << ',' << s.rows.size() << ',' << s.passed() << ',' << s.failed() << ','
            << experimental << '\n';
  }
  put(fs::path(out_dir) / "summary.csv", summary.str());
  return written;
}

}  // namespace spiraldim::experiments
