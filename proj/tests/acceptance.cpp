// Runs the twelve acceptance criteria at their stated tolerances and prints
// one PASS/FAIL line per criterion. Exit status is the number of failures.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "spiraldim/curves.hpp"
#include "spiraldim/experiments.hpp"
#include "spiraldim/fractal.hpp"
#include "spiraldim/phase.hpp"

using namespace spiraldim;
namespace ex = spiraldim::experiments;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream note;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note << " [" << what << "]";
    }
  }
};

const ex::Row* find(const std::vector<ex::SuiteResult>& results, const std::string& suite,
                    const std::string& id) {
  for (const auto& r : results)
    if (r.suite_id == suite)
      for (const auto& row : r.rows)
        if (row.id == id) return &row;
  return nullptr;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

// |estimated - predicted| <= tol on the named rows.
void within(Check& c, const std::vector<ex::SuiteResult>& res, const std::string& suite,
            const std::vector<std::string>& ids, double tol) {
  for (const auto& id : ids) {
    const ex::Row* r = find(res, suite, id);
    if (!r) {
      c.require(false, id + " missing");
      continue;
    }
    const double d = std::abs(r->estimated - r->predicted);
    c.note << ' ' << id << '=' << fmt(r->estimated);
    c.require(std::isfinite(d) && d <= tol, id + " off by " + fmt(d) + (r->diagnostic.empty() ? "" : ": " + r->diagnostic));
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::uint64_t brute_count(const Curve& c, double eps) {
  std::set<std::tuple<long long, long long, long long>> cells;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point3 p = c.point(i);
    cells.emplace(static_cast<long long>(std::floor(p[0] / eps)), static_cast<long long>(std::floor(p[1] / eps)),
                  c.ambient() == 3 ? static_cast<long long>(std::floor(p[2] / eps)) : 0);
  }
  return cells.size();
}

Curve phase_curve(double alpha, double beta, double t_end) {
  curves::ChirpSpec s;
  s.alpha = alpha;
  s.beta = beta;
  return curves::gen_chirp_phase_curve(s, 1.0, t_end, {5'000'000, 1e-3});
}

void properties(Check& c, const ex::SuiteConfig& cfg) {
  // Curves of the acceptance grids: tricot spiral and chirp, a spatial trajectory.
  std::vector<std::pair<std::string, Curve>> curves_;
  {
    curves::PowerSpiralSpec s;
    s.alpha = 0.5;
    const auto plan = ex::plan_spiral(s, 1e-4, 0.1, cfg.budget);
    curves_.emplace_back("spiral_a0.5", curves::gen_power_spiral(s, plan.r_min, {cfg.budget, 1e-4}));
    curves::ChirpSpec ch;
    ch.alpha = 0.5;
    const auto cp = fractal::plan_chirp(ch, cfg.chirp_budget, cfg.chirp_kappa);
    curves_.emplace_back("chirp_a0.5_b1", curves::gen_chirp_graph(ch, 1.0, {cfg.chirp_budget, cp.max_chord}, cp.tau_end));
    curves::TrajectoryFamilySpec f;
    const auto tp = ex::plan_trajectory(f, 5e-5, 20.0, cfg.budget);
    curves_.emplace_back("traj_a0.5_g1", curves::gen_phase_trajectory(f, tp.t_max, {cfg.budget, 5e-5}));
  }
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool monotone = true, shift_ok = true, scale_ok = true;
  for (const auto& [name, curve] : curves_) {
    const auto ladder = fractal::ladder_for_curve(curve);
    const auto counts = fractal::box_count(curve, ladder);
    for (std::size_t k = 0; k + 1 < counts.counts.size(); ++k) monotone &= counts.counts[k + 1] >= counts.counts[k];
    const auto base = fractal::fit_dimension(counts);
    const auto shifted = fractal::fit_dimension(fractal::box_count(curve, ladder, {u(rng), u(rng), u(rng)}, false));
    const bool s_ok = std::abs(shifted.value - base.value) < base.band;
    if (!s_ok) c.note << " shift:" << name << " moved " << fmt(std::abs(shifted.value - base.value)) << " band " << fmt(base.band);
    shift_ok &= s_ok;
    const Curve big = rescale(curve, 3.0);
    const auto scaled = fractal::fit_dimension(fractal::box_count(big, fractal::ladder_for_curve(big)));
    const bool r_ok = std::abs(scaled.value - base.value) < std::max(base.band, scaled.band);
    if (!r_ok) c.note << " rescale:" << name << " moved " << fmt(std::abs(scaled.value - base.value));
    scale_ok &= r_ok;
  }
  c.require(monotone, "box-count monotonicity");
  c.require(shift_ok, "grid-shift robustness");
  c.require(scale_ok, "rescaling invariance");

  // Brute-force equality on <= 1e4 points and <= 12 scales.
  bool brute_ok = true;
  for (int trial = 0; trial < 6; ++trial) {
    curves::PowerSpiralSpec s;
    s.alpha = 0.25 + 0.75 * u(rng);
    const Curve small = curves::gen_power_spiral(s, 0.3, {10'000, 3e-3});
    const auto l = fractal::ScaleLadder::anchored_fine(2.0 * small.max_chord(), 0.7, 12, 10.0);
    const auto counts = fractal::box_count(small, l);
    for (std::size_t k = 0; k < l.size(); ++k) brute_ok &= counts.counts[k] == brute_count(small, l.epsilons[k]);
  }
  c.require(brute_ok, "brute-force box-count equality");

  // Radial decrease: waves on the (0.5, 0.75) phase curve, none on phi^-1/2.
  const auto wavy = phase::check_radially_decreasing(phase::unwrap_phase(phase_curve(0.5, 0.75, 2000.0)));
  const auto plain = phase::check_radially_decreasing(phase::unwrap_phase(curves_[0].second));
  c.note << " waves(0.5,0.75)=" << wavy.violation_count + wavy.wave_count
         << " waves(spiral)=" << plain.violation_count + plain.wave_count;
  c.require(wavy.violation_count + wavy.wave_count > 0, "no radial increase found on (0.5,0.75)");
  c.require(plain.violation_count + plain.wave_count == 0, "radial increase reported on phi^-1/2");

  // Regimes.
  const auto r1 = phase::classify_curve(phase_curve(0.5, 1.75, 40.0), 0.5, 1.75).regime;
  const auto r2 = phase::classify_curve(phase_curve(0.5, 0.75, 2000.0), 0.5, 0.75).regime;
  const auto r3 = phase::classify_curve(phase_curve(0.5, 1.0, 400.0), 0.5, 1.0).regime;
  c.note << " regimes=" << phase::regime_name(r1) << '/' << phase::regime_name(r2) << '/' << phase::regime_name(r3);
  c.require(r1 == phase::Regime::kNonAccumulating && r2 == phase::Regime::kWavySpiral && r3 == phase::Regime::kSpiral,
            "classify_curve regimes");

  // Bi-Lipschitz trends.
  curves::TrajectoryFamilySpec f;
  f.gamma = 1.0;
  const auto bounded = phase::bilipschitz_ratio_scan(curves::gen_phase_trajectory(f, 2000.0, {5'000'000, 1e-3}), 60'000);
  f.gamma = 0.25;
  const auto growing = phase::bilipschitz_ratio_scan(curves::gen_phase_trajectory(f, 2000.0, {5'000'000, 1e-3}), 60'000);
  c.note << " bilipschitz=" << bounded.trend << '/' << growing.trend;
  c.require(bounded.trend == "decreasing" && growing.trend == "increasing", "bi-Lipschitz trends");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "spiraldim_acceptance";
  fs::remove_all(out);
  const ex::SuiteConfig cfg;

  auto run_all = [&] {
    std::vector<ex::SuiteResult> res;
    for (const auto& s : cfg.suites) {
      res.push_back(ex::run_suite(s, cfg));
      std::cerr << s << ": " << res.back().passed() << "/" << res.back().rows.size() << " rows pass ("
                << fmt(res.back().runtime_seconds) << " s)\n";
    }
    return res;
  };
  const auto first = run_all();
  ex::emit_report(first, (out / "run1").string());

  std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"tricot spirals within 0.05 of 2/(1+alpha)",
       [&](Check& c) { within(c, first, "tricot", {"spiral_a0.25", "spiral_a0.5", "spiral_a0.75", "spiral_a1"}, 0.05); }},
      {"tricot (alpha,1)-chirps within 0.05 of 2-(alpha+1)/2",
       [&](Check& c) { within(c, first, "tricot", {"chirp_a0.25_b1", "chirp_a0.5_b1", "chirp_a0.75_b1"}, 0.05); }},
      {"trajectories with gamma >= alpha within 0.08 of 2/(1+alpha)",
       [&](Check& c) { within(c, first, "theorem_phase", {"traj_a0.5_g1", "traj_a0.5_g0.5", "traj_a0.25_g1"}, 0.08); }},
      {"trajectories with gamma < alpha within 0.08 of 2-(alpha+gamma)/(1+gamma)",
       [&](Check& c) { within(c, first, "theorem_phase", {"traj_a0.5_g0.25", "traj_a0.75_g0.25"}, 0.08); }},
      {"alpha=2 trajectory rectifiable, length stable < 1%, dimension <= 1.1",
       [&](Check& c) {
         const ex::Row* v = find(first, "theorem_phase", "traj_a2_g1_rectifiable");
         const ex::Row* d = find(first, "theorem_phase", "traj_a2_g1");
         c.require(v && v->observed_verdict == "rectifiable", "verdict");
         c.require(v && v->estimated < 0.01, "stability");
         c.require(d && d->estimated <= 1.1, "dimension");
         if (v && d) c.note << " verdict=" << v->observed_verdict << " stability=" << fmt(v->estimated) << " dim=" << fmt(d->estimated);
       }},
      {"projections and oscillatory dimension within 0.06 of 1.25",
       [&](Check& c) { within(c, first, "projections", {"proj_a0.5_g1_xz", "proj_a0.5_g1_yz", "oscillatory_a0.5"}, 0.06); }},
      {"return-map exponent within 0.15 of 1/alpha+1",
       [&](Check& c) { within(c, first, "poincare", {"return_a0.5", "return_a0.75", "return_a1"}, 0.15); }},
      {"normal form p=2,3 within 0.08 of 4/3; p=4,6 within 0.08 of 3/2-1/(2p)",
       [&](Check& c) { within(c, first, "hopf", {"hopf_l1_p2", "hopf_l1_p3", "hopf_l1_p4", "hopf_l1_p6"}, 0.08); }},
      {"integrated cubic system within 1e-5 of the closed form (relative to diameter)",
       [&](Check& c) {
         within(c, first, "theorem_phase", {"oracle_a0.5_g1", "oracle_a0.5_g0.5", "oracle_a0.25_g1"}, 1e-5);
       }},
      {"property suite", [&](Check& c) { properties(c, cfg); }},
      {"log spirals: dimension within 0.07 of 4/3 and degenerate drift; plain spiral nondegenerate",
       [&](Check& c) {
         within(c, first, "degenerate_content", {"content_b0", "content_b1", "content_b2"}, 0.07);
         for (const char* id : {"content_b0_verdict", "content_b1_verdict", "content_b2_verdict"}) {
           const ex::Row* r = find(first, "degenerate_content", id);
           c.require(r && r->observed_verdict == r->expected_verdict,
                     std::string(id) + (r ? "=" + r->observed_verdict : " missing"));
           if (r) c.note << ' ' << id << '=' << r->observed_verdict;
         }
       }},
      {"suite rerun with identical config gives byte-identical files",
       [&](Check& c) {
         const auto second = run_all();
         ex::emit_report(second, (out / "run2").string());
         std::size_t files = 0;
         for (const auto& e : fs::recursive_directory_iterator(out / "run1")) {
           if (!e.is_regular_file()) continue;
           ++files;
           const fs::path rel = fs::relative(e.path(), out / "run1");
           c.require(fs::exists(out / "run2" / rel) && slurp(e.path()) == slurp(out / "run2" / rel), rel.string());
         }
         c.note << ' ' << files << " files compared";
       }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    if (!c.ok) ++failures;
    std::cout << (c.ok ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " |"
              << c.note.str() << std::endl;
  }
  std::cout << failures << " of " << criteria.size() << " criteria failed" << std::endl;
  return failures;
}
