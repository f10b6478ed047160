#include "spiraldim/cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "spiraldim/curves.hpp"
#include "spiraldim/error.hpp"
#include "spiraldim/experiments.hpp"
#include "spiraldim/fractal.hpp"
#include "spiraldim/io.hpp"
#include "spiraldim/phase.hpp"

namespace spiraldim::cli {

namespace {

namespace ex = experiments;
namespace fs = std::filesystem;

std::string num(double v) { return io::format_double(v); }

/// `key=value` tokens of one curve flag, checked against the allowed keys.
class Params {
 public:
  Params(const std::string& flag, const std::vector<std::string>& tokens,
         const std::vector<std::string>& allowed) {
    for (const std::string& t : tokens) {
      const auto eq = t.find('=');
      if (eq == std::string::npos || eq == 0)
        throw PreconditionError(flag + ": expected key=value, got '" + t + "'");
      const std::string key = t.substr(0, eq);
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw PreconditionError(flag + ": unknown key '" + key + "' (allowed: " + list + ")");
      }
      cfg_.set(key, t.substr(eq + 1));
    }
  }
  double real(const std::string& key, double fallback) const { return cfg_.get_double(key, fallback); }
  int integer(const std::string& key, int fallback) const {
    return static_cast<int>(cfg_.get_int(key, fallback));
  }
  bool boolean(const std::string& key, bool fallback) const { return cfg_.get_bool(key, fallback); }
  std::string text(const std::string& key, const std::string& fallback) const {
    return cfg_.get(key, fallback);
  }

 private:
  io::Config cfg_;
};

struct SourceOptions {
  std::vector<std::string> spiral, chirp, family, phase_curve, reflected, cubic, hopf;
  std::vector<CLI::Option*> flags;
  std::string input;
  double chord = 0.0;
  std::size_t budget = 5'000'000;
  double kappa = 0.1;
  double lambda = 20.0;
  double t_max = 0.0;
  double r_min = 0.0;
  double t_begin = 1.0;
  double t_end = 400.0;
  std::string project;
  double clip = 0.0;
};

struct Built {
  Curve curve;
  std::optional<double> predicted;
  std::optional<double> alpha, beta;  // phase curves, for classify
};

void add_source_options(CLI::App* app, SourceOptions& o) {
  auto kv = [&](const char* name, std::vector<std::string>& dst, const char* help) {
    CLI::Option* opt = app->add_option(name, dst, help)->expected(0, 64);
    o.flags.push_back(opt);
  };
  kv("--spiral", o.spiral, "r = phi^-alpha (log phi)^b: alpha= log_exponent= phi_min= mirror=");
  kv("--chirp", o.chirp, "graph of tau^alpha trig(tau^-beta + shift): alpha= beta= phase_shift= trig=");
  kv("--family", o.family, "trajectory (x, x', t^-gamma): alpha= gamma= K= C1= C2= t0= log_p= log_q=");
  kv("--phase-curve", o.phase_curve, "phase curve (x, x') of t^-alpha sin(t^beta): alpha= beta=");
  kv("--reflected", o.reflected, "graph of X(tau) = x(1/tau): alpha= gamma= K= C1= C2= t0=");
  kv("--cubic", o.cubic, "integrated cubic system: alpha= gamma= K= C1= C2= C3= t0=");
  kv("--hopf", o.hopf, "normal form r' = r^(2l+1), z' = b z^p: p= l= r0=");
  app->add_option("--input", o.input, "curve CSV with header t,x,y or t,x,y,z");
  app->add_option("--chord", o.chord, "maximum chord (0: chosen from the budget)")->check(CLI::NonNegativeNumber);
  app->add_option_function<std::string>(
         "--budget",
         [&o](const std::string& v) {
           const long long n = io::parse_int(v, "--budget");
           if (n < 1) throw CLI::ValidationError("--budget", "must be positive");
           o.budget = static_cast<std::size_t>(n);
         },
         "maximum number of samples (default 5e6)")
      ->type_name("INT");
  app->add_option("--kappa", o.kappa, "spiral/chirp end as a fraction of the core scale")
      ->check(CLI::PositiveNumber);
  app->add_option("--lambda", o.lambda, "trajectory end as a multiple of the core time")
      ->check(CLI::PositiveNumber);
  app->add_option("--tmax", o.t_max, "trajectory end time (0: lambda * core time)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--rmin", o.r_min, "spiral end radius (0: kappa * core radius)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--tbegin", o.t_begin, "phase curve start time");
  app->add_option("--tend", o.t_end, "phase curve end time");
  app->add_option("--project", o.project, "coordinate plane for spatial curves")
      ->check(CLI::IsMember({"xy", "xz", "yz"}));
  app->add_option("--clip", o.clip, "keep samples within this radius of the origin")
      ->check(CLI::NonNegativeNumber);
}

curves::TrajectoryFamilySpec family_spec(const Params& p) {
  curves::TrajectoryFamilySpec s;
  s.alpha = p.real("alpha", s.alpha);
  s.gamma = p.real("gamma", s.gamma);
  s.K = p.real("K", s.K);
  s.C1 = p.real("C1", s.C1);
  s.C2 = p.real("C2", s.C2);
  s.C3 = p.real("C3", s.C3);
  s.log_p_exponent = p.integer("log_p", s.log_p_exponent);
  s.log_q_exponent = p.integer("log_q", s.log_q_exponent);
  s.t0 = p.real("t0", curves::TrajectoryFamilySpec::default_t0(s.log_p_exponent, s.log_q_exponent));
  return s;
}

const std::vector<std::string> kFamilyKeys{"alpha", "gamma", "K", "C1", "C2", "C3", "t0", "log_p", "log_q"};

Built build(const SourceOptions& o) {
  int chosen = 0;
  for (CLI::Option* f : o.flags) chosen += f->count() > 0 ? 1 : 0;
  chosen += o.input.empty() ? 0 : 1;
  if (chosen != 1)
    throw PreconditionError(
        "exactly one curve source is required (--spiral, --chirp, --family, --phase-curve, "
        "--reflected, --cubic, --hopf or --input)");
  auto given = [&](const char* name) {
    for (CLI::Option* f : o.flags)
      if (f->get_name() == name) return f->count() > 0;
    return false;
  };

  std::optional<Built> b;
  if (!o.input.empty()) {
    b = Built{io::read_curve_file(o.input), std::nullopt, std::nullopt, std::nullopt};
  } else if (given("--spiral")) {
    const Params p("--spiral", o.spiral, {"alpha", "log_exponent", "phi_min", "mirror"});
    curves::PowerSpiralSpec s;
    s.alpha = p.real("alpha", s.alpha);
    s.log_exponent = p.real("log_exponent", s.log_exponent);
    s.phi_min = p.real("phi_min", s.log_exponent > 0.0 ? std::exp(s.log_exponent / s.alpha) : s.phi_min);
    s.mirror = p.boolean("mirror", false);
    s.validate();
    const double chord = o.chord > 0.0 ? o.chord : ex::choose_chord([&](double c) {
      return ex::plan_spiral(s, c, o.kappa, o.budget).samples;
    }, o.budget);
    const double r_min = o.r_min > 0.0 ? o.r_min : ex::plan_spiral(s, chord, o.kappa, o.budget).r_min;
    b = Built{curves::gen_power_spiral(s, r_min, {o.budget, chord}), ex::spiral_prediction(s.alpha),
              std::nullopt, std::nullopt};
  } else if (given("--chirp")) {
    const Params p("--chirp", o.chirp, {"alpha", "beta", "phase_shift", "trig"});
    curves::ChirpSpec s;
    s.alpha = p.real("alpha", s.alpha);
    s.beta = p.real("beta", s.beta);
    s.phase_shift = p.real("phase_shift", 0.0);
    const std::string trig = p.text("trig", "sin");
    require(trig == "sin" || trig == "cos", "--chirp: trig must be sin or cos");
    s.trig = trig == "sin" ? curves::Trig::kSin : curves::Trig::kCos;
    s.validate();
    double chord = o.chord, tau_end = 0.0;
    const fractal::ChirpPlan plan = fractal::plan_chirp(s, o.budget, o.kappa);
    if (chord <= 0.0) chord = plan.max_chord;
    tau_end = plan.tau_end;
    b = Built{curves::gen_chirp_graph(s, 1.0, {o.budget, chord}, tau_end),
              ex::chirp_prediction(s.alpha, s.beta), std::nullopt, std::nullopt};
  } else if (given("--family")) {
    const Params p("--family", o.family, kFamilyKeys);
    const curves::TrajectoryFamilySpec s = family_spec(p);
    const double chord = o.chord > 0.0 ? o.chord : ex::choose_chord([&](double c) {
      return ex::plan_trajectory(s, c, o.lambda, o.budget).samples;
    }, o.budget);
    const double t_max = o.t_max > 0.0 ? o.t_max : ex::plan_trajectory(s, chord, o.lambda, o.budget).t_max;
    b = Built{curves::gen_phase_trajectory(s, t_max, {o.budget, chord}),
              ex::trajectory_prediction(s.alpha, s.gamma), std::nullopt, std::nullopt};
  } else if (given("--phase-curve")) {
    const Params p("--phase-curve", o.phase_curve, {"alpha", "beta", "phase_shift"});
    curves::ChirpSpec s;
    s.alpha = p.real("alpha", s.alpha);
    s.beta = p.real("beta", s.beta);
    s.phase_shift = p.real("phase_shift", 0.0);
    const double chord = o.chord > 0.0 ? o.chord : 1e-3;
    b = Built{curves::gen_chirp_phase_curve(s, o.t_begin, o.t_end, {o.budget, chord}), std::nullopt,
              s.alpha, s.beta};
  } else if (given("--reflected")) {
    const Params p("--reflected", o.reflected, kFamilyKeys);
    curves::TrajectoryFamilySpec s = family_spec(p);
    curves::ChirpSpec chirp;
    chirp.alpha = s.alpha;
    chirp.beta = 1.0;
    const fractal::ChirpPlan plan = fractal::plan_chirp(chirp, o.budget, o.kappa);
    const double chord = o.chord > 0.0 ? o.chord : plan.max_chord;
    const double t_max = o.t_max > 0.0 ? o.t_max : 1.0 / plan.tau_end;
    b = Built{curves::gen_reflected_solution(s, t_max, {o.budget, chord}), (3.0 - s.alpha) / 2.0,
              std::nullopt, std::nullopt};
  } else if (given("--cubic")) {
    const Params p("--cubic", o.cubic, kFamilyKeys);
    const curves::TrajectoryFamilySpec s = family_spec(p);
    const double chord = o.chord > 0.0 ? o.chord : 1e-3;
    const double t_max = o.t_max > 0.0 ? o.t_max : 10.0 * s.t0;
    const Point3 p0 = curves::cubic_system_solution(s, s.t0);
    curves::IntegrationResult ir = curves::integrate_cubic_system(
        s, {p0[0], p0[1], p0[2]}, {s.t0, t_max}, {1e-11, 1e-13}, {o.budget, chord});
    if (ir.truncated) throw NumericalError("--cubic: integration truncated: " + ir.truncation_reason);
    b = Built{std::move(ir.curve), ex::trajectory_prediction(s.alpha, s.gamma), std::nullopt,
              std::nullopt};
  } else {
    const Params p("--hopf", o.hopf, {"p", "l", "r0"});
    ex::HopfSetup h;
    h.p = p.integer("p", 2);
    h.l = p.integer("l", 1);
    h.r0 = p.real("r0", 1.0);
    h.max_chord = o.chord > 0.0 ? o.chord : 1e-4;
    h.lambda = o.lambda;
    h.budget = o.budget;
    ex::HopfTrajectory t = ex::hopf_trajectory(h);
    if (t.truncated) throw NumericalError("--hopf: integration truncated: " + t.truncation_reason);
    b = Built{std::move(t.curve), ex::hopf_prediction(h.p, h.l), std::nullopt, std::nullopt};
  }

  if (!o.project.empty()) {
    const phase::Plane plane = o.project == "xy"   ? phase::Plane::kXY
                               : o.project == "xz" ? phase::Plane::kXZ
                                                   : phase::Plane::kYZ;
    b->curve = phase::project(b->curve, plane);
    b->predicted.reset();
  }
  if (o.clip > 0.0) b->curve = clip_to_ball(b->curve, o.clip);
  return std::move(*b);
}

void print_provenance(std::ostream& err, const Curve& c) {
  err << "generator=" << c.provenance().generator << '\n';
  for (const auto& [k, v] : c.provenance().fields) err << k << '=' << v << '\n';
}

void write_to(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream ss;
  body(ss);
  if (path == "-") {
    std::cout << ss.str();
    return;
  }
  io::write_file(path, ss.str());
}

// Minimal CSV reader for the suite tables written by emit_report.
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot read " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cells.back() += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cells.back() += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        cells.emplace_back();
      } else {
        cells.back() += ch;
      }
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

double cell_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return io::parse_double(s, "report cell");
}

int report(const std::string& dir, std::ostream& out) {
  const auto summary = read_csv((fs::path(dir) / "summary.csv").string());
  require(!summary.empty() && summary[0].size() == 5 && summary[0][0] == "suite",
          "report: " + dir + "/summary.csv is not a suite summary");
  std::size_t inconsistent = 0;
  for (std::size_t i = 1; i < summary.size(); ++i) {
    const std::string suite = summary[i][0];
    const auto rows = read_csv((fs::path(dir) / (suite + ".csv")).string());
    require(!rows.empty() && rows[0].size() == 12, "report: malformed " + suite + ".csv");
    out << "== " << suite << " (" << summary[i][2] << "/" << summary[i][1] << " pass)\n";
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const auto& r = rows[k];
      require(r.size() == 12, "report: malformed row in " + suite + ".csv");
      ex::Row row;
      row.predicted = cell_number(r[3]);
      row.estimated = cell_number(r[4]);
      row.band = cell_number(r[5]);
      row.tolerance = cell_number(r[6]);
      row.expected_verdict = r[7];
      row.observed_verdict = r[8];
      const bool stored = r[10] == "true";
      const bool recomputed = row.evaluate();
      if (stored != recomputed) ++inconsistent;
      char buf[256];
      std::snprintf(buf, sizeof buf, "%-4s %-34s %-18s predicted=%-10s estimated=%-10s band=%-10s %s%s",
                    stored ? "ok" : (r[9] == "true" ? "exp" : "FAIL"), r[0].c_str(), r[1].c_str(),
                    r[3].substr(0, 10).c_str(), r[4].substr(0, 10).c_str(), r[5].substr(0, 10).c_str(),
                    r[8].c_str(), stored != recomputed ? " (pass flag inconsistent)" : "");
      out << buf << '\n';
    }
  }
  if (inconsistent > 0)
    throw NumericalError("report: " + std::to_string(inconsistent) +
                         " rows have a pass flag that does not follow from their fields");
  return 0;
}

}  // namespace

void configure_threads() {
  if (const char* v = std::getenv("SPIRALDIM_THREADS")) {
    const long long n = io::parse_int(v, "SPIRALDIM_THREADS");
    require(n >= 1, "SPIRALDIM_THREADS must be at least 1");
    omp_set_num_threads(static_cast<int>(n));
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Box dimension, Minkowski content and return maps of spirals, chirps and trajectories"};
  app.name("spiraldim");
  app.require_subcommand(1, 1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "print generator provenance to stderr");

  SourceOptions gen_o, dim_o, content_o, poincare_o, rectify_o, classify_o;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("generate", "sample a curve and write it as CSV");
  add_source_options(gen, gen_o);
  gen->add_option("--out", gen_out, "output CSV path ('-' for stdout)")->required();

  std::string counts_out, model = "two-term";
  CLI::App* dim = app.add_subcommand("dim", "box-counting dimension");
  add_source_options(dim, dim_o);
  dim->add_option("--counts", counts_out, "write epsilon,count CSV");
  dim->add_option("--model", model, "fit model")->check(CLI::IsMember({"two-term", "power-law"}));

  double s_value = 0.0;
  int pixels = 8;
  std::string measures_out;
  CLI::App* content = app.add_subcommand("content", "epsilon-neighbourhood measures and content verdict");
  add_source_options(content, content_o);
  content->add_option("--s", s_value, "content exponent (default: predicted dimension)");
  content->add_option("--pixels", pixels, "pixels per eps")->check(CLI::Range(8, 64));
  content->add_option("--out", measures_out, "write epsilon,measure CSV");

  double section = 0.0;
  std::string returns_out;
  CLI::App* poincare = app.add_subcommand("poincare", "first-return radii and exponent");
  add_source_options(poincare, poincare_o);
  poincare->add_option("--section", section, "section angle");
  poincare->add_option("--out", returns_out, "write n,r,d CSV");

  CLI::App* rectify = app.add_subcommand("rectify", "arc length and rectifiability verdict");
  add_source_options(rectify, rectify_o);

  CLI::App* classify = app.add_subcommand("classify", "regime of a chirp phase curve");
  add_source_options(classify, classify_o);

  std::string config_path, suite_out;
  std::vector<std::string> overrides, suite_names;
  CLI::App* suite = app.add_subcommand("suite", "run experiment suites and write their reports");
  suite->add_option("--config", config_path, "key = value configuration file");
  suite->add_option("--set", overrides, "configuration override key=value")->expected(1, 256);
  suite->add_option("--suite", suite_names, "suite to run (repeatable; default: from config)");
  suite->add_option("--out", suite_out, "output directory (default: out_dir from config)");

  std::string report_in;
  CLI::App* rep = app.add_subcommand("report", "print suite tables and check their pass flags");
  rep->add_option("--in", report_in, "directory written by suite")->required();

  std::vector<std::string> argv_store{"spiraldim"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const CLI::App* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    configure_threads();
    if (gen->parsed()) {
      const Built b = build(gen_o);
      if (verbose) print_provenance(err, b.curve);
      write_to(gen_out, [&](std::ostream& os) { io::write_curve(os, b.curve); });
      io::write_key_values(out, {{"samples", std::to_string(b.curve.size())},
                                 {"max_chord", num(b.curve.max_chord())},
                                 {"diameter", num(b.curve.diameter())}});
    } else if (dim->parsed()) {
      const Built b = build(dim_o);
      if (verbose) print_provenance(err, b.curve);
      const fractal::ScaleCounts counts = fractal::box_count(b.curve, fractal::ladder_for_curve(b.curve));
      fractal::FitPolicy policy;
      policy.model = model == "two-term" ? fractal::FitModel::kTwoTerm : fractal::FitModel::kPowerLaw;
      const fractal::DimensionEstimate e = fractal::fit_dimension(counts, policy);
      if (e.sub_resolved)
        throw NumericalError("dim: sub-resolved, the counts are flat over the regression window");
      io::KeyValues kv{{"estimate", num(e.value)},
                       {"band", num(e.band)},
                       {"raw_estimate", num(e.raw_value)},
                       {"grid_spread", num(e.grid_spread)},
                       {"model", e.model == fractal::FitModel::kTwoTerm ? "two-term" : "power-law"},
                       {"window", std::to_string(e.window_begin) + ":" + std::to_string(e.window_end)},
                       {"scales", std::to_string(counts.ladder.size())},
                       {"eps_min", num(counts.ladder.eps_min())},
                       {"eps_max", num(counts.ladder.eps_max())},
                       {"samples", std::to_string(b.curve.size())},
                       {"max_chord", num(b.curve.max_chord())}};
      if (b.predicted) kv.emplace_back("predicted", num(*b.predicted));
      io::write_key_values(out, kv);
      if (!counts_out.empty()) write_to(counts_out, [&](std::ostream& os) { io::write_counts(os, counts); });
    } else if (content->parsed()) {
      const Built b = build(content_o);
      if (verbose) print_provenance(err, b.curve);
      double s = s_value;
      if (s <= 0.0) {
        require(b.predicted.has_value(), "content: --s is required for this curve source");
        s = *b.predicted;
      }
      const fractal::ScaleLadder ladder = fractal::ladder_for_curve(b.curve);
      const fractal::MeasureProfile m = fractal::epsilon_measure(b.curve, ladder, ladder.eps_min() / pixels);
      const fractal::ContentProfile c = fractal::content_profile(m, s);
      io::write_key_values(out, {{"verdict", c.verdict},
                                 {"s", num(s)},
                                 {"spread", num(c.spread)},
                                 {"monotone", c.monotone ? "true" : "false"},
                                 {"quotient_first", num(c.quotients.front())},
                                 {"quotient_last", num(c.quotients.back())},
                                 {"rel_error_bound", num(m.rel_error_bound.front())},
                                 {"scales", std::to_string(ladder.size())}});
      if (!measures_out.empty()) write_to(measures_out, [&](std::ostream& os) { io::write_measures(os, m); });
    } else if (poincare->parsed()) {
      if (poincare_o.project.empty() && poincare_o.input.empty() &&
          (!poincare_o.family.empty() || poincare_o.flags[2]->count() > 0 || poincare_o.flags[5]->count() > 0 ||
           poincare_o.flags[6]->count() > 0))
        poincare_o.project = "xy";
      const Built b = build(poincare_o);
      if (verbose) print_provenance(err, b.curve);
      const phase::PolarProfile prof = phase::unwrap_phase(b.curve);
      const phase::ReturnSequence seq = phase::poincare_sequence(prof, section);
      if (!returns_out.empty()) write_to(returns_out, [&](std::ostream& os) { io::write_returns(os, seq); });
      const phase::ExponentEstimate e = phase::fit_return_exponent(seq);
      io::write_key_values(out, {{"exponent", num(e.value)},
                                 {"band", num(e.band)},
                                 {"returns", std::to_string(seq.radii.size())},
                                 {"violations", std::to_string(seq.violations)},
                                 {"interpolation_error", num(seq.interpolation_error)}});
    } else if (rectify->parsed()) {
      const Built b = build(rectify_o);
      if (verbose) print_provenance(err, b.curve);
      const phase::ArcLengthReport r = phase::arc_length_profile(b.curve);
      io::write_key_values(out, {{"verdict", r.verdict},
                                 {"total_length", num(r.total_length)},
                                 {"limit", num(r.limit)},
                                 {"limit_stability", num(r.limit_stability)},
                                 {"tail_exponent", num(r.tail_exponent)},
                                 {"band", num(r.band)}});
    } else if (classify->parsed()) {
      const Built b = build(classify_o);
      require(b.alpha && b.beta, "classify: the curve must come from --phase-curve");
      const phase::Classification c = phase::classify_curve(b.curve, *b.alpha, *b.beta);
      io::write_key_values(out, {{"regime", phase::regime_name(c.regime)},
                                 {"turns", std::to_string(c.turns)},
                                 {"violations", std::to_string(c.violations)},
                                 {"wave_rise", num(c.wave_rise)},
                                 {"turn_decay", num(c.turn_decay)}});
    } else if (suite->parsed()) {
      io::Config cfg = config_path.empty() ? io::Config{} : io::Config::load(config_path);
      for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        require(eq != std::string::npos && eq > 0, "--set: expected key=value, got '" + o + "'");
        cfg.set(o.substr(0, eq), o.substr(eq + 1));
      }
      ex::SuiteConfig sc = ex::SuiteConfig::from(cfg);
      if (!suite_names.empty()) sc.suites = suite_names;
      const std::string dir = suite_out.empty() ? cfg.get("out_dir", "") : suite_out;
      require(!dir.empty(), "suite: an output directory is required (--out or out_dir)");
      std::vector<ex::SuiteResult> results;
      for (const std::string& name : sc.suites) {
        results.push_back(ex::run_suite(name, sc));
        const ex::SuiteResult& r = results.back();
        err << r.suite_id << ": " << r.passed() << "/" << r.rows.size() << " rows pass ("
            << std::fixed << std::setprecision(1) << r.runtime_seconds << " s)\n";
        err.unsetf(std::ios::floatfield);
      }
      for (const std::string& f : ex::emit_report(results, dir)) out << f << '\n';
    } else if (rep->parsed()) {
      return report(report_in, out);
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace spiraldim::cli
