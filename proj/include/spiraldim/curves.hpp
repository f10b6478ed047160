#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "spiraldim/curve.hpp"
#include "spiraldim/jet.hpp"
#include "spiraldim/ode.hpp"

namespace spiraldim::curves {

enum class Trig { kSin, kCos };

/// X(tau) = tau^alpha * trig(tau^-beta + phase_shift).
struct ChirpSpec {
  double alpha = 0.5;
  double beta = 1.0;
  double phase_shift = 0.0;
  Trig trig = Trig::kSin;

  void validate() const;
};

/// r = phi^-alpha * (log phi)^log_exponent for phi >= phi_min.
struct PowerSpiralSpec {
  double alpha = 0.5;
  double log_exponent = 0.0;
  double phi_min = 1.0001;
  bool mirror = false;

  void validate() const;
  double radius(double phi) const;
  /// d r / d phi.
  double radius_slope(double phi) const;
};

/// p(t) = t^-alpha (log t)^k, q(t) = K t (log t)^l and the solution
/// x(t) = C1 p sin q + C2 p cos q of the chirp/spiral family.
struct TrajectoryFamilySpec {
  double alpha = 0.5;
  double gamma = 1.0;
  double K = 1.0;
  int log_p_exponent = 0;
  int log_q_exponent = 0;
  double C1 = 1.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double t0 = 20.0;

  /// (gamma + 1) / gamma.
  double delta() const { return (gamma + 1.0) / gamma; }
  double amplitude() const;
  double phase() const;
  /// Default start time: 20 without log factors, e^2 with them.
  static double default_t0(int log_p_exponent, int log_q_exponent);

  /// Checks signs of p, p', q' and that the exact comparability ratios hold
  /// on geometrically spaced samples of [t0, t_max].
  void validate(double t_max) const;
};

/// Reduced normal form
///   r' = r (r^(2l) + sum_i a_i r^(2i)),  phi' = omega,  z' = sum_i b_i z^i.
struct NormalFormSpec {
  int l = 1;
  std::vector<double> a{0.0};  // a_0 .. a_{l-1}
  std::vector<double> b{-1.0}; // b_2 .. b_n
  double omega = 1.0;

  /// Smallest index p >= 2 with b_p != 0.
  int p_index() const;
  double leading_b() const;
  void validate() const;
  double r_rate(double r) const;
  double z_rate(double z) const;
};

/// Sampling controls shared by all generators: at most `budget` samples,
/// consecutive chords at most `max_chord`, at least 32 samples per turn.
struct Sampling {
  std::size_t budget = 1'000'000;
  double max_chord = 1e-3;
};

inline constexpr double kPhaseStep = 6.283185307179586 / 32.0;

/// p and q with derivatives up to order 3 (orders above the requested one
/// are still filled in).
struct FamilyValues {
  Jet p;
  Jet q;
};

/// Closed-form p, q and derivatives. Throws PreconditionError for t < t0
/// or order outside 0..3.
FamilyValues eval_family(const TrajectoryFamilySpec& spec, double t, int derivative_order = 3);

/// U(z) and V(z) of the cubic system, evaluated at t = gamma z^(-1/gamma).
struct CubicCoefficients {
  double U;
  double V;
};
CubicCoefficients cubic_coefficients(const TrajectoryFamilySpec& spec, double z);

double chirp_value(const ChirpSpec& spec, double tau);

/// Point (x, y, z) of the closed-form trajectory x = A p sin(q + theta),
/// y = x', z = t^-gamma.
Point3 phase_trajectory_point(const TrajectoryFamilySpec& spec, double t);

/// Exact solution of the cubic system passing through the closed-form
/// trajectory: same (x, y) at s = t - C3 and z = (gamma / s)^gamma.
Point3 cubic_system_solution(const TrajectoryFamilySpec& spec, double t);

/// Graph of the chirp on (0, tau_max], sampled from tau_max toward 0 until
/// the budget is spent or tau reaches tau_min (when tau_min > 0). Samples
/// are emitted in decreasing tau, so the accumulation end comes last.
Curve gen_chirp_graph(const ChirpSpec& spec, double tau_max, const Sampling& sampling,
                      double tau_min = 0.0);

/// Samples needed to go from tau_max down to tau_min > 0, or limit + 1 when
/// more than limit would be needed.
std::size_t chirp_sample_count(const ChirpSpec& spec, double tau_max, double tau_min,
                               double max_chord, std::size_t limit);

/// Minimum budget that resolves one full oscillation below tau_max.
std::size_t chirp_min_budget(const ChirpSpec& spec, double tau_max, double max_chord);

/// Polar spiral sampled from phi_min until r <= r_min.
/// Throws BudgetError carrying the reached radius when the budget runs out.
Curve gen_power_spiral(const PowerSpiralSpec& spec, double r_min, const Sampling& sampling);

/// Number of samples gen_power_spiral would emit (no storage).
std::size_t power_spiral_sample_count(const PowerSpiralSpec& spec, double r_min,
                                      double max_chord, std::size_t limit);

/// Closed-form 3D trajectory on [t0, t_max].
Curve gen_phase_trajectory(const TrajectoryFamilySpec& spec, double t_max,
                           const Sampling& sampling);

std::size_t phase_trajectory_sample_count(const TrajectoryFamilySpec& spec, double t_max,
                                          double max_chord, std::size_t limit);

/// Planar phase curve (x, x') of x(t) = t^-alpha trig(t^beta + shift), the
/// solution whose reflection X(tau) = x(1/tau) is the (alpha, beta)-chirp.
Curve gen_chirp_phase_curve(const ChirpSpec& spec, double t_begin, double t_end,
                            const Sampling& sampling);

/// Graph (tau, X(tau)) of the reflected solution X(tau) = x(1/tau) on
/// [1/t_max, 1/t0], emitted in decreasing tau.
Curve gen_reflected_solution(const TrajectoryFamilySpec& spec, double t_max,
                             const Sampling& sampling);

struct IntegrationResult {
  Curve curve;
  bool truncated = false;
  std::string truncation_reason;
  ode::Stats stats;
};

/// Initial state (x, y, z) of the cubic system.
struct CubicState {
  double x;
  double y;
  double z;
};

struct TimeRange {
  double begin;
  double end;
};

/// Error-controlled integration of the cubic system
///   x' = y, y' = -U(z) x + V(z) y, z' = -z^delta
/// starting from init at t = range.begin. Samples are emitted at accepted
/// steps, which are capped so that the sampling chord and phase bounds hold.
IntegrationResult integrate_cubic_system(const TrajectoryFamilySpec& spec, CubicState init,
                                         TimeRange range, ode::Tolerances tol,
                                         const Sampling& sampling);

/// Cylindrical initial state (r, phi, z) of the normal form.
struct CylindricalState {
  double r;
  double phi;
  double z;
};

/// Integrates the reduced normal form over range (end < begin integrates
/// backward) and returns the Cartesian curve (r cos phi, r sin phi, z).
/// Stops with a truncation flag once r drops below r_floor.
IntegrationResult integrate_normal_form(const NormalFormSpec& spec, CylindricalState init,
                                        TimeRange range, ode::Tolerances tol,
                                        const Sampling& sampling, double r_floor = 1e-12);

}  // namespace spiraldim::curves
