#pragma once

#include <span>
#include <vector>

namespace spiraldim::regression {

/// Ordinary least squares y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;      // standard error of the slope
  double max_residual = 0.0;  // max |y - fit|
};

/// Needs at least 3 points and non-constant x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fit of N(eps) ~ a eps^-d + b eps^-background over the given scales,
/// minimizing the squared relative residuals. d is profiled over [d_lo, d_hi]
/// with (a, b) solved linearly for each candidate.
struct TwoTermFit {
  double exponent = 0.0;
  double a = 0.0;
  double b = 0.0;
  double exponent_se = 0.0;   // from the Gauss-Newton covariance at the optimum
  double max_residual = 0.0;  // max |log(model / N)|
};

TwoTermFit fit_two_term(std::span<const double> eps, std::span<const double> counts, double d_lo,
                        double d_hi, double background = 1.0);

/// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes).
/// x must be strictly increasing.
class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace spiraldim::regression
