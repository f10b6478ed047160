#pragma once

#include <array>

namespace spiraldim {

/// Value of a scalar function together with its first three derivatives.
/// Arithmetic follows the Leibniz and chain rules exactly, so closed-form
/// derivatives of products and powers of elementary functions come out
/// without finite differencing.
struct Jet {
  static constexpr int kOrder = 3;
  std::array<double, kOrder + 1> d{};  // d[k] = k-th derivative

  double operator[](int k) const { return d[static_cast<std::size_t>(k)]; }

  static Jet constant(double c) { return Jet{{c, 0.0, 0.0, 0.0}}; }
  static Jet identity(double t) { return Jet{{t, 1.0, 0.0, 0.0}}; }

  /// t^a with its derivatives.
  static Jet power(double t, double a);
  /// log t with its derivatives.
  static Jet log(double t);
};

Jet operator*(const Jet& f, const Jet& g);
Jet operator*(double c, const Jet& f);
Jet operator+(const Jet& f, const Jet& g);

/// f^n for a nonnegative integer n.
Jet ipow(const Jet& f, int n);

}  // namespace spiraldim
