#include "spiraldim/jet.hpp"

#include <cmath>

namespace spiraldim {

Jet Jet::power(double t, double a) {
  Jet j;
  double coeff = 1.0;
  for (int k = 0; k <= kOrder; ++k) {
    j.d[static_cast<std::size_t>(k)] = coeff * std::pow(t, a - k);
    coeff *= (a - k);
  }
  return j;
}

Jet Jet::log(double t) {
  return Jet{{std::log(t), 1.0 / t, -1.0 / (t * t), 2.0 / (t * t * t)}};
}

Jet operator*(const Jet& f, const Jet& g) {
  static constexpr double binom[4][4] = {
      {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  Jet h;
  for (int n = 0; n <= Jet::kOrder; ++n) {
    double s = 0.0;
    for (int k = 0; k <= n; ++k) s += binom[n][k] * f[k] * g[n - k];
    h.d[static_cast<std::size_t>(n)] = s;
  }
  return h;
}

Jet operator*(double c, const Jet& f) {
  Jet h = f;
  for (auto& v : h.d) v *= c;
  return h;
}

Jet operator+(const Jet& f, const Jet& g) {
  Jet h;
  for (std::size_t k = 0; k < h.d.size(); ++k) h.d[k] = f.d[k] + g.d[k];
  return h;
}

Jet ipow(const Jet& f, int n) {
  Jet r = Jet::constant(1.0);
  for (int i = 0; i < n; ++i) r = r * f;
  return r;
}

}  // namespace spiraldim
