#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "spiraldim/error.hpp"
#include "spiraldim/fractal.hpp"

namespace spiraldim::fractal {

namespace {

/// Packs a 2D or 3D integer cell index into 64 bits. Cells must satisfy
/// |i| < 2^31 (2D) or |i| < 2^20 (3D); callers check with cell_limit().
struct Packer {
  int dim;

  std::int64_t limit() const { return dim == 2 ? (std::int64_t{1} << 31) : (std::int64_t{1} << 20); }

  std::uint64_t pack(const std::array<std::int64_t, 3>& c) const {
    if (dim == 2)
      return (static_cast<std::uint64_t>(c[0] + (std::int64_t{1} << 31)) << 32) |
             static_cast<std::uint64_t>(c[1] + (std::int64_t{1} << 31));
    const std::int64_t o = std::int64_t{1} << 20;
    return (static_cast<std::uint64_t>(c[0] + o) << 42) |
           (static_cast<std::uint64_t>(c[1] + o) << 21) | static_cast<std::uint64_t>(c[2] + o);
  }

  std::array<std::int64_t, 3> unpack(std::uint64_t k) const {
    if (dim == 2) {
      const std::int64_t o = std::int64_t{1} << 31;
      return {static_cast<std::int64_t>(k >> 32) - o,
              static_cast<std::int64_t>(k & 0xffffffffULL) - o, 0};
    }
    const std::int64_t o = std::int64_t{1} << 20;
    const std::uint64_t mask = (std::uint64_t{1} << 21) - 1;
    return {static_cast<std::int64_t>(k >> 42) - o, static_cast<std::int64_t>((k >> 21) & mask) - o,
            static_cast<std::int64_t>(k & mask) - o};
  }
};

double max_abs_coord(const Curve& curve) {
  double m = 0.0;
  for (double v : curve.coords()) m = std::max(m, std::abs(v));
  return m;
}

void check_range(const Curve& curve, double mesh, double shift_max, const Packer& pk) {
  const double cells = max_abs_coord(curve) / mesh + shift_max + 2.0;
  if (!(cells < static_cast<double>(pk.limit())))
    throw PreconditionError("grid of mesh " + std::to_string(mesh) +
                            " exceeds the packable cell range for this curve");
}

std::array<std::int64_t, 3> cell_of(const Curve& curve, std::size_t i, double mesh,
                                    const GridShift& shift) {
  std::array<std::int64_t, 3> c{0, 0, 0};
  for (int a = 0; a < curve.ambient(); ++a)
    c[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(
        std::floor(curve.coord(i, a) / mesh + shift[static_cast<std::size_t>(a)]));
  return c;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Exact 1D squared distance transform (lower envelope of parabolas).
/// Entries equal to +inf carry no parabola.
void dt1d(const double* f, double* d, int n, int* v, double* z) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s;
    for (;;) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;  // z[0] = -inf keeps k >= 0
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) d[q] = kInf;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

/// Squared Euclidean distance transform of a dim-dimensional grid of side n
/// (row-major, last axis fastest). g holds 0 at seeds and +inf elsewhere.
void edt(std::vector<double>& g, int dim, int n) {
  std::vector<double> f(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);
  std::vector<int> v(static_cast<std::size_t>(n));
  const std::size_t total = g.size();
  std::size_t stride = 1;
  for (int axis = dim - 1; axis >= 0; --axis) {
    const std::size_t block = stride * static_cast<std::size_t>(n);
    for (std::size_t base = 0; base < total; base += block)
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t start = base + off;
        bool any = false;
        for (int q = 0; q < n; ++q) {
          f[static_cast<std::size_t>(q)] = g[start + static_cast<std::size_t>(q) * stride];
          any = any || std::isfinite(f[static_cast<std::size_t>(q)]);
        }
        if (!any) continue;
        dt1d(f.data(), d.data(), n, v.data(), z.data());
        for (int q = 0; q < n; ++q) g[start + static_cast<std::size_t>(q) * stride] = d[static_cast<std::size_t>(q)];
      }
    stride = block;
  }
}

std::vector<std::uint64_t> seed_pixels(const Curve& curve, double h, const Packer& pk) {
  std::vector<std::uint64_t> keys;
  keys.reserve(curve.size() / 4 + 16);
  std::uint64_t last = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const std::uint64_t k = pk.pack(cell_of(curve, i, h, {0.0, 0.0, 0.0}));
    if (i == 0 || k != last) keys.push_back(k);
    last = k;
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

}  // namespace

namespace kernels {

std::vector<std::uint64_t> box_counts(const Curve& curve, const std::vector<double>& epsilons,
                                      const GridShift& shift) {
  const Packer pk{curve.ambient()};
  for (double e : epsilons) check_range(curve, e, 1.0, pk);
  std::vector<std::uint64_t> out(epsilons.size(), 0);
  const auto n_scales = static_cast<std::ptrdiff_t>(epsilons.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t s = 0; s < n_scales; ++s) {
    const double eps = epsilons[static_cast<std::size_t>(s)];
    std::vector<std::uint64_t> keys;
    keys.reserve(curve.size() / 8 + 16);
    std::uint64_t last = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const std::uint64_t k = pk.pack(cell_of(curve, i, eps, shift));
      if (i == 0 || k != last) keys.push_back(k);
      last = k;
    }
    std::sort(keys.begin(), keys.end());
    out[static_cast<std::size_t>(s)] =
        static_cast<std::uint64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
  }
  return out;
}

std::uint64_t neighbourhood_pixels(const Curve& curve, double eps, int m) {
  require(m >= 1, "pixels per scale must be positive");
  const int dim = curve.ambient();
  const Packer pk{dim};
  const double h = eps / m;
  check_range(curve, h, 0.0, pk);
  check_range(curve, eps, 0.0, pk);

  const std::vector<std::uint64_t> seeds = seed_pixels(curve, h, pk);
  // Seeds grouped by tile (tile = m pixels per axis = one eps-cell).
  std::vector<std::pair<std::uint64_t, std::uint64_t>> by_tile;
  by_tile.reserve(seeds.size());
  for (std::uint64_t k : seeds) {
    auto p = pk.unpack(k);
    for (auto& c : p) c = floor_div(c, m);
    by_tile.emplace_back(pk.pack(p), k);
  }
  std::sort(by_tile.begin(), by_tile.end());
  std::vector<std::uint64_t> tiles;
  std::vector<std::size_t> tile_begin;
  for (std::size_t i = 0; i < by_tile.size(); ++i)
    if (i == 0 || by_tile[i].first != by_tile[i - 1].first) {
      tiles.push_back(by_tile[i].first);
      tile_begin.push_back(i);
    }
  tile_begin.push_back(by_tile.size());

  std::vector<std::array<std::int64_t, 3>> offsets;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = (dim == 3 ? -1 : 0); k <= (dim == 3 ? 1 : 0); ++k) offsets.push_back({i, j, k});

  std::vector<std::uint64_t> candidates;
  candidates.reserve(tiles.size() * offsets.size());
  for (std::uint64_t t : tiles) {
    const auto c = pk.unpack(t);
    for (const auto& o : offsets) candidates.push_back(pk.pack({c[0] + o[0], c[1] + o[1], c[2] + o[2]}));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const int side = 3 * m;
  std::size_t cells = 1;
  for (int a = 0; a < dim; ++a) cells *= static_cast<std::size_t>(side);
  const auto m2 = static_cast<double>(m) * m;
  const auto n_cand = static_cast<std::ptrdiff_t>(candidates.size());
  std::uint64_t total = 0;

#pragma omp parallel reduction(+ : total)
  {
    std::vector<double> grid(cells);
#pragma omp for schedule(dynamic, 64)
    for (std::ptrdiff_t ci = 0; ci < n_cand; ++ci) {
      const auto tc = pk.unpack(candidates[static_cast<std::size_t>(ci)]);
      std::fill(grid.begin(), grid.end(), std::numeric_limits<double>::infinity());
      std::array<std::int64_t, 3> origin{(tc[0] - 1) * m, (tc[1] - 1) * m,
                                         dim == 3 ? (tc[2] - 1) * m : 0};
      bool any = false;
      for (const auto& o : offsets) {
        const std::uint64_t nk = pk.pack({tc[0] + o[0], tc[1] + o[1], tc[2] + o[2]});
        const auto it = std::lower_bound(tiles.begin(), tiles.end(), nk);
        if (it == tiles.end() || *it != nk) continue;
        const auto ti = static_cast<std::size_t>(it - tiles.begin());
        for (std::size_t s = tile_begin[ti]; s < tile_begin[ti + 1]; ++s) {
          const auto p = pk.unpack(by_tile[s].second);
          std::size_t idx = 0;
          for (int a = 0; a < dim; ++a)
            idx = idx * static_cast<std::size_t>(side) +
                  static_cast<std::size_t>(p[static_cast<std::size_t>(a)] - origin[static_cast<std::size_t>(a)]);
          grid[idx] = 0.0;
          any = true;
        }
      }
      if (!any) continue;
      edt(grid, dim, side);
      std::uint64_t local = 0;
      if (dim == 2) {
        for (int i = m; i < 2 * m; ++i)
          for (int j = m; j < 2 * m; ++j)
            if (grid[static_cast<std::size_t>(i) * side + j] <= m2) ++local;
      } else {
        for (int i = m; i < 2 * m; ++i)
          for (int j = m; j < 2 * m; ++j)
            for (int k = m; k < 2 * m; ++k)
              if (grid[(static_cast<std::size_t>(i) * side + j) * side + k] <= m2) ++local;
      }
      total += local;
    }
  }
  return total;
}

}  // namespace kernels

namespace reference {

std::vector<std::uint64_t> box_counts(const Curve& curve, const std::vector<double>& epsilons,
                                      const GridShift& shift) {
  std::vector<std::uint64_t> out;
  for (double eps : epsilons) {
    std::set<std::array<std::int64_t, 3>> cells;
    for (std::size_t i = 0; i < curve.size(); ++i) cells.insert(cell_of(curve, i, eps, shift));
    out.push_back(cells.size());
  }
  return out;
}

std::uint64_t neighbourhood_pixels(const Curve& curve, double eps, int m) {
  const int dim = curve.ambient();
  const double h = eps / m;
  std::set<std::array<std::int64_t, 3>> seeds;
  for (std::size_t i = 0; i < curve.size(); ++i) seeds.insert(cell_of(curve, i, h, {0.0, 0.0, 0.0}));
  std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
  bool first = true;
  for (const auto& s : seeds)
    for (int a = 0; a < dim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      lo[ua] = first ? s[ua] : std::min(lo[ua], s[ua]);
      hi[ua] = first ? s[ua] : std::max(hi[ua], s[ua]);
      if (a == dim - 1) first = false;
    }
  std::array<std::size_t, 3> ext{1, 1, 1};
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    lo[ua] -= m;
    hi[ua] += m;
    ext[ua] = static_cast<std::size_t>(hi[ua] - lo[ua] + 1);
    total *= ext[ua];
  }
  require(total <= 400'000'000ULL, "reference raster too large");
  std::vector<std::uint8_t> mark(total, 0);
  std::vector<std::array<std::int64_t, 3>> disc;
  const std::int64_t zr = dim == 3 ? m : 0;
  for (std::int64_t i = -m; i <= m; ++i)
    for (std::int64_t j = -m; j <= m; ++j)
      for (std::int64_t k = -zr; k <= zr; ++k)
        if (i * i + j * j + k * k <= std::int64_t{m} * m) disc.push_back({i, j, k});
  for (const auto& s : seeds)
    for (const auto& o : disc) {
      std::size_t idx = 0;
      for (int a = 0; a < dim; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        idx = idx * ext[ua] + static_cast<std::size_t>(s[ua] + o[ua] - lo[ua]);
      }
      mark[idx] = 1;
    }
  std::uint64_t count = 0;
  for (std::uint8_t b : mark) count += b;
  return count;
}

}  // namespace reference

}  // namespace spiraldim::fractal
