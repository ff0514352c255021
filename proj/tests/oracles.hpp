#pragma once

// Independent reference computations and random generators shared by the
// test suites. Nothing here calls into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include <boost/rational.hpp>

#include "quermass/geometry.hpp"

namespace oracle {

using quermass::Disk;
using quermass::DiskUnion;
using quermass::TileIndex;
using Rational = boost::rational<long long>;

// ---- generators ---------------------------------------------------------

struct ConfigGen {
  std::mt19937_64 rng;
  explicit ConfigGen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

  // n disks with centres in [0, side)^2 and radii in [r0, r1].
  DiskUnion disks(long n, double side, double r0, double r1) {
    DiskUnion u;
    for (long k = 0; k < n; ++k) u.push_back({uniform(0.0, side), uniform(0.0, side), r1 > r0 ? uniform(r0, r1) : r0});
    return u;
  }
  // Up to n_max disks, box sized so that clusters, holes and isolated disks all occur.
  DiskUnion mixed(long n_max, double r0, double r1) {
    const long n = integer(1, n_max);
    const double side = std::max(2.0 * r1, std::sqrt(static_cast<double>(n)) * 1.6 * r1);
    return disks(n, side, r0, r1);
  }
};

// ---- geometry -----------------------------------------------------------

// Two disks of radius r with centres d apart, 0 < d < 2r.
inline double lens_union_area(double r, double d) {
  const double lens = 2.0 * r * r * std::acos(d / (2.0 * r)) - 0.5 * d * std::sqrt(4.0 * r * r - d * d);
  return 2.0 * std::numbers::pi * r * r - lens;
}
inline double lens_union_perimeter(double r, double d) {
  const double half = std::acos(d / (2.0 * r));  // half opening of the covered arc
  return 2.0 * (2.0 * std::numbers::pi - 2.0 * half) * r;
}

// Hit-or-miss area estimate with a fixed stream.
inline double monte_carlo_area(const DiskUnion& u, long samples, std::uint64_t seed) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& d : u) {
    x0 = std::min(x0, d.x - d.r);
    y0 = std::min(y0, d.y - d.r);
    x1 = std::max(x1, d.x + d.r);
    y1 = std::max(y1, d.y + d.r);
  }
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  long hit = 0;
  for (long k = 0; k < samples; ++k) {
    const double x = ux(g), y = uy(g);
    for (const auto& d : u)
      if ((x - d.x) * (x - d.x) + (y - d.y) * (y - d.y) <= d.r * d.r) {
        ++hit;
        break;
      }
  }
  return (x1 - x0) * (y1 - y0) * static_cast<double>(hit) / static_cast<double>(samples);
}

// Number of connected components of the union (disks overlap or touch).
inline long union_components(const DiskUnion& u) {
  std::vector<long> parent(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) parent[k] = static_cast<long>(k);
  std::function<long(long)> find = [&](long a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
  for (std::size_t a = 0; a < u.size(); ++a)
    for (std::size_t b = a + 1; b < u.size(); ++b) {
      const double dx = u[a].x - u[b].x, dy = u[a].y - u[b].y, s = u[a].r + u[b].r;
      if (dx * dx + dy * dy <= s * s) parent[find(static_cast<long>(a))] = find(static_cast<long>(b));
    }
  long c = 0;
  for (std::size_t k = 0; k < u.size(); ++k) c += find(static_cast<long>(k)) == static_cast<long>(k);
  return c;
}

// True when no feature of the union is thinner than `margin`: circles are
// never within margin of tangency, and no crossing point of two circles lies
// within margin of a third. A raster with pixels well below margin then sees
// the same topology as the exact union.
inline bool resolvable(const DiskUnion& u, double margin) {
  for (std::size_t a = 0; a < u.size(); ++a)
    for (std::size_t b = a + 1; b < u.size(); ++b) {
      const double dx = u[b].x - u[a].x, dy = u[b].y - u[a].y, d = std::hypot(dx, dy);
      if (std::abs(d - (u[a].r + u[b].r)) < margin || std::abs(d - std::abs(u[a].r - u[b].r)) < margin) return false;
      if (d >= u[a].r + u[b].r || d <= std::abs(u[a].r - u[b].r)) continue;
      const double along = (d * d + u[a].r * u[a].r - u[b].r * u[b].r) / (2 * d);
      const double h = std::sqrt(std::max(0.0, u[a].r * u[a].r - along * along));
      for (double sign : {-1.0, 1.0}) {
        const double px = u[a].x + (along * dx - sign * h * dy) / d, py = u[a].y + (along * dy + sign * h * dx) / d;
        for (std::size_t c = 0; c < u.size(); ++c)
          if (c != a && c != b && std::abs(std::hypot(px - u[c].x, py - u[c].y) - u[c].r) < margin) return false;
      }
    }
  return true;
}

// |{(i, j) in Z^2 : i^2 + j^2 <= r^2}| by direct enumeration.
inline long lattice_points_in_disk(long r) {
  long n = 0;
  for (long i = -r; i <= r; ++i)
    for (long j = -r; j <= r; ++j) n += i * i + j * j <= r * r;
  return n;
}

// ---- cluster expansion --------------------------------------------------

// Sum over every connected spanning subgraph of the complete graph on the
// copies, by listing all 2^(n(n-1)/2) edge subsets; divided by prod n_k!.
inline Rational brute_force_ursell(const std::vector<std::vector<int>>& zeta, const std::vector<int>& mult) {
  std::vector<int> vertex_type;
  for (std::size_t t = 0; t < mult.size(); ++t)
    for (int c = 0; c < mult[t]; ++c) vertex_type.push_back(static_cast<int>(t));
  const int n = static_cast<int>(vertex_type.size());
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) edges.push_back({a, b});
  long long total = 0;
  const std::uint64_t subsets = std::uint64_t{1} << edges.size();
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    long long product = 1;
    std::vector<int> comp(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) comp[static_cast<std::size_t>(v)] = v;
    for (std::size_t e = 0; e < edges.size() && product != 0; ++e) {
      if (!(mask >> e & 1)) continue;
      const auto [a, b] = edges[e];
      product *= zeta[static_cast<std::size_t>(vertex_type[static_cast<std::size_t>(a)])]
                     [static_cast<std::size_t>(vertex_type[static_cast<std::size_t>(b)])];
      const int ca = comp[static_cast<std::size_t>(a)], cb = comp[static_cast<std::size_t>(b)];
      for (auto& c : comp)
        if (c == cb) c = ca;
    }
    if (product == 0) continue;
    if (std::all_of(comp.begin(), comp.end(), [&](int c) { return c == comp[0]; })) total += product;
  }
  long long fact = 1;
  for (int m : mult)
    for (int k = 2; k <= m; ++k) fact *= k;
  return Rational(total, fact);
}

// Partition function minus one (the empty set) of a hard-core polymer gas, by
// listing every subset of the pool; `clash` says whether two polymers may not
// coexist. Returning Z - 1 keeps tiny weights representable.
template <class P>
double direct_polymer_excess(const std::vector<P>& pool, const std::function<bool(const P&, const P&)>& clash) {
  const std::size_t n = pool.size();
  double z = 0.0;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, double)> rec = [&](std::size_t k, double w) {
    if (k == n) {
      if (!chosen.empty()) z += w;
      return;
    }
    rec(k + 1, w);
    for (std::size_t c : chosen)
      if (clash(pool[c], pool[k])) return;
    chosen.push_back(k);
    rec(k + 1, w * pool[k].weight);
    chosen.pop_back();
  };
  rec(0, 1.0);
  return z;
}

// Monomer-dimer chain: Z_n = Z_{n-1} + w Z_{n-2}. Growth rate from the
// recursion itself, renormalised each step.
inline double dimer_growth_by_recursion(double w, int steps = 5000) {
  double a = 1.0, b = 1.0 + w;  // Z_1 = 1, Z_2 = 1 + w
  double ratio = b / a;
  for (int k = 0; k < steps; ++k) {
    const double c = b + w * a;
    ratio = c / b;
    a = b / c;
    b = 1.0;
  }
  return std::log(ratio);
}

// Fixed animals on the king-move lattice (OEIS A006770), counted per translation class.
inline const std::vector<long long>& king_animals() {
  static const std::vector<long long> v{0, 1, 4, 20, 110, 638, 3832, 23592, 147941, 940982};
  return v;
}

}  // namespace oracle
