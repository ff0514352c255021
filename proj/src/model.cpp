#include "quermass/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace quermass {

void QuermassParams::validate() const {
  auto bad = [](const std::string& what) { throw DomainError(what); };
  if (!std::isfinite(theta1) || !std::isfinite(theta2) || !std::isfinite(beta) ||
      !std::isfinite(z) || !std::isfinite(R0) || !std::isfinite(R1))
    bad("parameters must be finite");
  if (theta2 < 0.0) bad("theta2 must be >= 0");
  if (beta < 0.0) bad("beta must be >= 0");
  if (!(z > 0.0)) bad("z must be > 0");
  if (!(R0 > 0.0)) bad("R0 must be > 0");
  if (R1 < R0) bad("R1 must be >= R0");
  if (radius_law == RadiusLaw::PointMass && R1 != R0)
    bad("radius_law = point requires R0 == R1");
}

double QuermassParams::sample_radius(std::mt19937_64& rng) const {
  if (radius_law == RadiusLaw::PointMass || R1 == R0) return R0;
  return std::uniform_real_distribution<double>(R0, R1)(rng);
}

double Window::distance_to(double x, double y) const {
  const double dx = std::max({x0 - x, 0.0, x - x1});
  const double dy = std::max({y0 - y, 0.0, y - y1});
  return std::hypot(dx, dy);
}

Window TileWindow::rect(double delta) const {
  return {(static_cast<double>(i0) - 0.5) * delta, (static_cast<double>(j0) - 0.5) * delta,
          (static_cast<double>(i1) + 0.5) * delta, (static_cast<double>(j1) + 0.5) * delta};
}

Tiling Tiling::for_params(const QuermassParams& p, double delta, long L) {
  Tiling t;
  t.delta = delta > 0.0 ? delta : p.R0 / (2.0 * std::sqrt(2.0));
  t.L = L > 0 ? L : static_cast<long>(std::ceil(2.0 * p.R1 / t.delta - 1e-12));
  return t;
}

bool Tiling::admissible(const QuermassParams& p) const {
  return delta > 0.0 && L > 0 && 2.0 * std::sqrt(2.0) * delta <= p.R0 * (1.0 + 1e-12) &&
         delta * static_cast<double>(L) >= 2.0 * p.R1 * (1.0 - 1e-12);
}

bool in_interior_boundary(const TileWindow& w, TileIndex t, long L) {
  if (!w.contains(t)) return false;
  // The nearest outside site sits straight across the closest side.
  const long d = std::min({t.i - w.i0 + 1, w.i1 - t.i + 1, t.j - w.j0 + 1, w.j1 - t.j + 1});
  return d <= L + 1;
}

std::vector<TileIndex> interior_boundary(const TileWindow& w, long L) {
  std::vector<TileIndex> out;
  for (long i = w.i0; i <= w.i1; ++i)
    for (long j = w.j0; j <= w.j1; ++j)
      if (in_interior_boundary(w, {i, j}, L)) out.push_back({i, j});
  return out;
}

std::vector<TileIndex> exterior_boundary(const TileWindow& w, long L) {
  std::vector<TileIndex> out;
  for (long i = w.i0 - L; i <= w.i1 + L; ++i) {
    for (long j = w.j0 - L; j <= w.j1 + L; ++j) {
      if (w.contains({i, j})) continue;
      const long dx = i < w.i0 ? w.i0 - i : (i > w.i1 ? i - w.i1 : 0);
      const long dy = j < w.j0 ? w.j0 - j : (j > w.j1 ? j - w.j1 : 0);
      if (dx * dx + dy * dy <= L * L) out.push_back({i, j});
    }
  }
  return out;
}

double energy_of(const MinkowskiValues& m, const QuermassParams& p) {
  return m.volume + p.theta1 * m.surface - p.theta2 * static_cast<double>(m.euler);
}

double hamiltonian(const Configuration& cfg, const QuermassParams& p) {
  return energy_of(minkowski_functionals(cfg), p);
}

double local_energy(const Configuration& cfg, const Window& window, const QuermassParams& p) {
  Configuration near, outside;
  for (const auto& d : cfg) {
    if (window.distance_to(d.x, d.y) > 2.0 * p.R1) continue;
    near.push_back(d);
    if (!window.contains(d.x, d.y)) outside.push_back(d);
  }
  if (near.size() == outside.size()) return 0.0;
  return hamiltonian(near, p) - hamiltonian(outside, p);
}

namespace {

struct Buckets {
  double delta;
  long reach;
  std::map<TileIndex, std::vector<std::size_t>> cells;

  Buckets(const Configuration& cfg, double d) : delta(d) {
    double rmax = 0.0;
    for (std::size_t k = 0; k < cfg.size(); ++k) {
      rmax = std::max(rmax, cfg[k].r);
      cells[tile_of(cfg[k].x, cfg[k].y, delta)].push_back(k);
    }
    reach = static_cast<long>(std::ceil(rmax / delta)) + 1;
  }

  DiskUnion local(const Configuration& cfg, TileIndex t) const {
    DiskUnion out;
    const TileBox b = tile_box(t, delta);
    for (long i = t.i - reach; i <= t.i + reach; ++i) {
      for (long j = t.j - reach; j <= t.j + reach; ++j) {
        auto it = cells.find({i, j});
        if (it == cells.end()) continue;
        for (std::size_t k : it->second)
          if (disk_meets_box(cfg[k], b)) out.push_back(cfg[k]);
      }
    }
    return out;
  }
};

}  // namespace

std::map<TileIndex, MinkowskiValues> tile_values(const Configuration& cfg,
                                                 const std::vector<TileIndex>& tiles,
                                                 double delta) {
  if (!(delta > 0.0)) throw DomainError("tile side must be positive");
  std::map<TileIndex, MinkowskiValues> out;
  const Buckets bk(cfg, delta);
  for (const auto& t : tiles) out[t] = tile_functionals_local(bk.local(cfg, t), t, delta);
  return out;
}

std::map<TileIndex, double> tile_energies(const Configuration& cfg,
                                          const std::vector<TileIndex>& tiles, double delta,
                                          const QuermassParams& p) {
  std::map<TileIndex, double> out;
  for (const auto& [t, m] : tile_values(cfg, tiles, delta)) out[t] = energy_of(m, p);
  return out;
}

std::map<TileIndex, double> all_tile_energies(const Configuration& cfg, double delta,
                                              const QuermassParams& p) {
  std::vector<TileIndex> tiles;
  const TileRange tr = tiles_meeting(cfg, delta);
  for (long i = tr.i0; i <= tr.i1; ++i)
    for (long j = tr.j0; j <= tr.j1; ++j) tiles.push_back({i, j});
  return tile_energies(cfg, tiles, delta, p);
}

}  // namespace quermass
