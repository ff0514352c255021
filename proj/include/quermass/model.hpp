#pragma once

#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "quermass/geometry.hpp"

namespace quermass {

using MarkedPoint = Disk;
using Configuration = DiskUnion;

// Raised for parameters outside the model's or the contour bounds' domain.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RadiusLaw { PointMass, Uniform };

struct QuermassParams {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double beta = 1.0;
  double z = 1.0;
  double R0 = 1.0;
  double R1 = 1.0;
  RadiusLaw radius_law = RadiusLaw::PointMass;

  void validate() const;  // throws DomainError
  double sample_radius(std::mt19937_64& rng) const;
};

// Axis-aligned rectangle, half-open on the upper sides.
struct Window {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(double x, double y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  double distance_to(double x, double y) const;
};

// Block of tiles [i0, i1] x [j0, j1] with its geometric union.
struct TileWindow {
  long i0 = 0, j0 = 0, i1 = -1, j1 = -1;
  static TileWindow square(long side) { return {0, 0, side - 1, side - 1}; }
  long width() const { return i1 - i0 + 1; }
  long height() const { return j1 - j0 + 1; }
  long count() const { return width() * height(); }
  bool contains(TileIndex t) const { return t.i >= i0 && t.i <= i1 && t.j >= j0 && t.j <= j1; }
  Window rect(double delta) const;
};

// Tile side and correctness radius (in tiles).
struct Tiling {
  double delta = 0.0;
  long L = 0;
  // Defaults: delta = R0 / (2 sqrt 2), L = ceil(2 R1 / delta); zero means "default".
  static Tiling for_params(const QuermassParams& p, double delta = 0.0, long L = 0);
  // Standing assumptions of the contour bounds: delta <= R0/(2 sqrt 2) and
  // delta * L >= 2 R1.
  bool admissible(const QuermassParams& p) const;
};

// Tiles of the block within Euclidean distance L + 1 of its complement.
bool in_interior_boundary(const TileWindow& w, TileIndex t, long L);
std::vector<TileIndex> interior_boundary(const TileWindow& w, long L);
// Tiles outside the block within Euclidean distance L of it.
std::vector<TileIndex> exterior_boundary(const TileWindow& w, long L);

double energy_of(const MinkowskiValues& m, const QuermassParams& p);

double hamiltonian(const Configuration& cfg, const QuermassParams& p);

// H(w) - H(w restricted to the complement of the window), computed from the
// points within 2 R1 of the window only.
double local_energy(const Configuration& cfg, const Window& window, const QuermassParams& p);

// Tile functionals (volume, S_i, chi_i) of the listed tiles.
std::map<TileIndex, MinkowskiValues> tile_values(const Configuration& cfg,
                                                 const std::vector<TileIndex>& tiles,
                                                 double delta);

std::map<TileIndex, double> tile_energies(const Configuration& cfg,
                                          const std::vector<TileIndex>& tiles, double delta,
                                          const QuermassParams& p);

// Every tile whose closed cell meets the halo, with its energy.
std::map<TileIndex, double> all_tile_energies(const Configuration& cfg, double delta,
                                              const QuermassParams& p);

}  // namespace quermass
