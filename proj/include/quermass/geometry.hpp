#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace quermass {

struct Disk {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
};

using DiskUnion = std::vector<Disk>;

struct MinkowskiValues {
  double volume = 0.0;
  double surface = 0.0;
  long euler = 0;
};

// One uncovered piece of a circle on the boundary of the union. Angles are
// measured from the +x axis; end > start; end - start <= 2*pi. The arc is
// traversed counter-clockwise, so the union lies on its left.
struct BoundaryArc {
  std::size_t disk = 0;  // index into the canonical (sorted, deduplicated) disk list
  double start = 0.0;
  double end = 0.0;
  int orientation = +1;
  // Disk whose coverage ends at `start` / begins at `end`; -1 for a full circle.
  int start_neighbor = -1;
  int end_neighbor = -1;
};

struct BoundaryArcs {
  DiskUnion disks;  // canonical order the arc indices refer to
  std::vector<BoundaryArc> arcs;
  double total_length() const;
};

struct GeometryOptions {
  // Squared-distance threshold below which two circles are treated as
  // coincident/tangent.
  double coincidence_eps = 1e-12;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lexicographic sort plus removal of numerically coincident disks.
DiskUnion canonicalize(const DiskUnion& u, const GeometryOptions& opt = {});

BoundaryArcs boundary_arcs(const DiskUnion& u, const GeometryOptions& opt = {});
MinkowskiValues minkowski_functionals(const DiskUnion& u, const GeometryOptions& opt = {});

struct TileIndex {
  long i = 0;
  long j = 0;
  friend bool operator==(const TileIndex&, const TileIndex&) = default;
  friend auto operator<=>(const TileIndex&, const TileIndex&) = default;
};

// Half-open tile [i*delta - delta/2, i*delta + delta/2) x [...].
struct TileBox {
  double x0, y0, x1, y1;
};
TileBox tile_box(TileIndex t, double delta);
TileIndex tile_of(double x, double y, double delta);

// (volume of union inside the tile, boundary length inside the half-open
// tile, facet-corrected Euler characteristic). Summing over all tiles gives
// minkowski_functionals.
MinkowskiValues tile_functionals(const DiskUnion& u, TileIndex tile, double delta,
                                 const GeometryOptions& opt = {});

// Same, but `local` must already contain every disk meeting the closed tile.
// Used by the sampler, which keeps its own neighbour lists.
MinkowskiValues tile_functionals_local(const DiskUnion& local, TileIndex tile, double delta,
                                       const GeometryOptions& opt = {});

// Inclusive index range of tiles whose closed cell may meet the union.
struct TileRange {
  long i0 = 0, j0 = 0, i1 = -1, j1 = -1;
  bool empty() const { return i1 < i0 || j1 < j0; }
};
TileRange tiles_meeting(const DiskUnion& u, double delta);

bool disk_meets_box(const Disk& d, const TileBox& b);
bool box_inside_disk(const TileBox& b, const Disk& d);

// Pixel-based approximation kept independent of the arc arrangement.
MinkowskiValues raster_oracle(const DiskUnion& u, double pixel);

// "# quermass-config d=2" text format.
void write_config(std::ostream& os, const DiskUnion& u);
DiskUnion read_config(std::istream& is);

}  // namespace quermass
