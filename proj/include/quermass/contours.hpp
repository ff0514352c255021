#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "quermass/model.hpp"

namespace quermass {

class ContourError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
// Queried a site whose correctness ball leaves the known spin field.
class PaddingError : public ContourError {
 public:
  using ContourError::ContourError;
};
// Spins on the boundary of a complementary component disagree.
class LabelInconsistency : public ContourError {
 public:
  using ContourError::ContourError;
};

enum class CorrectnessNorm { Euclidean, Sup };

// Lattice points of the closed ball of radius r about the origin.
long lattice_ball_size(double r, CorrectnessNorm norm = CorrectnessNorm::Euclidean);

// spin(i) = 1 iff tile i holds a point; defined on a block of tiles.
struct SpinField {
  TileWindow domain;
  std::vector<std::uint8_t> spins;  // row-major over domain, j outer

  bool contains(TileIndex t) const { return domain.contains(t); }
  int at(TileIndex t) const;  // throws PaddingError outside the domain
  std::size_t index(TileIndex t) const {
    return static_cast<std::size_t>((t.j - domain.j0) * domain.width() + (t.i - domain.i0));
  }
};

SpinField spin_field(const Configuration& cfg, const Tiling& tiling, const TileWindow& domain);

enum class SiteClass : std::uint8_t { ZeroCorrect = 0, OneCorrect = 1, NonCorrect = 2 };

// Classification on the sites whose correctness ball lies inside the field.
struct Classification {
  TileWindow domain;
  std::vector<SiteClass> classes;
  SiteClass at(TileIndex t) const;  // throws PaddingError outside the domain
};

Classification classify_correctness(const SpinField& field, const Tiling& tiling,
                                    CorrectnessNorm norm = CorrectnessNorm::Euclidean);

struct Contour {
  std::vector<TileIndex> support;   // sorted
  std::vector<std::uint8_t> spins;  // aligned with support
  int type = 0;                     // label of the unbounded complementary component
  std::vector<TileIndex> int0, int1;
  long klass = 0;  // |int0| + |int1|

  long size() const { return static_cast<long>(support.size()); }
  long count_spin(int s) const;
};

struct ContourOptions {
  CorrectnessNorm norm = CorrectnessNorm::Euclidean;
  bool check_labels = true;  // throw LabelInconsistency on mixed boundary spins
};

// Contours of the field, with every site outside its domain carrying
// `exterior_spin`. Supports are ordered by their smallest site.
std::vector<Contour> extract_contours(const SpinField& field, const Tiling& tiling,
                                      int exterior_spin, const ContourOptions& opt = {});

// Convenience: spin field of cfg on the tiles meeting its points, exterior
// spin 0 (a finite configuration in empty space).
std::vector<Contour> contours_of(const Configuration& cfg, const Tiling& tiling,
                                 const ContourOptions& opt = {});

// Pairwise sup-distance > 1 and a common type.
bool geometric_compatibility(const std::vector<Contour>& contours);
long sup_distance(const Contour& a, const Contour& b);

struct Domino {
  TileIndex occupied, empty;
};

// Greedy construction: pick an occupied site not within 4L of earlier picks,
// pair its nearest empty support site with the neighbour one step back
// towards it. Throws ContourError if the support lacks one of the spins or
// the guaranteed bound |D| >= |support| / |B(0, 5L)| fails.
std::vector<Domino> domino_set(const Contour& contour, const Tiling& tiling);

struct PeierlsConstants {
  long L = 0;
  double delta = 0.0;
  long ball_5L = 0, ball_2L = 0;
  double r0 = 0.0, r1 = 0.0;
  double theta1_star = 0.0;
  double theta1_delta = 0.0;  // user-supplied lower bound (used when theta1 < 0)
  double theta2_star = 0.0;   // theta1 >= 0 closed form; otherwise equals theta2_delta
  double theta2_delta = 0.0;
  double t = 0.0;             // surface threshold (theta1 < 0 only)
  double t_lo = 0.0, t_hi = 0.0;
  double rho0 = 0.0;
  double tau = 0.0;
  double g0 = 0.0, g1 = 0.0;
  double c = 0.0;
  double a = 0.0;
  double s_beta = 0.0;
  double U_lo = 0.0, U_hi = 0.0;
  long l0 = 0;
  double eta = 0.0;
};

// Throws DomainError outside theta1 > -theta1*, 0 <= theta2 < theta2^delta,
// or when the resulting rho0 is not positive.
PeierlsConstants peierls_constants(const QuermassParams& p, const Tiling& tiling,
                                   std::optional<double> theta1_delta_lower = std::nullopt);

struct PeierlsCheck {
  double energy = 0.0;  // sum of tile energies over the support
  double bound = 0.0;   // |occupied| delta^2 + rho0 |support|
  bool holds = false;
};
PeierlsCheck verify_peierls_bound(const Configuration& cfg, const Contour& contour,
                                  const QuermassParams& p, const PeierlsConstants& k);

// Euler characteristic of the halo restricted to the support (sum of tile
// contributions) against |support| delta^2 / (pi R0^2).
struct ChiCheck {
  long chi = 0;
  double bound = 0.0;
  bool holds = false;
};
ChiCheck verify_chi_bound(const Configuration& cfg, const Contour& contour,
                          const QuermassParams& p, const Tiling& tiling);

bool verify_ratio_bound(const Contour& contour, const PeierlsConstants& k);

struct IGammaEstimate {
  double mean = 0.0, se = 0.0;
  double prior = 0.0;        // probability of the spin pattern under the Poisson law
  double peierls_cap = 0.0;  // g0^{n0} g1^{n1} e^{-beta rho0 |support|}
  long samples = 0;
};

// Monte Carlo for the contour integral over the support tiles: Poisson
// points in occupied tiles conditioned nonempty, none in empty tiles, weight
// e^{-beta H_support}. Replicas run on `threads` workers and merge in order.
IGammaEstimate estimate_I_gamma(const Contour& contour, const QuermassParams& p,
                                const Tiling& tiling, long samples, std::uint64_t seed,
                                int threads = 1, long max_support = 400);

std::string contours_to_json(const std::vector<Contour>& contours, int indent = -1);
std::vector<Contour> contours_from_json(const std::string& text);

}  // namespace quermass
