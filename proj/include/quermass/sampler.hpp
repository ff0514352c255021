#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "quermass/model.hpp"

namespace quermass {

struct BoundaryCondition {
  enum class Kind { Free, Outer, SpinWired };
  Kind kind = Kind::Free;
  int spin = 1;         // SpinWired: required spin on the interior boundary
  Configuration outer;  // Outer: frozen points outside the window

  static BoundaryCondition free_bc() { return {}; }
  static BoundaryCondition wired(int spin) { return {Kind::SpinWired, spin, {}}; }
  static BoundaryCondition outer_cfg(Configuration c) { return {Kind::Outer, 1, std::move(c)}; }
  std::string name() const;
};

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplerOptions {
  double p_birth = 0.35;
  double p_death = 0.35;
  double p_move = 0.30;
  double move_scale = 0.0;  // <= 0: R0 / 2
  long burn_in = 0;         // sweeps
  long thin = 1;
  long validate_every = 0;  // sweeps between from-scratch energy checks; 0 = never
  bool record_energy = true;
  long snapshot_every = 0;  // 0 = no snapshots
  bool check_constraint = true;
};

struct TraceRecord {
  long sweep = 0;
  long n = 0;
  long n_bulk = 0;  // points outside the constrained boundary tiles
  double h = 0.0;
  double acc_birth = 0.0, acc_death = 0.0, acc_move = 0.0;
};

struct Trace {
  std::vector<TraceRecord> records;
  std::vector<Configuration> snapshots;
  double area = 0.0;       // |window|
  double bulk_area = 0.0;  // |window| minus the constrained boundary tiles
  double max_validation_error = 0.0;
  long constraint_violations = 0;
};

enum class MoveKind { Birth, Death, Move };

// Metropolis-Hastings birth/death/translate chain on a block of tiles.
class Chain {
 public:
  Chain(const QuermassParams& p, const Tiling& tiling, const TileWindow& window,
        const BoundaryCondition& bc, std::uint64_t seed, const SamplerOptions& opt = {});

  void step();
  void sweep();  // window.count() proposals

  const Configuration& config() const { return pts_; }
  long size() const { return static_cast<long>(pts_.size()); }
  double area() const { return area_; }
  double bulk_area() const;
  long bulk_size() const;
  // Energy seen by the target density (cached).
  double energy();
  // Same quantity recomputed without any cache.
  double energy_from_scratch() const;
  bool constraint_ok() const;

  // Replace the state (rebuilds all caches). Must satisfy the constraint.
  void set_configuration(const Configuration& c);

  // log acceptance ratio of a specific proposal, including proposal
  // densities; -inf if the target vanishes at the proposed state.
  double log_ratio_birth(const Disk& d);
  double log_ratio_death(std::size_t k);
  double log_ratio_move(std::size_t k, double nx, double ny);
  // Energy increment of the same proposals (no constraint check).
  double delta_birth(const Disk& d);
  double delta_death(std::size_t k);
  double delta_move(std::size_t k, double nx, double ny);

  // (accepted, proposed) per move kind since the last reset.
  std::pair<long, long> counts(MoveKind k) const;
  void reset_counts();

  const QuermassParams& params() const { return p_; }
  const TileWindow& window() const { return win_; }
  const Tiling& tiling() const { return tiling_; }

 private:
  struct Change {
    long removed = -1;
    bool has_added = false;
    Disk added{};
  };
  struct TileUpdate {
    std::size_t tile;
    double value;
    bool covered;
  };

  QuermassParams p_;
  Tiling tiling_;
  TileWindow win_;
  BoundaryCondition bc_;
  SamplerOptions opt_;
  std::mt19937_64 rng_;
  double area_ = 0.0;
  Window rect_;
  double sigma_ = 0.0;
  bool cover_shortcut_ = false;

  Configuration pts_;
  std::vector<std::size_t> pt_tile_;  // fine-grid slot of each point
  std::vector<std::size_t> pt_cell_;  // coarse-grid slot of each point

  // Fine grid: window tiles plus a margin that covers every tile a disk can reach.
  long margin_ = 0;
  long gi0_ = 0, gj0_ = 0, gw_ = 0, gh_ = 0;
  std::vector<std::vector<std::uint32_t>> tile_pts_;
  std::vector<double> cache_, base_;
  std::vector<std::uint8_t> covered_, counted_, iboundary_;
  std::vector<std::uint8_t> stale_;  // cache_ out of date after a shortcut commit
  double h_total_ = 0.0;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t stamp_id_ = 0;
  bool dirty_ = false;

  // Coarse grid for neighbour searches (cell side >= R1 + tile diagonal).
  double cell_ = 0.0;
  double cx0_ = 0.0, cy0_ = 0.0;
  long cw_ = 0, ch_ = 0;
  std::vector<std::vector<std::uint32_t>> cell_pts_;
  std::vector<std::vector<std::uint32_t>> cell_outer_;
  Configuration outer_near_;

  std::vector<TileUpdate> pending_;
  bool pending_ready_ = false;  // pending_ holds the tile values of the last proposal
  double last_dh_ = 0.0;
  std::vector<Disk> scratch_;
  long acc_[3] = {0, 0, 0}, prop_[3] = {0, 0, 0};

  std::size_t slot(long i, long j) const {
    return static_cast<std::size_t>((j - gj0_) * gw_ + (i - gi0_));
  }
  TileIndex tile_at(std::size_t s) const {
    return {gi0_ + static_cast<long>(s) % gw_, gj0_ + static_cast<long>(s) / gw_};
  }
  std::size_t cell_of(double x, double y) const;

  void build_grids();
  void rebuild_cache();
  double single_disk_energy(double r) const;
  bool isolated(const Disk& d, long exclude) const;
  bool reaches_uncounted(const Disk& d) const;
  double tile_value(std::size_t s, const Change& ch, bool& covered);
  double delta_energy(const Change& ch, bool fill_pending);
  void commit(const Change& ch);
  void mark_stale(const Disk& d);
  bool constraint_allows(const Change& ch) const;
  void add_point(const Disk& d);
  void remove_point(std::size_t k);
  void initialize();
};

Trace run_chain(const QuermassParams& p, const Tiling& tiling, const TileWindow& window,
                const BoundaryCondition& bc, long sweeps, std::uint64_t seed,
                const SamplerOptions& opt = {});

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  long batches = 0;
};

// Batch means over min(20, n) batches; throws InsufficientSamples below 10.
Estimate batch_means(const std::vector<double>& xs);
Estimate estimate_density(const Trace& trace);
// Density over the tiles the boundary constraint does not touch.
Estimate estimate_bulk_density(const Trace& trace);
Estimate estimate_mean_n(const Trace& trace);
Estimate estimate_mean_energy(const Trace& trace);

struct ChainSettings {
  long sweeps = 2000;
  SamplerOptions options;
};

struct PressureCurve {
  std::vector<double> z;
  std::vector<double> ln_z;  // ln Z at each node (Z normalised by the Poisson law)
  std::vector<double> ln_z_se;
  std::vector<double> mean_n, mean_n_se;
  double area = 0.0;
  double beta = 0.0;
  double first_segment = 0.0;  // contribution of [0, z_0] (or the anchor at z_0)
  double first_segment_bias = 0.0;
  double psi(std::size_t k) const { return ln_z[k] / (beta * area); }
  double psi_se(std::size_t k) const { return ln_z_se[k] / (beta * area); }
};

// Thermodynamic integration over z (trapezoid on the given nodes, usually
// log-spaced). The grid must be increasing and
// positive; a first node at 1e-3 * beta is prepended when absent.
PressureCurve estimate_pressure_curve(const QuermassParams& p, const Tiling& tiling,
                                      const TileWindow& window, std::vector<double> z_grid,
                                      const BoundaryCondition& bc, const ChainSettings& cs,
                                      std::uint64_t seed, int threads = 1);

struct ScanRow {
  double s = 0.0, z = 0.0;
  int bc = 0;
  double rho = 0.0, rho_se = 0.0;
  double rho_bulk = 0.0, rho_bulk_se = 0.0;  // informational: excludes the boundary collar
  double psi = 0.0, psi_se = 0.0;
};

struct ScanResult {
  std::vector<ScanRow> rows;  // bc 0 then bc 1 for each s
  double s_max_gap = std::numeric_limits<double>::quiet_NaN();
  double max_gap = 0.0, max_gap_se = 0.0;
  double s_crossing = std::numeric_limits<double>::quiet_NaN();
  double z_crossing = std::numeric_limits<double>::quiet_NaN();
};

ScanResult density_gap_scan(const QuermassParams& p, const Tiling& tiling,
                            const TileWindow& window, const std::vector<double>& s_grid,
                            const ChainSettings& cs, std::uint64_t seed, int threads = 1);

// Seed for an independent stream identified by `key`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key);

}  // namespace quermass
