#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "quermass/contours.hpp"
#include "quermass/sampler.hpp"

namespace quermass {

// Exit codes shared by the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;

struct RunConfig {
  QuermassParams params;
  double delta = 0.0;  // 0: R0 / (2 sqrt 2)
  long L = 0;          // 0: ceil(2 R1 / delta)
  bool allow_inadmissible = false;
  std::optional<double> theta1_delta;  // lower bound used when theta1 < 0

  long window_width = 10, window_height = 10;  // tiles
  std::string bc = "free";                     // free | wired0 | wired1
  long sweeps = 1000;  // recorded sweeps
  long burn_in = 0;    // extra sweeps discarded first
  long thin = 1;
  std::uint64_t seed = 1;
  int threads = 1;  // never changes results, so it is not part of the resolved config

  double p_birth = 0.35, p_death = 0.35, p_move = 0.30;
  double move_scale = 0.0;
  long validate_every = 0;
  long snapshot_every = 0;

  std::vector<double> s_grid;  // scan
  std::vector<double> z_grid;  // pressure curves

  std::string contour_norm = "euclidean";  // euclidean | sup
  bool check_labels = true;
  std::string snapshots;  // contours: snapshot file; empty = sample afresh
  long igamma_samples = 0;

  double tau = 100.0;
  long l0 = 1;
  long Lmax = 12;
  double dimer_w = 0.01;
  std::optional<double> K;

  std::string out = ".";

  Tiling tiling() const;
  TileWindow window() const;
  BoundaryCondition boundary() const;
  ChainSettings chain() const;
  CorrectnessNorm norm() const;
};

// key = value lines, '#' comments. Also accepts the header of any file this
// program wrote (lines "# key = value" after a "# quermass config" marker) and
// JSON reports carrying a "config" object. Throws ConfigError naming the
// line or field.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

// Field-level checks; everything a command needs is validated here so
// failures happen before any computation.
void validate(const RunConfig& cfg);

// Ordered key/value pairs that reproduce the run.
std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& cfg);
std::string config_header(const RunConfig& cfg);  // "# quermass config" block
nlohmann::ordered_json config_json(const RunConfig& cfg);

// Grid syntax: comma list "0.7, 0.8" or inclusive range "lo:hi:step".
std::vector<double> parse_grid(const std::string& text);
std::string format_double(double v);

}  // namespace quermass
