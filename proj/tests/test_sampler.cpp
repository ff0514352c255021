#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "quermass/sampler.hpp"

using namespace quermass;

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

QuermassParams interacting() {
  QuermassParams p;
  p.beta = 1.3;
  p.z = 2.5;
  p.theta1 = 0.3;
  p.theta2 = 0.2;
  return p;
}

// Unnormalised target relative to the unit-rate Poisson law, ignoring the
// boundary indicator: z^N e^{-beta H}.
double log_target(const Configuration& c, const QuermassParams& p) {
  return static_cast<double>(c.size()) * std::log(p.z) - p.beta * hamiltonian(c, p);
}

Disk uniform_in(oracle::ConfigGen& gen, const Window& w, double r) {
  return {gen.uniform(w.x0, w.x1), gen.uniform(w.y0, w.y1), r};
}

bool spins_respected(const Configuration& c, const Tiling& t, const TileWindow& w, int spin) {
  std::set<TileIndex> occupied;
  for (const auto& d : c) occupied.insert(tile_of(d.x, d.y, t.delta));
  for (const auto& b : interior_boundary(w, t.L))
    if ((occupied.count(b) == 1) != (spin == 1)) return false;
  return true;
}

}  // namespace

TEST_CASE("detailed balance on hand-built states") {
  const QuermassParams p = interacting();
  const Tiling t = Tiling::for_params(p);
  const TileWindow win = TileWindow::square(8);
  const Window rect = win.rect(t.delta);
  const SamplerOptions opt;
  oracle::ConfigGen gen(31);

  for (int trial = 0; trial < 60; ++trial) {
    Chain chain(p, t, win, BoundaryCondition::free_bc(), 1, opt);
    Configuration x;
    const long n = gen.integer(1, 3);
    for (long k = 0; k < n; ++k) x.push_back(uniform_in(gen, rect, 1.0));

    // birth x -> y and death y -> x
    const Disk d = uniform_in(gen, rect, 1.0);
    Configuration y = x;
    y.push_back(d);
    chain.set_configuration(x);
    const double lb = chain.log_ratio_birth(d);
    const double density_birth = std::log(opt.p_birth / rect.area());  // q(x -> y) per unit area
    const double density_death = std::log(opt.p_death / static_cast<double>(y.size()));
    const double want = log_target(y, p) + density_death - log_target(x, p) - density_birth;
    CHECK(std::abs(lb - want) < 1e-10);
    chain.set_configuration(y);
    const double ld = chain.log_ratio_death(y.size() - 1);
    CHECK(std::abs(ld + lb) < 1e-10);
    // pi(x) q(x->y) a(x->y) = pi(y) q(y->x) a(y->x)
    const double lhs = log_target(x, p) + density_birth + std::min(0.0, lb);
    const double rhs = log_target(y, p) + density_death + std::min(0.0, ld);
    CHECK(std::abs(lhs - rhs) < 1e-10);

    // translation of one point (symmetric Gaussian proposal)
    chain.set_configuration(x);
    const std::size_t k = static_cast<std::size_t>(gen.integer(0, n - 1));
    Configuration moved = x;
    moved[k].x = gen.uniform(rect.x0, rect.x1);
    moved[k].y = gen.uniform(rect.y0, rect.y1);
    const double lm = chain.log_ratio_move(k, moved[k].x, moved[k].y);
    CHECK(std::abs(lm - (log_target(moved, p) - log_target(x, p))) < 1e-10);
    chain.set_configuration(moved);
    CHECK(std::abs(chain.log_ratio_move(k, x[k].x, x[k].y) + lm) < 1e-10);
  }
}

TEST_CASE("proposals leaving the window or the constraint set are refused") {
  const QuermassParams p = interacting();
  const Tiling t = Tiling::for_params(p);
  const TileWindow win = TileWindow::square(16);
  const Window rect = win.rect(t.delta);

  Chain free_chain(p, t, win, BoundaryCondition::free_bc(), 3);
  CHECK(free_chain.log_ratio_birth({rect.x1 + 0.01, 1.0, 1.0}) == kNegInf);

  Chain w1(p, t, win, BoundaryCondition::wired(1), 3);
  REQUIRE(w1.constraint_ok());
  long checked = 0;
  for (std::size_t k = 0; k < w1.config().size(); ++k) {
    const Disk& d = w1.config()[k];
    const TileIndex tile = tile_of(d.x, d.y, t.delta);
    long alone = 0;
    for (const auto& e : w1.config()) alone += tile_of(e.x, e.y, t.delta) == tile;
    if (in_interior_boundary(win, tile, t.L) && alone == 1) {
      CHECK(w1.log_ratio_death(k) == kNegInf);
      ++checked;
    }
  }
  CHECK(checked > 0);

  Chain w0(p, t, win, BoundaryCondition::wired(0), 3);
  CHECK(w0.size() == 0);
  CHECK(w0.log_ratio_birth({0.0, 0.0, 1.0}) == kNegInf);  // tile (0, 0) is in the collar
  const Disk centre{rect.x0 + 0.5 * (rect.x1 - rect.x0), rect.y0 + 0.5 * (rect.y1 - rect.y0), 1.0};
  CHECK(w0.log_ratio_birth(centre) > kNegInf);
}

TEST_CASE("saturated birth costs no energy") {
  QuermassParams p = interacting();
  p.R0 = 0.5;
  p.radius_law = RadiusLaw::Uniform;
  const Tiling t = Tiling::for_params(p);
  Chain chain(p, t, TileWindow::square(30), BoundaryCondition::free_bc(), 4);
  const Configuration base{{1.5, 1.5, 1.0}, {2.1, 1.5, 1.0}, {1.8, 2.0, 1.0}};
  chain.set_configuration(base);
  const Disk inside{1.8, 1.7, 0.5};  // within the disk centred at (1.5, 1.5)
  CHECK(std::abs(chain.delta_birth(inside)) < 1e-12);
  const double area = chain.window().rect(t.delta).area();
  CHECK(std::abs(chain.log_ratio_birth(inside) - std::log(p.z * area / 4.0)) < 1e-12);
}

TEST_CASE("incremental energies agree with recomputation") {
  const QuermassParams p = interacting();
  const Tiling t = Tiling::for_params(p);
  const TileWindow win = TileWindow::square(12);
  const Window rect = win.rect(t.delta);
  oracle::ConfigGen gen(32);
  for (const BoundaryCondition& bc : {BoundaryCondition::free_bc(), BoundaryCondition::wired(1)}) {
    Chain chain(p, t, win, bc, 5);
    Chain scratch(p, t, win, bc, 6);
    for (int s = 0; s < 10; ++s) chain.sweep();
    double worst = 0.0;
    long compared = 0;
    for (int step = 0; step < 10000; ++step) {
      chain.step();
      if (step % 10 != 0) continue;
      const double h0 = chain.energy_from_scratch();
      CHECK(std::abs(chain.energy() - h0) < 1e-7);
      Configuration c = chain.config();
      const Disk d = uniform_in(gen, rect, 1.0);
      const double dh = chain.delta_birth(d);
      c.push_back(d);
      try {
        scratch.set_configuration(c);
        worst = std::max(worst, std::abs(dh - (scratch.energy_from_scratch() - h0)));
        ++compared;
      } catch (const ConfigError&) {
      }
      if (chain.size() > 0) {
        const std::size_t k = static_cast<std::size_t>(gen.integer(0, chain.size() - 1));
        Configuration c2 = chain.config();
        const double dd = chain.delta_death(k);
        c2.erase(c2.begin() + static_cast<long>(k));
        try {
          scratch.set_configuration(c2);
          worst = std::max(worst, std::abs(dd - (scratch.energy_from_scratch() - h0)));
          ++compared;
        } catch (const ConfigError&) {
        }
      }
    }
    CHECK(compared > 500);
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("run_chain is deterministic in the seed") {
  const QuermassParams p = interacting();
  const Tiling t = Tiling::for_params(p);
  SamplerOptions opt;
  opt.burn_in = 5;
  const Trace a = run_chain(p, t, TileWindow::square(10), BoundaryCondition::free_bc(), 40, 99, opt);
  const Trace b = run_chain(p, t, TileWindow::square(10), BoundaryCondition::free_bc(), 40, 99, opt);
  const Trace c = run_chain(p, t, TileWindow::square(10), BoundaryCondition::free_bc(), 40, 100, opt);
  REQUIRE(a.records.size() == 40);
  bool differs = false;
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].n == b.records[k].n);
    CHECK(a.records[k].h == b.records[k].h);
    CHECK(a.records[k].acc_move == b.records[k].acc_move);
    differs = differs || a.records[k].n != c.records[k].n;
  }
  CHECK(differs);
}

TEST_CASE("thinning and snapshots") {
  QuermassParams p;
  p.beta = 0.0;
  SamplerOptions opt;
  opt.thin = 4;
  opt.snapshot_every = 10;
  const Trace tr = run_chain(p, Tiling::for_params(p), TileWindow::square(5), BoundaryCondition::free_bc(), 40, 1, opt);
  CHECK(tr.records.size() == 10);
  CHECK(tr.snapshots.size() == 4);
  CHECK(tr.area == doctest::Approx(25.0 / 8.0));
}

TEST_CASE("Poisson limit at beta = 0") {
  QuermassParams p;
  p.beta = 0.0;
  p.z = 2.0;
  SamplerOptions opt;
  opt.record_energy = false;
  opt.burn_in = 50;
  const Trace tr = run_chain(p, Tiling::for_params(p), TileWindow::square(10), BoundaryCondition::free_bc(), 20000, 8, opt);
  const Estimate e = estimate_density(tr);
  CHECK(std::abs(e.mean - 2.0) < 3.0 * e.se);
  CHECK(e.se < 0.05);
}

TEST_CASE("tiny activity empties the window") {
  QuermassParams p;
  p.beta = 1.0;
  p.z = 1e-4;
  const Trace tr = run_chain(p, Tiling::for_params(p), TileWindow::square(10), BoundaryCondition::free_bc(), 200, 2);
  CHECK(estimate_mean_n(tr).mean < 0.05);
}

TEST_CASE("area-interaction volume fraction lies in [0, 1]") {
  QuermassParams p;
  p.beta = 2.0;
  p.z = 2.0;
  const Tiling t = Tiling::for_params(p);
  const Trace tr = run_chain(p, t, TileWindow::square(12), BoundaryCondition::free_bc(), 200, 3);
  const double f = estimate_mean_energy(tr).mean / tr.area;
  CHECK(f >= 0.0);
  CHECK(f <= 1.0);
}

TEST_CASE("spin boundary constraint holds on every snapshot") {
  const QuermassParams p = interacting();
  const Tiling t = Tiling::for_params(p);
  const TileWindow win = TileWindow::square(18);
  SamplerOptions opt;
  opt.snapshot_every = 1;
  opt.validate_every = 20;
  for (int spin : {0, 1}) {
    const Trace tr = run_chain(p, t, win, BoundaryCondition::wired(spin), 60, 4 + spin, opt);
    CHECK(tr.constraint_violations == 0);
    CHECK(tr.max_validation_error < 1e-7);
    for (const auto& s : tr.snapshots) CHECK(spins_respected(s, t, win, spin));
    CHECK(tr.bulk_area == doctest::Approx(tr.area - 1.0 * interior_boundary(win, t.L).size() * t.delta * t.delta));
  }
}

TEST_CASE("estimators") {
  std::vector<double> xs(100);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = static_cast<double>(k % 5);
  const Estimate e = batch_means(xs);
  CHECK(e.mean == doctest::Approx(2.0));
  CHECK(e.batches == 20);
  CHECK(e.se == doctest::Approx(0.0));  // each batch of 5 holds one full period
  CHECK_THROWS_AS(batch_means(std::vector<double>(9, 1.0)), InsufficientSamples);
  Trace empty;
  empty.area = 1.0;
  CHECK_THROWS_AS(estimate_density(empty), InsufficientSamples);
}

TEST_CASE("pressure curve vanishes without interaction") {
  QuermassParams p;
  p.beta = 0.0;
  p.z = 1.0;
  ChainSettings cs;
  cs.sweeps = 2000;
  cs.options.burn_in = 50;
  const PressureCurve pc = estimate_pressure_curve(p, Tiling::for_params(p), TileWindow::square(8), {0.5, 1.0, 2.0},
                                                   BoundaryCondition::free_bc(), cs, 12);
  REQUIRE(pc.z.size() == 4);
  CHECK(pc.ln_z[0] == 0.0);
  for (std::size_t k = 1; k < pc.z.size(); ++k) CHECK(std::abs(pc.ln_z[k]) < 4.0 * pc.ln_z_se[k] + 1e-12);
  CHECK_THROWS_AS(estimate_pressure_curve(p, Tiling::for_params(p), TileWindow::square(8), {1.0, 0.5},
                                          BoundaryCondition::free_bc(), cs, 12),
                  ConfigError);
}

TEST_CASE("one-point scan gives one row per boundary") {
  QuermassParams p;
  p.beta = 1.0;
  ChainSettings cs;
  cs.sweeps = 40;
  const ScanResult r = density_gap_scan(p, Tiling::for_params(p), TileWindow::square(16), {1.0}, cs, 3);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].bc == 0);
  CHECK(r.rows[1].bc == 1);
  CHECK(r.rows[0].z == doctest::Approx(1.0));
}

TEST_CASE("derived seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t k = 0; k < 500; ++k) seen.insert(derive_seed(s, k));
  CHECK(seen.size() == 2000);
}
