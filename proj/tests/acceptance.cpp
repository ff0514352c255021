// Acceptance runner: one block per criterion, each printing PASS or FAIL with
// the measured numbers. Exit status is nonzero if any criterion not listed in
// --expect-fail fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "quermass/contours.hpp"
#include "quermass/expansion.hpp"
#include "quermass/sampler.hpp"

using namespace quermass;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += "  failed: " + what + "\n";
    }
  }
  void note(const std::string& line) { detail += "  " + line + "\n"; }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- 1: geometry against the raster oracle ---------------------------------

Outcome geometry_oracles() {
  Outcome o;
  oracle::ConfigGen gen(1001);
  const double R0 = 0.5, R1 = 1.0, pixel = R0 / 200;
  double worst_area = 0, worst_perim = 0;
  long chi_mismatch = 0, resampled = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // Features thinner than a few pixels alias in any raster, so such draws
    // are replaced by fresh ones.
    DiskUnion u = gen.mixed(40, R0, R1);
    while (!oracle::resolvable(u, 8 * pixel)) {
      ++resampled;
      u = gen.mixed(40, R0, R1);
    }
    const MinkowskiValues exact = minkowski_functionals(u);
    const MinkowskiValues raster = raster_oracle(u, pixel);
    worst_area = std::max(worst_area, std::abs(raster.volume - exact.volume) / exact.volume);
    worst_perim = std::max(worst_perim, std::abs(raster.surface - exact.surface) / exact.surface);
    chi_mismatch += raster.euler != exact.euler;
  }
  o.note(fmt("100 configurations (%ld draws with sub-8-pixel features replaced), pixel %.4g: worst area error %.3g%%, "
             "worst perimeter error %.3g%%, chi mismatches %ld",
             resampled, pixel, 100 * worst_area, 100 * worst_perim, chi_mismatch));
  o.require(worst_area <= 0.02, "area within 2%");
  o.require(worst_perim <= 0.02, "perimeter within 2%");
  o.require(chi_mismatch == 0, "chi exact");

  double worst_lens = 0;
  for (double d : {0.05, 0.3, 0.9, 1.0, 1.5, 1.99}) {
    const MinkowskiValues m = minkowski_functionals({{0, 0, 1}, {d, 0, 1}});
    worst_lens = std::max({worst_lens, std::abs(m.volume - oracle::lens_union_area(1, d)),
                           std::abs(m.surface - oracle::lens_union_perimeter(1, d))});
    o.require(m.euler == 1, "two-disk chi");
  }
  o.note(fmt("two-disk closed form: worst error %.3g", worst_lens));
  o.require(worst_lens <= 1e-9, "two-disk case within 1e-9");
  return o;
}

// ---- 2: additivity ----------------------------------------------------------

Outcome additivity() {
  Outcome o;
  oracle::ConfigGen gen(1002);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    QuermassParams p;
    p.theta1 = gen.uniform(-0.4, 1.0);
    p.theta2 = gen.uniform(0.0, 0.5);
    p.R0 = 0.5;
    const Configuration c = gen.mixed(40, 0.5, 1.0);
    const double delta = Tiling::for_params(p).delta;
    double sum = 0;
    for (const auto& [t, e] : all_tile_energies(c, delta, p)) sum += e;
    worst = std::max(worst, std::abs(sum - hamiltonian(c, p)));
  }
  o.note(fmt("200 configurations: worst |sum of tile energies - H| = %.3g", worst));
  o.require(worst <= 1e-9, "additivity within 1e-9");
  return o;
}

// ---- 3: sampler exactness ---------------------------------------------------

double log_target(const Configuration& c, const QuermassParams& p) {
  return static_cast<double>(c.size()) * std::log(p.z) - p.beta * hamiltonian(c, p);
}

Disk uniform_in(oracle::ConfigGen& g, const Window& w, double r) {
  return {g.uniform(w.x0, w.x1), g.uniform(w.y0, w.y1), r};
}

Outcome sampler_exactness() {
  Outcome o;
  {
    QuermassParams p;
    p.beta = 1.3;
    p.z = 2.1;
    p.theta1 = 0.3;
    p.theta2 = 0.1;
    const Tiling t = Tiling::for_params(p);
    const TileWindow win = TileWindow::square(8);
    const Window rect = win.rect(t.delta);
    const SamplerOptions opt;
    oracle::ConfigGen gen(1003);
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
      Chain chain(p, t, win, BoundaryCondition::free_bc(), 1, opt);
      Configuration x;
      const long n = gen.integer(1, 4);
      for (long k = 0; k < n; ++k) x.push_back(uniform_in(gen, rect, 1.0));
      const Disk d = uniform_in(gen, rect, 1.0);
      Configuration y = x;
      y.push_back(d);
      chain.set_configuration(x);
      const double lb = chain.log_ratio_birth(d);
      const double want = log_target(y, p) + std::log(opt.p_death / static_cast<double>(y.size())) -
                          log_target(x, p) - std::log(opt.p_birth / rect.area());
      worst = std::max(worst, std::abs(lb - want));
      chain.set_configuration(y);
      worst = std::max(worst, std::abs(chain.log_ratio_death(y.size() - 1) + lb));
      chain.set_configuration(x);
      const std::size_t k = static_cast<std::size_t>(gen.integer(0, n - 1));
      Configuration moved = x;
      moved[k].x = gen.uniform(rect.x0, rect.x1);
      moved[k].y = gen.uniform(rect.y0, rect.y1);
      worst = std::max(worst, std::abs(chain.log_ratio_move(k, moved[k].x, moved[k].y) -
                                       (log_target(moved, p) - log_target(x, p))));
    }
    o.note(fmt("detailed balance, 200 birth/death/move pairs: worst log-ratio error %.3g", worst));
    o.require(worst <= 1e-10, "proposal ratios equal the target density ratios");
  }
  {
    QuermassParams p;
    p.beta = 0.0;
    p.z = 1.7;
    const Tiling t = Tiling::for_params(p);
    SamplerOptions opt;
    opt.burn_in = 100;
    const Trace tr = run_chain(p, t, TileWindow::square(6), BoundaryCondition::free_bc(), 100000, 1004, opt);
    const Estimate rho = estimate_density(tr);
    const double zsc = (rho.mean - p.z) / rho.se;
    o.note(fmt("beta = 0, z = %.2f, 1e5 sweeps: density %.5f +- %.5f (%.2f SE from z)", p.z, rho.mean, rho.se, zsc));
    o.require(std::abs(zsc) <= 3.0, "beta = 0 density within 3 SE of z");
  }
  {
    // The full 30x30 scan of criterion 7, both wired boundaries, with every
    // snapshot checked against the constraint independently of the sampler.
    QuermassParams p;
    p.beta = 6.0;
    const Tiling t = Tiling::for_params(p);
    const TileWindow win = TileWindow::square(30);
    const auto collar = interior_boundary(win, t.L);
    long violations = 0, snapshots = 0;
    for (double s = 0.5; s <= 1.5 + 1e-9; s += 0.1)
      for (int spin : {0, 1}) {
        p.z = s * p.beta;
        SamplerOptions opt;
        opt.burn_in = 20;
        opt.snapshot_every = 10;
        const Trace tr = run_chain(p, t, win, BoundaryCondition::wired(spin), 100, 1005, opt);
        violations += tr.constraint_violations;
        for (const auto& snap : tr.snapshots) {
          ++snapshots;
          const SpinField f = spin_field(snap, t, win);
          for (const auto& tile : collar) violations += f.at(tile) != spin;
        }
      }
    o.note(fmt("wired scan beta = 6, s in [0.5, 1.5]: %ld snapshots checked, %ld violations", snapshots, violations));
    o.require(violations == 0, "spin constraint never violated");
  }
  return o;
}

// ---- 4: bound checks on sampled contours -------------------------------------

Outcome contour_bound_checks() {
  Outcome o;
  struct Setting {
    double beta, s;
    long side;
    int bc;  // -1 free, else wired spin
    long sweeps;
  };
  const std::vector<Setting> settings{
      {6.0, 1.0, 40, 1, 200}, {4.0, 1.0, 40, 1, 200}, {1.0, 1.0, 40, 0, 1200},
      {1.0, 1.0, 40, -1, 800}, {2.0, 1.0, 40, 0, 600}, {0.5, 1.0, 40, -1, 400},
  };
  long contours = 0, peierls = 0, domino = 0, ratio = 0, chi = 0, partition_bad = 0;
  for (const auto& st : settings) {
    QuermassParams p;
    p.beta = st.beta;
    p.z = st.s * st.beta;
    const Tiling t = Tiling::for_params(p);
    if (!t.admissible(p)) throw std::logic_error("setting outside the admissible domain");
    const PeierlsConstants k = peierls_constants(p, t);
    SamplerOptions opt;
    opt.burn_in = 20;
    opt.snapshot_every = 5;
    const TileWindow win = TileWindow::square(st.side);
    const BoundaryCondition bc = st.bc < 0 ? BoundaryCondition::free_bc() : BoundaryCondition::wired(st.bc);
    const int exterior = st.bc < 0 ? 0 : st.bc;
    const Trace tr = run_chain(p, t, win, bc, st.sweeps, 1006 + static_cast<std::uint64_t>(contours), opt);
    const long before = contours;
    for (const auto& snap : tr.snapshots) {
      const SpinField f = spin_field(snap, t, win);
      const auto cs = extract_contours(f, t, exterior);
      std::set<TileIndex> covered;
      for (const auto& g : cs) {
        ++contours;
        for (const auto& site : g.support) partition_bad += !covered.insert(site).second;
        peierls += verify_peierls_bound(snap, g, p, k).holds;
        chi += verify_chi_bound(snap, g, p, t).holds;
        ratio += verify_ratio_bound(g, k) && static_cast<double>(g.count_spin(0)) >= k.r1 * static_cast<double>(g.size()) &&
                 static_cast<double>(g.count_spin(1)) >= k.r1 * static_cast<double>(g.size());
        domino += static_cast<double>(domino_set(g, t).size()) >= k.r0 * static_cast<double>(g.size());
      }
    }
    o.note(fmt("beta %.1f, %s, %ld sweeps: %ld contours", st.beta, st.bc < 0 ? "free" : st.bc ? "wired1" : "wired0",
               st.sweeps, contours - before));
  }
  auto rate = [&](long n) { return contours ? 100.0 * static_cast<double>(n) / static_cast<double>(contours) : 0.0; };
  o.note(fmt("%ld contours: Peierls %.1f%%, domino density %.1f%%, spin ratio %.1f%%, chi bound %.1f%%", contours,
             rate(peierls), rate(domino), rate(ratio), rate(chi)));
  o.require(contours >= 500, "at least 500 contours");
  o.require(peierls == contours, "Peierls bound on every contour");
  o.require(domino == contours, "domino density on every contour");
  o.require(ratio == contours, "spin-ratio bounds on every contour");
  o.require(chi == contours, "chi bound on every contour");
  o.require(partition_bad == 0, "contour supports disjoint");
  return o;
}

// ---- 5: expansion engine ----------------------------------------------------

std::vector<std::vector<TileIndex>> connected_subsets(const TileWindow& w, long max_size) {
  std::set<std::vector<TileIndex>> all;
  std::vector<std::vector<TileIndex>> frontier;
  for (long i = w.i0; i <= w.i1; ++i)
    for (long j = w.j0; j <= w.j1; ++j) frontier.push_back({{i, j}});
  while (!frontier.empty()) {
    std::vector<std::vector<TileIndex>> next;
    for (auto& s : frontier) {
      if (!all.insert(s).second || static_cast<long>(s.size()) == max_size) continue;
      for (const auto& c : s)
        for (long di = -1; di <= 1; ++di)
          for (long dj = -1; dj <= 1; ++dj) {
            const TileIndex n{c.i + di, c.j + dj};
            if (!w.contains(n) || std::binary_search(s.begin(), s.end(), n)) continue;
            auto g = s;
            g.insert(std::upper_bound(g.begin(), g.end(), n), n);
            next.push_back(std::move(g));
          }
    }
    frontier = std::move(next);
  }
  return {all.begin(), all.end()};
}

Outcome expansion_engine() {
  Outcome o;
  using Matrix = std::vector<std::vector<int>>;
  long compared = 0, mismatched = 0;
  for (int pattern = 0; pattern < 8; ++pattern) {
    Matrix z{{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
    z[0][1] = z[1][0] = pattern & 1 ? -1 : 0;
    z[0][2] = z[2][0] = pattern & 2 ? -1 : 0;
    z[1][2] = z[2][1] = pattern & 4 ? -1 : 0;
    for (int a = 0; a <= 6; ++a)
      for (int b = 0; a + b <= 6; ++b)
        for (int c = 0; a + b + c <= 6; ++c) {
          std::vector<int> m, keep;
          const std::array<int, 3> abc{a, b, c};
          for (int t = 0; t < 3; ++t)
            if (abc[static_cast<std::size_t>(t)]) {
              m.push_back(abc[static_cast<std::size_t>(t)]);
              keep.push_back(t);
            }
          if (m.empty()) continue;
          Matrix sub;
          for (int r : keep) {
            sub.emplace_back();
            for (int q : keep) sub.back().push_back(z[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)]);
          }
          ++compared;
          mismatched += ursell_alpha(sub, m) != oracle::brute_force_ursell(sub, m);
        }
  }
  o.note(fmt("Ursell coefficients: %ld multisets with n <= 6, %ld mismatches", compared, mismatched));
  o.require(mismatched == 0, "coefficients exact");

  oracle::ConfigGen gen(1007);
  const std::function<bool(const Polymer&, const Polymer&)> clash = [](const Polymer& a, const Polymer& b) {
    return sup_distance(a, b) <= 1;
  };
  struct Case {
    TileWindow w;
    long max_size;
    double tau;
    long Lmax;
  };
  const double t0 = tau0(1);
  for (const Case& c : {Case{{0, 0, 3, 2}, 3, t0, 9}, Case{{0, 0, 6, 1}, 3, t0, 9}, Case{{0, 0, 1, 6}, 3, 4.0, 9},
                        Case{{0, 0, 3, 3}, 2, 5.0, 8}, Case{{0, 0, 13, 0}, 4, 3.0, 9}}) {
    std::vector<Polymer> pool;
    for (const auto& s : connected_subsets(c.w, c.max_size))
      pool.push_back(make_polymer(s, gen.uniform(0.2, 1.0) * std::exp(-c.tau * static_cast<double>(s.size()))));
    const double direct = std::log1p(oracle::direct_polymer_excess(pool, clash));
    const double engine = cluster_log_partition(pool, c.Lmax);
    const double tail = static_cast<double>(c.w.count()) * std::exp(-c.tau * static_cast<double>(c.Lmax) / 2.0);
    const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * direct;
    o.note(fmt("window %ldx%ld, %zu polymers, tau %.3g: |engine - direct| = %.3g, tail %.3g", c.w.width(), c.w.height(),
               pool.size(), c.tau, std::abs(engine - direct), tail));
    o.require(c.w.count() <= 16, "small window");
    o.require(std::abs(engine - direct) <= tail + rounding, "engine within the tail of direct enumeration");
  }

  for (double w : {0.001, 0.01, 0.02, 0.05}) {
    ExpansionOptions opt;
    opt.tau = -std::log(w) / 2.0;
    opt.Lmax = 14;
    const ExpansionResult r = cluster_pressure(dimer_chain_system(w), opt);
    const double exact = oracle::dimer_growth_by_recursion(w);
    const double err = std::abs(r.g - exact);
    o.note(fmt("dimer w = %.3g: |g - transfer| = %.3g, tail %.3g", w, err, r.tail_bound));
    o.require(err <= r.tail_bound + 64 * std::numeric_limits<double>::epsilon() * exact, "dimer within the tail");
  }
  return o;
}

// ---- 6: order-0 criticality -------------------------------------------------

Outcome order0() {
  Outcome o;
  for (double beta : {5.0, 10.0, 20.0}) {
    QuermassParams p;
    p.beta = beta;
    const Tiling t = Tiling::for_params(p);
    const double x = beta * t.delta * t.delta;
    const double s_beta = std::log1p(std::exp(x)) / x;
    const GapRoot r = gap_root(p, t);
    o.note(fmt("beta = %g: root %.16f, s_beta %.16f, diff %.3g", beta, r.s, s_beta, std::abs(r.s - s_beta)));
    o.require(std::abs(r.s - s_beta) <= 1e-10, "root equals s_beta");
    bool exact = true;
    for (double s : {0.2, 0.7, 1.0, s_beta, 1.9, 7.3}) {
      p.z = s * beta;
      exact = exact && truncated_pressure_order0(p, t).psi0 == -(p.z / beta);
    }
    o.require(exact, "psi0 = -s exactly");
  }
  return o;
}

// ---- 7: Widom-Rowlinson density gap -----------------------------------------

Outcome widom_rowlinson() {
  Outcome o;
  QuermassParams p;
  p.beta = 6.0;
  p.theta1 = p.theta2 = 0.0;
  p.R0 = p.R1 = 1.0;
  const Tiling t = Tiling::for_params(p);
  const double step = 0.1;
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(0.5 + step * k);
  ChainSettings cs;
  cs.sweeps = 1000;
  cs.options.burn_in = 200;
  const ScanResult r = density_gap_scan(p, t, TileWindow::square(30), grid, cs, 1008);
  for (std::size_t k = 0; k + 1 < r.rows.size(); k += 2)
    o.note(fmt("s = %.2f: rho0 = %.4f +- %.4f, rho1 = %.4f +- %.4f (bulk %.4f / %.4f)", r.rows[k].s, r.rows[k].rho,
               r.rows[k].rho_se, r.rows[k + 1].rho, r.rows[k + 1].rho_se, r.rows[k].rho_bulk, r.rows[k + 1].rho_bulk));
  o.note(fmt("max gap %.4f +- %.4f at s = %.2f", r.max_gap, r.max_gap_se, r.s_max_gap));
  o.require(std::abs(r.s_max_gap - 1.0) <= step + 1e-9, "gap maximal within one grid step of s = 1");
  o.require(r.max_gap > 3.0 * r.max_gap_se, "gap significant at 3 SE");
  return o;
}

// ---- 8: pressure boundary independence ---------------------------------------

Outcome pressure_boundary() {
  Outcome o;
  QuermassParams p;
  p.beta = 1.0;
  p.z = 0.1;
  const Tiling t = Tiling::for_params(p);
  std::vector<double> grid;
  const double z0 = 1e-3 * p.beta;
  for (int k = 1; k <= 12; ++k) grid.push_back(z0 * std::pow(p.z / z0, k / 12.0));
  ChainSettings cs;
  cs.sweeps = 400;
  cs.options.burn_in = cs.sweeps / 4;
  std::array<std::vector<double>, 2> diff, diff_se;
  for (long side : {10L, 20L, 40L}) {
    double psi[3], se[3];
    const BoundaryCondition bcs[3] = {BoundaryCondition::free_bc(), BoundaryCondition::wired(0),
                                      BoundaryCondition::wired(1)};
    for (int b = 0; b < 3; ++b) {
      const PressureCurve pc = estimate_pressure_curve(p, t, TileWindow::square(side), grid, bcs[b], cs, 11);
      psi[b] = pc.psi(pc.z.size() - 1);
      se[b] = pc.psi_se(pc.z.size() - 1);
    }
    for (int w = 0; w < 2; ++w) {
      diff[static_cast<std::size_t>(w)].push_back(std::abs(psi[0] - psi[w + 1]));
      diff_se[static_cast<std::size_t>(w)].push_back(std::hypot(se[0], se[w + 1]));
    }
    o.note(fmt("side %ld: psi free %.5f +- %.5f, wired0 %.5f +- %.5f, wired1 %.5f +- %.5f", side, psi[0], se[0], psi[1],
               se[1], psi[2], se[2]));
  }
  for (int w = 0; w < 2; ++w) {
    const auto& d = diff[static_cast<std::size_t>(w)];
    const auto& e = diff_se[static_cast<std::size_t>(w)];
    o.note(fmt("|free - wired%d|: %.5f, %.5f, %.5f", w, d[0], d[1], d[2]));
    for (std::size_t k = 0; k + 1 < d.size(); ++k)
      o.require(d[k + 1] <= d[k] + std::hypot(e[k], e[k + 1]), "difference shrinks with the window");
  }
  return o;
}

// ---- 9: constants honesty ---------------------------------------------------

Outcome constants_honesty() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "quermass_acceptance_constants";
  std::filesystem::create_directories(dir);
  cli::CommandContext ctx;
  ctx.cfg.out = dir.string();
  validate(ctx.cfg);
  cli::cmd_check_constants(ctx);
  std::ifstream in(dir / "constants.json");
  const auto j = nlohmann::json::parse(in);
  const double t1 = j["constants"]["theta1_star"], t2 = j["constants"]["theta2_star"];
  const double beta = j["minimal_beta"];
  const bool flag = j["not_desk_simulable"];
  o.note(fmt("theta1* = %.12g, theta2* = %.12g (pi/2821 = %.12g), minimal beta = %.6g, not desk-simulable = %s", t1,
             t2, pi / 2821, beta, flag ? "true" : "false"));
  o.require(std::abs(t1 - 0.5) <= 1e-12, "theta1* = 0.5");
  o.require(std::abs(t2 - pi / 2821) <= 1e-12 * t2, "theta2* = pi/2821");
  o.require(beta >= 1e5, "minimal beta >= 1e5");
  o.require(flag, "not desk-simulable flag");
  std::filesystem::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> expect_fail, only;
  app.add_option("--expect-fail", expect_fail, "criteria known not to pass; reported but not fatal");
  app.add_option("--only", only, "run just these criteria");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "geometry oracle suite", 120, geometry_oracles},
      {2, "additivity", 60, additivity},
      {3, "sampler exactness", 300, sampler_exactness},
      {4, "bound checks on sampled contours", 600, contour_bound_checks},
      {5, "expansion engine", 180, expansion_engine},
      {6, "order-0 criticality", kInf, order0},
      {7, "Widom-Rowlinson density gap", 1800, widom_rowlinson},
      {8, "pressure boundary independence", 1800, pressure_boundary},
      {9, "constants honesty", kInf, constants_honesty},
  };
  auto listed = [](const std::vector<int>& v, int id) { return std::find(v.begin(), v.end(), id) != v.end(); };

  int unexpected = 0;
  for (const auto& c : all) {
    if (!only.empty() && !listed(only, c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail += std::string("  threw: ") + e.what() + "\n";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(secs <= c.budget_s, fmt("runtime %.0f s over the %.0f s budget", secs, c.budget_s));
    const bool expected = listed(expect_fail, c.id);
    const char* verdict = out.pass ? (expected ? "PASS (expected to fail)" : "PASS") : (expected ? "FAIL (expected)" : "FAIL");
    std::printf("[%d] %s: %s (%.1f s)\n%s", c.id, c.name, verdict, secs, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass && !expected) ++unexpected;
  }
  std::printf("%s\n", unexpected ? "acceptance: unexpected failures" : "acceptance: all criteria as expected");
  return unexpected ? 1 : 0;
}
