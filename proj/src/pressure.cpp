#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include "quermass/sampler.hpp"

namespace quermass {

namespace {

// Runs fn(0..n-1) on up to `threads` workers. Each index writes only its own
// output slot, so the result does not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t nt = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (nt <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= n || failed.load()) return;
        try {
          fn(k);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

double single_disk_energy(const QuermassParams& p, double r) {
  const double pi = std::numbers::pi;
  return pi * r * r + p.theta1 * 2.0 * pi * r - p.theta2;
}

// E_Q exp(-beta H({disk})), Simpson's rule for the uniform radius law.
double mean_single_weight(const QuermassParams& p) {
  if (p.radius_law == RadiusLaw::PointMass || p.R1 == p.R0)
    return std::exp(-p.beta * single_disk_energy(p, p.R0));
  const int m = 128;
  const double h = (p.R1 - p.R0) / m;
  double s = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double w = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    s += w * std::exp(-p.beta * single_disk_energy(p, p.R0 + k * h));
  }
  return s * h / 3.0 / (p.R1 - p.R0);
}

struct NodeResult {
  Estimate n;
  Estimate h;
  Estimate bulk;  // density away from the constrained collar
};

NodeResult run_node(const QuermassParams& p, const Tiling& tiling, const TileWindow& w,
                    const BoundaryCondition& bc, const ChainSettings& cs, std::uint64_t seed,
                    bool want_energy) {
  SamplerOptions opt = cs.options;
  opt.record_energy = want_energy;
  const Trace tr = run_chain(p, tiling, w, bc, cs.sweeps, seed, opt);
  NodeResult r;
  r.n = estimate_mean_n(tr);
  if (tr.bulk_area > 0.0) r.bulk = estimate_bulk_density(tr);
  if (want_energy) r.h = estimate_mean_energy(tr);
  return r;
}

}  // namespace

PressureCurve estimate_pressure_curve(const QuermassParams& p, const Tiling& tiling,
                                      const TileWindow& window, std::vector<double> z_grid,
                                      const BoundaryCondition& bc, const ChainSettings& cs,
                                      std::uint64_t seed, int threads) {
  p.validate();
  if (bc.kind == BoundaryCondition::Kind::Outer)
    throw DomainError("pressure curves are defined for free and spin boundaries only");
  if (z_grid.empty()) throw ConfigError("empty z grid");
  for (std::size_t k = 0; k < z_grid.size(); ++k) {
    if (!(z_grid[k] > 0.0)) throw ConfigError("z grid must be positive");
    if (k > 0 && !(z_grid[k] > z_grid[k - 1])) throw ConfigError("z grid must be increasing");
  }
  const double z0 = p.beta > 0.0 ? 1e-3 * p.beta : 1e-3 * z_grid.front();
  if (z_grid.front() > z0 * (1.0 + 1e-12)) z_grid.insert(z_grid.begin(), z0);

  const double delta = tiling.delta;
  const double area = window.rect(delta).area();
  const std::size_t n = z_grid.size();

  PressureCurve pc;
  pc.z = z_grid;
  pc.area = area;
  pc.beta = p.beta;
  pc.mean_n.assign(n, 0.0);
  pc.mean_n_se.assign(n, 0.0);

  const bool wired1 = bc.kind == BoundaryCondition::Kind::SpinWired && bc.spin == 1;
  const std::size_t nbeta = wired1 && p.beta > 0.0 ? 9 : 0;  // anchor nodes along beta
  std::vector<NodeResult> res(n + nbeta);
  parallel_for(n + nbeta, threads, [&](std::size_t k) {
    QuermassParams q = p;
    bool energy = false;
    if (k < n) {
      q.z = z_grid[k];
    } else {
      q.z = z_grid.front();
      q.beta = p.beta * static_cast<double>(k - n) / static_cast<double>(nbeta - 1);
      energy = true;
    }
    res[k] = run_node(q, tiling, window, bc, cs, derive_seed(seed, k), energy);
  });
  for (std::size_t k = 0; k < n; ++k) {
    pc.mean_n[k] = res[k].n.mean;
    pc.mean_n_se[k] = res[k].n.se;
  }

  // ln Z at the first node.
  double anchor = 0.0, anchor_var = 0.0;
  const long nib = static_cast<long>(interior_boundary(window, tiling.L).size());
  if (wired1) {
    // ln Z(beta) = ln Z(0) - int_0^beta E[H] dbeta'. At beta' = 0 the
    // constraint only asks each boundary tile to be occupied.
    anchor = static_cast<double>(nib) * std::log1p(-std::exp(-z0 * delta * delta));
    if (nbeta > 0) {
      const double h = p.beta / static_cast<double>(nbeta - 1);
      double trap = 0.0, simp = 0.0;
      for (std::size_t m = 0; m < nbeta; ++m) {
        const bool end = m == 0 || m + 1 == nbeta;
        const double wt = end ? 0.5 * h : h;
        const double ws = (end ? 1.0 : (m % 2 ? 4.0 : 2.0)) * h / 3.0;
        trap += wt * res[n + m].h.mean;
        simp += ws * res[n + m].h.mean;
        anchor_var += wt * wt * res[n + m].h.se * res[n + m].h.se;
      }
      anchor -= trap;
      pc.first_segment_bias = std::abs(trap - simp);
    }
  } else {
    double allowed = area;
    if (bc.kind == BoundaryCondition::Kind::SpinWired)
      allowed = area - static_cast<double>(nib) * delta * delta;
    anchor = z0 * (allowed * mean_single_weight(p) - area);
    // Second-order term: only pairs closer than 2 R1 interact, and the
    // two-disk weight is at most exp(beta (2 theta2 + 4 pi R1 max(0, -theta1))).
    const double wmax = std::exp(p.beta * (2.0 * p.theta2 +
                                          4.0 * std::numbers::pi * p.R1 * std::max(0.0, -p.theta1)));
    pc.first_segment_bias = 0.5 * z0 * z0 * area * std::numbers::pi * 4.0 * p.R1 * p.R1 * 2.0 * wmax;
  }
  pc.first_segment = anchor;

  // d ln Z / dz = E[N] / z - |window|. The last term is integrated exactly;
  // under the occupied boundary the collar count of the non-interacting
  // model, c(z) = n zd / (1 - e^{-zd}) with d = delta^2, is subtracted first
  // and its contribution n (zd + ln(1 - e^{-zd})) added back in closed form,
  // leaving a bounded integrand for the trapezoid in z.
  const double d2 = delta * delta;
  auto collar = [&](double z) {
    return wired1 ? static_cast<double>(nib) * z * d2 / -std::expm1(-z * d2) : 0.0;
  };
  auto collar_integral = [&](double z) {
    return wired1 ? static_cast<double>(nib) * (z * d2 + std::log(-std::expm1(-z * d2))) : 0.0;
  };
  std::vector<double> g(n), gse(n);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = (pc.mean_n[k] - collar(z_grid[k])) / z_grid[k];
    gse[k] = pc.mean_n_se[k] / z_grid[k];
  }
  pc.ln_z.assign(n, 0.0);
  pc.ln_z_se.assign(n, 0.0);
  pc.ln_z[0] = anchor;
  pc.ln_z_se[0] = std::sqrt(anchor_var);
  std::vector<double> weight(n, 0.0);
  double trap = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double h = z_grid[k] - z_grid[k - 1];
    trap += 0.5 * h * (g[k - 1] + g[k]);
    pc.ln_z[k] = anchor + trap + collar_integral(z_grid[k]) - collar_integral(z_grid[0]) -
                 area * (z_grid[k] - z_grid[0]);
    weight[k - 1] += 0.5 * h;
    double var = anchor_var;
    for (std::size_t m = 0; m <= k; ++m) {
      // the last node only carries its own half weight
      const double w = m == k ? 0.5 * h : weight[m];
      var += w * w * gse[m] * gse[m];
    }
    weight[k] += 0.5 * h;
    pc.ln_z_se[k] = std::sqrt(var);
  }
  return pc;
}

ScanResult density_gap_scan(const QuermassParams& p, const Tiling& tiling,
                            const TileWindow& window, const std::vector<double>& s_grid,
                            const ChainSettings& cs, std::uint64_t seed, int threads) {
  p.validate();
  if (!(p.beta > 0.0)) throw DomainError("the s = z / beta parametrisation needs beta > 0");
  if (s_grid.empty()) throw ConfigError("empty s grid");
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    if (!(s_grid[k] > 0.0)) throw ConfigError("s grid must be positive");
    if (k > 0 && !(s_grid[k] > s_grid[k - 1])) throw ConfigError("s grid must be increasing");
  }
  const std::size_t n = s_grid.size();
  const double area = window.rect(tiling.delta).area();
  std::vector<NodeResult> res(2 * n);
  parallel_for(2 * n, threads, [&](std::size_t k) {
    QuermassParams q = p;
    q.z = p.beta * s_grid[k / 2];
    const int spin = static_cast<int>(k % 2);
    res[k] = run_node(q, tiling, window, BoundaryCondition::wired(spin), cs, derive_seed(seed, k),
                      false);
  });

  ScanResult out;
  std::vector<ScanRow> rows(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) {
    ScanRow& row = rows[k];
    row.s = s_grid[k / 2];
    row.z = p.beta * row.s;
    row.bc = static_cast<int>(k % 2);
    row.rho = res[k].n.mean / area;
    row.rho_se = res[k].n.se / area;
    row.rho_bulk = res[k].bulk.mean;
    row.rho_bulk_se = res[k].bulk.se;
  }
  // psi relative to the first grid node: d psi / dz = (rho - z) / (z beta).
  for (int spin = 0; spin < 2; ++spin) {
    std::vector<double> g(n), gse(n), w(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const ScanRow& r = rows[2 * k + spin];
      g[k] = (r.rho - r.z) / (r.z * p.beta);
      gse[k] = r.rho_se / (r.z * p.beta);
    }
    rows[spin].psi = 0.0;
    rows[spin].psi_se = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      const double h = rows[2 * k + spin].z - rows[2 * (k - 1) + spin].z;
      rows[2 * k + spin].psi = rows[2 * (k - 1) + spin].psi + 0.5 * h * (g[k - 1] + g[k]);
      w[k - 1] += 0.5 * h;
      double var = 0.0;
      for (std::size_t m = 0; m <= k; ++m) {
        const double wm = m == k ? 0.5 * h : w[m];
        var += wm * wm * gse[m] * gse[m];
      }
      w[k] += 0.5 * h;
      rows[2 * k + spin].psi_se = std::sqrt(var);
    }
  }
  out.rows = rows;

  std::size_t best = 0;
  std::vector<double> gap(n);
  for (std::size_t k = 0; k < n; ++k) {
    gap[k] = rows[2 * k + 1].rho - rows[2 * k].rho;
    if (gap[k] > gap[best]) best = k;
  }
  out.max_gap = gap[best];
  out.max_gap_se = std::hypot(rows[2 * best + 1].rho_se, rows[2 * best].rho_se);
  out.s_max_gap = s_grid[best];
  out.s_crossing = s_grid[best];
  if (best > 0 && best + 1 < n) {
    // vertex of the parabola through the three grid points around the maximum
    const double x0 = s_grid[best - 1], x1 = s_grid[best], x2 = s_grid[best + 1];
    const double y0 = gap[best - 1], y1 = gap[best], y2 = gap[best + 1];
    const double den = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
    if (a < 0.0) out.s_crossing = std::clamp(-b / (2.0 * a), x0, x2);
  }
  out.z_crossing = p.beta * out.s_crossing;
  return out;
}

}  // namespace quermass
