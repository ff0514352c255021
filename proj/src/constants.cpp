#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "quermass/contours.hpp"
#include "quermass/sampler.hpp"

namespace quermass {

PeierlsConstants peierls_constants(const QuermassParams& p, const Tiling& tiling,
                                   std::optional<double> theta1_delta_lower) {
  p.validate();
  const double pi = std::numbers::pi;
  PeierlsConstants k;
  k.L = tiling.L;
  k.delta = tiling.delta;
  if (!(k.delta > 0.0) || k.L < 1) throw DomainError("tiling must have delta > 0 and L >= 1");
  const double d2 = k.delta * k.delta;
  const double V0 = pi * p.R0 * p.R0;
  k.ball_5L = lattice_ball_size(5.0 * static_cast<double>(k.L));
  k.ball_2L = lattice_ball_size(2.0 * static_cast<double>(k.L));
  k.r0 = 1.0 / static_cast<double>(k.ball_5L);
  k.r1 = 1.0 / static_cast<double>(k.ball_2L);
  k.theta1_star = p.R0 / 2.0;  // R0 |B(0,1)| / |dB(0,1)| in the plane
  k.theta1_delta = theta1_delta_lower.value_or(0.9 * k.theta1_star);
  if (!(p.theta1 > -k.theta1_star)) throw DomainError("theta1 must exceed -theta1*");

  const double chi_cost = p.theta2 * d2 / V0;
  if (p.theta1 >= 0.0) {
    // r0 evaluated at the largest admissible tile side
    const Tiling widest = Tiling::for_params(p);
    const double r0w = 1.0 / static_cast<double>(lattice_ball_size(5.0 * static_cast<double>(widest.L)));
    k.theta2_star = r0w * V0;
    k.theta2_delta = k.theta2_star;
    if (!(p.theta2 < k.theta2_delta)) throw DomainError("theta2 must be below theta2^delta(theta1)");
    k.rho0 = k.r0 * d2 - chi_cost;
  } else {
    if (!(k.theta1_delta > 0.0)) throw DomainError("theta1^delta lower bound must be positive");
    if (!(p.theta1 > -k.theta1_delta)) throw DomainError("theta1 must exceed -theta1^delta");
    k.theta2_delta = k.r0 * V0 * (1.0 + p.theta1 / k.theta1_delta);
    k.theta2_star = k.theta2_delta;
    if (!(p.theta2 < k.theta2_delta)) throw DomainError("theta2 must be below theta2^delta(theta1)");
    k.t_lo = p.theta2 / (k.theta1_delta + p.theta1) * d2 / V0;
    k.t_hi = (chi_cost - k.r0 * d2) / p.theta1;
    if (!(k.t_lo < k.t_hi)) throw DomainError("empty surface-threshold interval");
    k.t = 0.5 * (k.t_lo + k.t_hi);
    k.rho0 = std::min((k.theta1_delta + p.theta1) * k.t - chi_cost,
                      k.r0 * d2 + p.theta1 * k.t - chi_cost);
  }
  if (!(k.rho0 > 0.0)) throw DomainError("rho0 must be positive");

  k.l0 = lattice_ball_size(static_cast<double>(k.L));
  k.tau = 0.5 * p.beta * k.rho0 - 8.0;
  k.eta = 2.0 * std::exp(-k.tau * static_cast<double>(k.l0) / 3.0);
  k.g0 = std::exp(-p.z * d2);
  k.g1 = std::exp(-p.beta * d2) * -std::expm1(-p.z * d2);
  k.c = k.rho0 * static_cast<double>(k.l0) / 12.0;
  k.a = std::min(2.0 / (1.0 - k.r1), std::exp(-k.c * p.beta));
  if (p.beta > 0.0) {
    const double x = p.beta * d2;
    // ln(1 + e^y) without overflow
    auto softplus = [](double y) { return y > 30.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); };
    k.s_beta = softplus(x) / x;
    k.U_lo = softplus(x - k.a) / x;
    k.U_hi = softplus(x + k.a) / x;
  } else {
    k.s_beta = k.U_lo = k.U_hi = std::numeric_limits<double>::quiet_NaN();
  }
  return k;
}

PeierlsCheck verify_peierls_bound(const Configuration& cfg, const Contour& contour,
                                  const QuermassParams& p, const PeierlsConstants& k) {
  PeierlsCheck r;
  for (const auto& [t, e] : tile_energies(cfg, contour.support, k.delta, p)) r.energy += e;
  r.bound = static_cast<double>(contour.count_spin(1)) * k.delta * k.delta +
            k.rho0 * static_cast<double>(contour.size());
  r.holds = r.energy >= r.bound - 1e-9 * (1.0 + std::abs(r.bound));
  return r;
}

ChiCheck verify_chi_bound(const Configuration& cfg, const Contour& contour,
                          const QuermassParams& p, const Tiling& tiling) {
  ChiCheck r;
  for (const auto& [t, m] : tile_values(cfg, contour.support, tiling.delta)) r.chi += m.euler;
  r.bound = static_cast<double>(contour.size()) * tiling.delta * tiling.delta /
            (std::numbers::pi * p.R0 * p.R0);
  r.holds = static_cast<double>(r.chi) <= r.bound;
  return r;
}

bool verify_ratio_bound(const Contour& contour, const PeierlsConstants& k) {
  const double n = static_cast<double>(contour.size());
  for (int s = 0; s < 2; ++s) {
    const double m = static_cast<double>(contour.count_spin(s));
    if (m < k.r1 * n || m > (1.0 - k.r1) * n) return false;
  }
  return true;
}

namespace {

// Poisson(lambda) conditioned on being at least 1, by inversion.
long positive_poisson(double lambda, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u = u01(rng) * -std::expm1(-lambda);
  double term = lambda * std::exp(-lambda);
  double cum = term;
  long k = 1;
  while (cum < u && k < 10000) {
    ++k;
    term *= lambda / static_cast<double>(k);
    cum += term;
  }
  return k;
}

}  // namespace

IGammaEstimate estimate_I_gamma(const Contour& contour, const QuermassParams& p,
                                const Tiling& tiling, long samples, std::uint64_t seed,
                                int threads, long max_support) {
  p.validate();
  if (contour.size() > max_support)
    throw ContourError("contour too large for the Monte Carlo estimator");
  if (samples < 2) throw ContourError("need at least two samples");
  const double delta = tiling.delta;
  const double d2 = delta * delta;
  const long n1 = contour.count_spin(1), n0 = contour.count_spin(0);
  std::vector<TileIndex> occupied;
  for (std::size_t k = 0; k < contour.support.size(); ++k)
    if (contour.spins[k]) occupied.push_back(contour.support[k]);

  // Fixed replica layout so the result does not depend on the thread count.
  const long replicas = std::min<long>(16, samples);
  std::vector<double> sum(static_cast<std::size_t>(replicas), 0.0),
      sum2(static_cast<std::size_t>(replicas), 0.0);
  std::vector<long> count(static_cast<std::size_t>(replicas), 0);
  const double shift = static_cast<double>(n1) * d2;  // weights as e^{-beta (H - shift)}
  auto run = [&](long r) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const long m = samples / replicas + (r < samples % replicas ? 1 : 0);
    Configuration cfg;
    for (long s = 0; s < m; ++s) {
      cfg.clear();
      for (const auto& t : occupied) {
        const long k = positive_poisson(p.z * d2, rng);
        const TileBox b = tile_box(t, delta);
        for (long q = 0; q < k; ++q) {
          const double x = std::min(b.x0 + delta * u01(rng), std::nextafter(b.x1, b.x0));
          const double y = std::min(b.y0 + delta * u01(rng), std::nextafter(b.y1, b.y0));
          cfg.push_back({x, y, p.sample_radius(rng)});
        }
      }
      double h = 0.0;
      if (p.beta > 0.0)
        for (const auto& [t, e] : tile_energies(cfg, contour.support, delta, p)) h += e;
      const double w = p.beta > 0.0 ? std::exp(-p.beta * (h - shift)) : 1.0;
      sum[static_cast<std::size_t>(r)] += w;
      sum2[static_cast<std::size_t>(r)] += w * w;
      ++count[static_cast<std::size_t>(r)];
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(replicas)));
  if (nt == 1) {
    for (long r = 0; r < replicas; ++r) run(r);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&]() {
        for (long r; (r = next.fetch_add(1)) < replicas;) run(r);
      });
    for (auto& th : pool) th.join();
  }
  double S = 0.0, S2 = 0.0;
  long n = 0;
  for (long r = 0; r < replicas; ++r) {
    S += sum[static_cast<std::size_t>(r)];
    S2 += sum2[static_cast<std::size_t>(r)];
    n += count[static_cast<std::size_t>(r)];
  }
  const double mean = S / static_cast<double>(n);
  const double var = std::max(0.0, (S2 - S * mean) / static_cast<double>(n - 1));

  IGammaEstimate out;
  out.samples = n;
  out.prior = std::exp(-p.z * d2 * static_cast<double>(n0)) *
              std::pow(-std::expm1(-p.z * d2), static_cast<double>(n1));
  const double scale = out.prior * std::exp(-p.beta * shift);
  out.mean = scale * mean;
  out.se = scale * std::sqrt(var / static_cast<double>(n));
  try {
    const PeierlsConstants k = peierls_constants(p, tiling);
    out.peierls_cap = std::pow(k.g0, static_cast<double>(n0)) * std::pow(k.g1, static_cast<double>(n1)) *
                      std::exp(-p.beta * k.rho0 * static_cast<double>(contour.size()));
  } catch (const DomainError&) {
    out.peierls_cap = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace quermass
