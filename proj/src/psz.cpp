#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "quermass/expansion.hpp"
#include "quermass/sampler.hpp"

namespace quermass {

namespace {

// ln(1 - e^{-x}) for x > 0.
double log1m_exp(double x) { return std::log(-std::expm1(-x)); }

double psi1_order0(double s, double x) { return -1.0 + log1m_exp(s * x) / x; }

}  // namespace

TruncatedPressure truncated_pressure_order0(const QuermassParams& p, const Tiling& tiling) {
  if (!(p.z > 0.0) || !(p.beta > 0.0)) throw DomainError("order-0 pressures need z > 0 and beta > 0");
  const double x = p.beta * tiling.delta * tiling.delta;
  const double s = p.z / p.beta;
  TruncatedPressure t;
  t.psi0 = -s;
  t.psi1 = psi1_order0(s, x);
  t.psi = std::max(t.psi0, t.psi1);
  t.a0 = t.psi - t.psi0;
  t.a1 = t.psi - t.psi1;
  return t;
}

double gap_function(double s, double beta, double delta, double f1, double f0) {
  const double x = beta * delta * delta;
  return (s - 1.0) + log1m_exp(s * x) / x + f1 - f0;
}

GapRoot gap_root(double beta, double delta, double lo, double hi, const std::function<double(double)>& f1,
                 const std::function<double(double)>& f0, double tol) {
  auto G = [&](double s) { return gap_function(s, beta, delta, f1 ? f1(s) : 0.0, f0 ? f0(s) : 0.0); };
  GapRoot r;
  r.lo = lo;
  r.hi = hi;
  double glo = G(lo), ghi = G(hi);
  if (!(glo < 0.0 && ghi > 0.0)) {
    if (glo == 0.0) return r.s = lo, r;
    if (ghi == 0.0) return r.s = hi, r;
    throw RootNotBracketed("gap function does not change sign on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  }
  double a = lo, b = hi;
  while (b - a > tol * std::max(1.0, std::abs(b)) && r.iterations < 400) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double g = G(mid);
    ++r.iterations;
    if (g == 0.0) {
      a = b = mid;
      break;
    }
    (g < 0.0 ? a : b) = mid;
  }
  r.s = 0.5 * (a + b);
  return r;
}

GapRoot gap_root(const QuermassParams& p, const Tiling& tiling, const std::function<double(double)>& f1,
                 const std::function<double(double)>& f0) {
  const PeierlsConstants k = peierls_constants(p, tiling);
  return gap_root(p.beta, tiling.delta, k.U_lo, k.U_hi, f1, f0);
}

double smoothstep_cutoff(double x, double rho0) {
  const double lo = rho0 / 8.0, hi = rho0 / 4.0;
  if (x <= lo) return 1.0;
  if (x >= hi) return 0.0;
  const double u = (x - lo) / (hi - lo);
  return 1.0 - u * u * (3.0 - 2.0 * u);
}

// Peak slope 6 u (1 - u) at u = 1/2 over the width rho0 / 8.
double smoothstep_cutoff_slope_bound(double rho0) { return 1.5 / (rho0 / 8.0); }

PszInputs psz_inputs(const QuermassParams& p, const Tiling& tiling, double beta, std::optional<double> K,
                     std::optional<double> tau0_value) {
  QuermassParams q = p;
  q.beta = beta;
  const PeierlsConstants k = peierls_constants(q, tiling);
  const double d2 = tiling.delta * tiling.delta;
  const double x = beta * d2;
  PszInputs in;
  in.beta = beta;
  in.delta = tiling.delta;
  in.rho0 = k.rho0;
  in.l0 = k.l0;
  // |psi^(0) / s| = 1; |psi^(1) / s| is largest at the low end of U_beta.
  in.C1 = std::numbers::e + std::max(1.0, std::abs(psi1_order0(k.U_lo, x)) / k.U_lo);
  in.C2 = 1.0 / k.U_lo;
  const double kk = K.value_or(1.0 - k.r1);
  in.D = (2.0 + 2.0 * kk) * d2 * beta + 4.0 * beta + 4.0 * d2 * smoothstep_cutoff_slope_bound(k.rho0) +
         in.C1 * beta * d2 + in.C2;
  in.tau0 = tau0_value ? *tau0_value : tau0(in.l0);
  return in;
}

PszReport psz_conditions_check(const PszInputs& in) {
  if (!(in.rho0 > 0.0)) throw DomainError("rho0 must be positive");
  PszReport r;
  const double beta = in.beta, d2 = in.delta * in.delta, l0 = static_cast<double>(in.l0);
  r.tau = 0.5 * beta * in.rho0 - 8.0;
  r.eta = 2.0 * std::exp(-r.tau * l0 / 3.0);
  r.D = in.D;
  r.cond1 = r.tau > in.tau0;
  r.cond2 = std::log(in.D) + std::numbers::ln2 - r.tau * l0 / 3.0 <= 0.0;

  // 2/beta sqrt(k) e^{-tau sqrt(k)/2} peaks at sqrt(k) = 2/tau.
  r.cond3_rhs = in.rho0 / 16.0;
  if (r.tau <= 0.0) {
    r.cond3_lhs = std::numeric_limits<double>::infinity();
    r.cond3_worst_k = std::numeric_limits<long>::max();
  } else {
    auto f = [&](long k) { return 2.0 / beta * std::sqrt(double(k)) * std::exp(-r.tau * std::sqrt(double(k)) / 2.0); };
    const double kstar = (2.0 / r.tau) * (2.0 / r.tau);
    std::vector<long> cand{1};
    if (kstar > 1.0 && kstar < 1e15) {
      cand.push_back(static_cast<long>(std::floor(kstar)));
      cand.push_back(static_cast<long>(std::ceil(kstar)));
    }
    for (long k : cand)
      if (k >= 1 && f(k) > r.cond3_lhs) {
        r.cond3_lhs = f(k);
        r.cond3_worst_k = k;
      }
  }
  r.cond3 = r.cond3_lhs <= r.cond3_rhs;

  // lhs(x) / (x/2) with lhs = e^{-max(rho0/(16 d2 x), l0) tau/2} / (beta d2).
  // Below x* the exponent is A/x with A = rho0 tau / (32 d2); above it is flat.
  const double c = 1.0 / (beta * d2);
  const double xstar = in.rho0 / (16.0 * d2 * l0);
  auto ratio = [&](double xv) {
    const double e = std::max(in.rho0 / (16.0 * d2 * xv), l0) * r.tau / 2.0;
    return 2.0 * c * std::exp(-e) / xv;
  };
  if (r.tau <= 0.0) {
    r.cond5_ratio = std::numeric_limits<double>::infinity();
    r.cond5_worst_x = 0.0;
  } else {
    const double A = in.rho0 * r.tau / (32.0 * d2);
    r.cond5_worst_x = A < xstar ? A : xstar;
    r.cond5_ratio = ratio(r.cond5_worst_x);
    // Log-grid scan around both breakpoints as a cross-check of the reduction.
    const double centre = std::log(r.cond5_worst_x);
    for (int k = -400; k <= 400; ++k) {
      const double xv = std::exp(centre + 0.05 * k);
      const double v = ratio(xv);
      if (v > r.cond5_ratio) {
        r.cond5_ratio = v;
        r.cond5_worst_x = xv;
      }
    }
  }
  r.cond5 = r.cond5_ratio <= 1.0;
  return r;
}

MinimalBeta minimal_rigorous_beta(const QuermassParams& p, const Tiling& tiling, std::optional<double> K,
                                  double beta_max) {
  const double t0 = tau0(peierls_constants(p, tiling).l0);
  auto check = [&](double beta) { return psz_conditions_check(psz_inputs(p, tiling, beta, K, t0)); };
  MinimalBeta m;
  double prev = 0.0;  // log10 beta
  double hit = -1.0;
  for (double e = 0.0; e <= std::log10(beta_max) + 1e-12; e += 0.25) {
    if (check(std::pow(10.0, e)).all()) {
      hit = e;
      break;
    }
    prev = e;
  }
  if (hit < 0.0) return m;
  double lo = prev, hi = hit;
  if (hit == 0.0) lo = hi;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (check(std::pow(10.0, mid)).all() ? hi : lo) = mid;
  }
  m.found = true;
  m.beta = std::pow(10.0, hi);
  m.report = check(m.beta);
  m.not_desk_simulable = m.beta > kDeskBeta;
  return m;
}

std::string psz_to_json(const PszInputs& in, const PszReport& r, const std::optional<MinimalBeta>& m,
                        int indent) {
  nlohmann::json j;
  j["beta"] = in.beta;
  j["delta"] = in.delta;
  j["rho0"] = in.rho0;
  j["l0"] = in.l0;
  j["D"] = in.D;
  j["C1"] = in.C1;
  j["C2"] = in.C2;
  j["tau0"] = in.tau0;
  j["tau"] = r.tau;
  j["eta"] = r.eta;
  j["conditions"] = {{"tau_above_tau0", r.cond1},
                     {"D_eta_at_most_1", r.cond2},
                     {"surface_tail", r.cond3},
                     {"volume_tail", r.cond5}};
  j["surface_tail_worst_k"] = r.cond3_worst_k;
  j["surface_tail_lhs"] = r.cond3_lhs;
  j["surface_tail_rhs"] = r.cond3_rhs;
  j["volume_tail_worst_x"] = r.cond5_worst_x;
  j["volume_tail_ratio"] = r.cond5_ratio;
  if (m) {
    j["minimal_beta_found"] = m->found;
    j["minimal_beta"] = m->beta;
    j["not_desk_simulable"] = m->not_desk_simulable;
  }
  return j.dump(indent, ' ', false, nlohmann::json::error_handler_t::replace);
}

namespace {

// One tile of spin `flip` at the origin inside a constant background.
Contour single_tile_contour(const Tiling& tiling, int background) {
  Contour c;
  const long L = tiling.L;
  for (long j = -L; j <= L; ++j)
    for (long i = -L; i <= L; ++i)
      if (i * i + j * j <= L * L) c.support.push_back({i, j});
  std::sort(c.support.begin(), c.support.end());
  for (const auto& t : c.support)
    c.spins.push_back(static_cast<std::uint8_t>((t.i == 0 && t.j == 0) ? 1 - background : background));
  c.type = background;
  return c;
}

}  // namespace

ExperimentalPressure experimental_truncated_pressure(const QuermassParams& p, const Tiling& tiling, long samples,
                                                     std::uint64_t seed, int threads) {
  const TruncatedPressure base = truncated_pressure_order0(p, tiling);
  const PeierlsConstants k = peierls_constants(p, tiling);
  const double x = p.beta * tiling.delta * tiling.delta;
  ExperimentalPressure e;
  for (int b = 0; b < 2; ++b) {
    const Contour c = single_tile_contour(tiling, b);
    const IGammaEstimate ig = estimate_I_gamma(c, p, tiling, samples, derive_seed(seed, b), threads,
                                               std::max<long>(400, c.size()));
    const double log_g = b == 0 ? std::log(k.g0) : std::log(k.g1);
    const double scale = std::exp(-log_g * static_cast<double>(c.size()));
    const double w = ig.mean * scale, se = ig.se * scale;
    // Leading cluster term: the |support| translates through the origin,
    // each weighted by 1/|support|.
    (b == 0 ? e.w0 : e.w1) = w;
    (b == 0 ? e.f0 : e.f1) = w / x;
    (b == 0 ? e.f0_se : e.f1_se) = se / x;
  }
  e.psi0 = base.psi0 + e.f0;
  e.psi1 = base.psi1 + e.f1;
  const double cap = std::exp(-k.tau * static_cast<double>(k.l0));
  e.tau_stable = e.w0 <= cap && e.w1 <= cap;
  return e;
}

}  // namespace quermass
