#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <set>

#include "quermass/expansion.hpp"

namespace quermass {

namespace {

// Redelmeier's method over the king-move graph: fixed animals whose lowest
// cell (row-major) is the origin, each counted once.
struct AnimalCounter {
  int max_size;
  std::vector<long long> counts;
  std::set<TileIndex> occupied, seen;

  static bool allowed(TileIndex t) { return t.j > 0 || (t.j == 0 && t.i >= 0); }

  void grow(std::vector<TileIndex> untried, int size) {
    while (!untried.empty()) {
      const TileIndex cell = untried.back();
      untried.pop_back();
      occupied.insert(cell);
      ++counts[static_cast<std::size_t>(size + 1)];
      if (size + 1 < max_size) {
        std::vector<TileIndex> next = untried;
        std::vector<TileIndex> added;
        for (long dj = -1; dj <= 1; ++dj)
          for (long di = -1; di <= 1; ++di) {
            const TileIndex n{cell.i + di, cell.j + dj};
            if ((di == 0 && dj == 0) || !allowed(n) || seen.count(n)) continue;
            seen.insert(n);
            added.push_back(n);
            next.push_back(n);
          }
        grow(std::move(next), size + 1);
        for (const auto& n : added) seen.erase(n);
      }
      occupied.erase(cell);
    }
  }
};

double log_growth() { return std::log(7.0 * std::numbers::e); }

}  // namespace

std::vector<long long> animals_containing_origin(int max_size) {
  if (max_size < 1) return {0};
  AnimalCounter c{max_size, std::vector<long long>(static_cast<std::size_t>(max_size) + 1, 0), {}, {}};
  c.seen.insert({0, 0});
  c.grow({{0, 0}}, 0);
  // A translate class of size k places the origin on any of its k cells.
  for (int k = 1; k <= max_size; ++k) c.counts[static_cast<std::size_t>(k)] *= k;
  return c.counts;
}

ConvergenceReport convergence_check_empty() {
  ConvergenceReport r;
  r.satisfied = r.basic_ok = r.strong_ok = true;
  return r;
}

ConvergenceReport convergence_check(double tau, long l0, int size_cap) {
  if (l0 < 1) throw ExpansionError("l0 must be positive");
  static std::mutex mu;
  static std::map<int, std::vector<long long>> cache;
  std::vector<long long> exact;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(size_cap);
    if (it == cache.end()) it = cache.emplace(size_cap, animals_containing_origin(size_cap)).first;
    exact = it->second;
  }
  // Everything in logs: at l0 ~ 100 both sides sit far below the double range.
  const double ln2 = std::numbers::ln2;
  const double ninf = -std::numeric_limits<double>::infinity();
  auto log_add = [](double a, double b) {
    if (a < b) std::swap(a, b);
    return b == -std::numeric_limits<double>::infinity() ? a : a + std::log1p(std::exp(b - a));
  };
  double log_sum = ninf, log_strong = ninf, log_tail = ninf, log_strong_tail = ninf;
  for (long k = l0; k <= size_cap; ++k) {
    const double lc = std::log(static_cast<double>(exact[static_cast<std::size_t>(k)])) + k * ln2;
    const double kd = static_cast<double>(k);
    log_sum = log_add(log_sum, lc + (9.0 - tau) * kd);
    log_strong = log_add(log_strong, 2.0 * std::log(kd) + lc + (10.0 - tau / 2.0) * kd);
  }
  // Geometric tails from the growth bound, first term at m.
  const long m = std::max<long>(l0, size_cap + 1);
  const double md = static_cast<double>(m);
  const double lq = log_growth() + ln2 + 9.0 - tau;
  log_tail = lq < 0.0 ? lq * md - log_growth() - std::log(-std::expm1(lq))
                      : std::numeric_limits<double>::infinity();
  const double lq2 = log_growth() + ln2 + 10.0 - tau / 2.0;
  const double lratio = lq2 + 2.0 * std::log((md + 1.0) / md);
  log_strong_tail = lratio < 0.0 ? 2.0 * std::log(md) + lq2 * md - log_growth() - std::log(-std::expm1(lratio))
                                 : std::numeric_limits<double>::infinity();

  ConvergenceReport r;
  r.log_eta = ln2 - tau * static_cast<double>(l0) / 3.0;
  r.eta = std::exp(r.log_eta);
  r.sum = std::exp(log_sum);
  r.tail = std::exp(log_tail);
  r.strong_sum = std::exp(log_strong);
  r.strong_tail = std::exp(log_strong_tail);
  r.log_total = log_add(log_sum, log_tail);
  r.log_strong_total = log_add(log_strong, log_strong_tail);
  r.basic_ok = r.log_total <= 0.0;
  r.strong_ok = r.log_strong_total <= r.log_eta && r.log_eta <= 0.0;
  r.satisfied = r.basic_ok && r.strong_ok;
  return r;
}

double tau0(long l0, int size_cap) {
  static std::mutex mu;
  static std::map<std::pair<long, int>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({l0, size_cap});
    if (it != cache.end()) return it->second;
  }
  double lo = 0.0, hi = 1.0;
  while (!convergence_check(hi, l0, size_cap).satisfied) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw ExpansionError("no tau satisfies the convergence condition");
  }
  while (hi - lo > 1e-9 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (convergence_check(mid, l0, size_cap).satisfied ? hi : lo) = mid;
  }
  std::lock_guard<std::mutex> lock(mu);
  cache[{l0, size_cap}] = hi;
  return hi;
}

}  // namespace quermass
