#include "quermass/expansion.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <set>
#include <string>
#include <unordered_map>

#include "json.hpp"

namespace quermass {

bool Polymer::operator<(const Polymer& o) const {
  if (type != o.type) return type < o.type;
  return support < o.support;
}

bool Polymer::operator==(const Polymer& o) const { return type == o.type && support == o.support; }

bool sup_connected(const std::vector<TileIndex>& sites) {
  if (sites.empty()) return false;
  std::vector<std::uint8_t> seen(sites.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t a = stack.back();
    stack.pop_back();
    for (std::size_t b = 0; b < sites.size(); ++b) {
      if (seen[b]) continue;
      if (std::abs(sites[a].i - sites[b].i) <= 1 && std::abs(sites[a].j - sites[b].j) <= 1) {
        seen[b] = 1;
        ++reached;
        stack.push_back(b);
      }
    }
  }
  return reached == sites.size();
}

Polymer make_polymer(std::vector<TileIndex> sites, double weight, int type) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  if (!sup_connected(sites)) throw ExpansionError("polymer support must be nonempty and connected");
  if (!(weight >= 0.0)) throw ExpansionError("polymer weight must be nonnegative");
  return Polymer{std::move(sites), weight, type};
}

long sup_distance(const Polymer& a, const Polymer& b) {
  long best = std::numeric_limits<long>::max();
  for (const auto& s : a.support)
    for (const auto& t : b.support)
      best = std::min(best, std::max(std::abs(s.i - t.i), std::abs(s.j - t.j)));
  return best;
}

int zeta(const Polymer& a, const Polymer& b) {
  if (a.type != b.type) return -1;
  return sup_distance(a, b) > 1 ? 0 : -1;
}

namespace {

long long factorial(int n) {
  long long f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

Rational ursell_alpha(const std::vector<std::vector<int>>& zeta_matrix,
                      const std::vector<int>& multiplicities, int cap) {
  const std::size_t m = multiplicities.size();
  if (zeta_matrix.size() != m) throw ExpansionError("zeta matrix does not match the multiplicities");
  std::vector<std::size_t> vertex_of;
  long long denom = 1;
  for (std::size_t a = 0; a < m; ++a) {
    if (multiplicities[a] < 1) throw ExpansionError("multiplicities must be positive");
    for (int c = 0; c < multiplicities[a]; ++c) vertex_of.push_back(a);
    denom *= factorial(multiplicities[a]);
  }
  const int n = static_cast<int>(vertex_of.size());
  if (n > cap) throw CapExceeded("cluster has " + std::to_string(n) + " copies, cap is " + std::to_string(cap));
  if (n == 0) throw ExpansionError("empty cluster");

  // Edge weights 1 + zeta between copies; copies of one polymer always clash.
  std::vector<std::uint32_t> clash(static_cast<std::size_t>(n), 0);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      const std::size_t a = vertex_of[static_cast<std::size_t>(u)], b = vertex_of[static_cast<std::size_t>(v)];
      const int z = a == b ? -1 : zeta_matrix[a][b];
      if (z != 0 && z != -1) throw ExpansionError("zeta entries must be 0 or -1");
      if (z == -1) clash[static_cast<std::size_t>(u)] |= 1u << v;
    }

  // total(S) = prod over pairs in S of (1 + zeta): 1 iff S has no clashing pair.
  const std::uint32_t full = (1u << n) - 1;
  std::vector<long long> connected(static_cast<std::size_t>(full) + 1, 0);
  auto total = [&](std::uint32_t s) -> long long {
    for (std::uint32_t r = s; r; r &= r - 1) {
      const int u = std::countr_zero(r);
      if (clash[static_cast<std::size_t>(u)] & s) return 0;
    }
    return 1;
  };
  for (std::uint32_t s = 1; s <= full; ++s) {
    const std::uint32_t low = s & (~s + 1);
    long long c = total(s);
    // Subsets containing the lowest vertex, proper.
    const std::uint32_t rest = s ^ low;
    for (std::uint32_t sub = (rest - 1) & rest;; sub = (sub - 1) & rest) {
      const std::uint32_t part = sub | low;
      if (part != s) c -= connected[part] * total(s ^ part);
      if (sub == 0) break;
    }
    connected[s] = c;
  }
  return Rational(connected[full], denom);
}

Rational ursell_alpha(const PolymerCluster& cluster, const std::vector<Polymer>& pool, int cap) {
  std::vector<std::size_t> distinct;
  std::vector<int> mult;
  for (std::size_t idx : cluster.members) {
    if (idx >= pool.size()) throw ExpansionError("cluster member out of range");
    if (!distinct.empty() && distinct.back() == idx) {
      ++mult.back();
    } else {
      distinct.push_back(idx);
      mult.push_back(1);
    }
  }
  std::vector<std::vector<int>> z(distinct.size(), std::vector<int>(distinct.size(), -1));
  for (std::size_t a = 0; a < distinct.size(); ++a)
    for (std::size_t b = 0; b < distinct.size(); ++b)
      if (a != b) z[a][b] = zeta(pool[distinct[a]], pool[distinct[b]]);
  return ursell_alpha(z, mult, cap);
}

namespace {

using Incompat = std::function<bool(const Polymer&, const Polymer&)>;

bool default_incompatible(const Polymer& a, const Polymer& b) { return zeta(a, b) == -1; }

// Registry of polymers seen during enumeration, with cached pair relations.
struct Pool {
  std::vector<Polymer> polymers;
  std::map<Polymer, std::size_t> index;
  Incompat incompatible;
  // relation[b][a] for a < b: -1 unknown, 0 compatible, 1 clash.
  std::vector<std::vector<std::int8_t>> relation;
  // Ursell coefficients keyed by multiplicities and the clash pattern; many
  // clusters share a graph.
  std::unordered_map<std::string, double> alpha_cache;

  std::size_t add(const Polymer& p) {
    auto [it, fresh] = index.emplace(p, polymers.size());
    if (fresh) {
      relation.emplace_back(polymers.size(), std::int8_t{-1});
      polymers.push_back(p);
    }
    return it->second;
  }
  bool clashes(std::size_t a, std::size_t b) {
    if (a == b) return true;
    if (a > b) std::swap(a, b);
    std::int8_t& r = relation[b][a];
    if (r < 0) r = incompatible(polymers[a], polymers[b]) ? 1 : 0;
    return r == 1;
  }
};

struct ClusterTerm {
  double psi = 0.0;  // alpha * prod w
  long norm = 0;     // sum n |support|
  long support = 0;  // |union of supports|
};

ClusterTerm evaluate(const std::vector<std::size_t>& members, Pool& pool, int cap) {
  std::vector<std::size_t> distinct;
  std::vector<int> mult;
  ClusterTerm t;
  double log_w = 0.0;
  bool zero = false;
  std::set<TileIndex> uni;
  for (std::size_t idx : members) {
    const Polymer& p = pool.polymers[idx];
    t.norm += p.size();
    if (p.weight <= 0.0) zero = true;
    else log_w += std::log(p.weight);
    if (!distinct.empty() && distinct.back() == idx) {
      ++mult.back();
    } else {
      distinct.push_back(idx);
      mult.push_back(1);
      uni.insert(p.support.begin(), p.support.end());
    }
  }
  t.support = static_cast<long>(uni.size());
  if (zero) return t;
  std::string key;
  for (int m : mult) key.push_back(static_cast<char>(m));
  key.push_back('|');
  for (std::size_t a = 0; a < distinct.size(); ++a)
    for (std::size_t b = a + 1; b < distinct.size(); ++b)
      key.push_back(pool.clashes(distinct[a], distinct[b]) ? '1' : '0');
  auto it = pool.alpha_cache.find(key);
  if (it == pool.alpha_cache.end()) {
    std::vector<std::vector<int>> z(distinct.size(), std::vector<int>(distinct.size(), -1));
    std::size_t pos = mult.size() + 1;
    for (std::size_t a = 0; a < distinct.size(); ++a)
      for (std::size_t b = a + 1; b < distinct.size(); ++b) z[a][b] = z[b][a] = key[pos++] == '1' ? -1 : 0;
    it = pool.alpha_cache.emplace(key, boost::rational_cast<double>(ursell_alpha(z, mult, cap))).first;
  }
  t.psi = it->second * std::exp(log_w);
  return t;
}

using Level = std::set<std::vector<std::size_t>>;

// Connected multisets grown breadth-first by copy count. `neighbours(members)`
// returns candidate pool indices that may clash with the cluster.
template <class Neighbours, class Visit>

void enumerate_clusters(std::vector<std::vector<std::size_t>> seeds, Pool& pool, long Lmax, int cap,
                        Neighbours neighbours, Visit visit) {
  Level level;
  for (auto& s : seeds) {
    long norm = 0;
    for (auto i : s) norm += pool.polymers[i].size();
    if (norm <= Lmax) level.insert(std::move(s));
  }
  while (!level.empty()) {
    Level next;
    for (const auto& members : level) {
      visit(members);
      if (static_cast<int>(members.size()) >= cap) continue;
      long norm = 0;
      for (auto i : members) norm += pool.polymers[i].size();
      for (std::size_t c : neighbours(members)) {
        if (norm + pool.polymers[c].size() > Lmax) continue;
        bool touches = false;
        for (auto m : members)
          if (pool.clashes(m, c)) {
            touches = true;
            break;
          }
        if (!touches) continue;
        auto grown = members;
        grown.insert(std::upper_bound(grown.begin(), grown.end(), c), c);
        next.insert(std::move(grown));
      }
    }
    level = std::move(next);
  }
}

// True when Lmax admits clusters with more copies than the Ursell cap.
bool exceeds_cap(long Lmax, int cap, long smallest) { return smallest > 0 && Lmax / smallest > cap; }

}  // namespace

ExpansionResult cluster_pressure(const PolymerSystem& system, const ExpansionOptions& opt,
                                 const std::optional<TileWindow>& window) {
  if (!system.containing) throw ExpansionError("polymer system has no enumerator");
  if (opt.Lmax < 1) throw ExpansionError("Lmax must be positive");
  Pool pool;
  pool.incompatible = system.incompatible ? system.incompatible : Incompat(default_incompatible);
  std::map<TileIndex, std::vector<std::size_t>> by_site;
  auto at_site = [&](TileIndex s) -> const std::vector<std::size_t>& {
    auto it = by_site.find(s);
    if (it != by_site.end()) return it->second;
    std::vector<std::size_t> ids;
    for (const auto& p : system.containing(s)) {
      if (!std::binary_search(p.support.begin(), p.support.end(), s))
        throw ExpansionError("enumerator returned a polymer missing the queried site");
      ids.push_back(pool.add(p));
    }
    return by_site.emplace(s, std::move(ids)).first->second;
  };

  ExpansionResult r;
  r.tau = opt.tau;
  r.l0 = opt.l0;
  r.Lmax = opt.Lmax;
  r.tail_bound = std::exp(-opt.tau * static_cast<double>(opt.Lmax) / 2.0);
  r.eta = 2.0 * std::exp(-opt.tau * static_cast<double>(opt.l0) / 3.0);

  std::vector<std::vector<std::size_t>> seeds;
  long smallest = std::numeric_limits<long>::max();
  for (auto id : at_site({0, 0})) {
    seeds.push_back({id});
    smallest = std::min(smallest, pool.polymers[id].size());
  }
  if (seeds.empty()) return r;
  if (exceeds_cap(opt.Lmax, opt.cap, smallest))
    throw CapExceeded("Lmax admits clusters with more copies than the Ursell cap");

  const long reach = system.reach;
  auto neighbours = [&](const std::vector<std::size_t>& members) {
    std::set<TileIndex> zone;
    for (auto m : members)
      for (const auto& s : pool.polymers[m].support)
        for (long dj = -reach; dj <= reach; ++dj)
          for (long di = -reach; di <= reach; ++di) zone.insert({s.i + di, s.j + dj});
    std::set<std::size_t> ids;
    for (const auto& s : zone)
      for (auto id : at_site(s)) ids.insert(id);
    if (!pool.polymers[members.front()].support.empty()) {
      const int type = pool.polymers[members.front()].type;
      for (auto id : ids)
        if (pool.polymers[id].type != type)
          throw ExpansionError("cluster_pressure needs a single-type polymer system");
    }
    return std::vector<std::size_t>(ids.begin(), ids.end());
  };
  enumerate_clusters(std::move(seeds), pool, opt.Lmax, opt.cap, neighbours,
                     [&](const std::vector<std::size_t>& members) {
                       const ClusterTerm t = evaluate(members, pool, opt.cap);
                       ++r.clusters;
                       r.terms_by_size[t.norm] += t.psi / static_cast<double>(t.support);
                     });
  for (const auto& [size, v] : r.terms_by_size) r.g += v;
  if (window) {
    r.window_sites = window->count();
    r.log_phi_bulk = r.g * static_cast<double>(window->count());
    r.boundary_bound = r.eta * static_cast<double>(2 * (window->width() + window->height()) + 4);
  }
  return r;
}

double cluster_log_partition(const std::vector<Polymer>& polymers, long Lmax, const Incompat& incompatible,
                             int cap) {
  Pool pool;
  pool.incompatible = incompatible ? incompatible : Incompat(default_incompatible);
  std::vector<std::vector<std::size_t>> seeds;
  long smallest = std::numeric_limits<long>::max();
  for (const auto& p : polymers) {
    seeds.push_back({pool.add(p)});
    smallest = std::min(smallest, p.size());
  }
  if (seeds.empty()) return 0.0;
  if (exceeds_cap(Lmax, cap, smallest))
    throw CapExceeded("Lmax admits clusters with more copies than the Ursell cap");
  std::vector<std::size_t> all(pool.polymers.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  std::map<long, double> by_size;
  enumerate_clusters(std::move(seeds), pool, Lmax, cap,
                     [&](const std::vector<std::size_t>&) { return all; },
                     [&](const std::vector<std::size_t>& members) {
                       const ClusterTerm t = evaluate(members, pool, cap);
                       by_size[t.norm] += t.psi;
                     });
  double sum = 0.0;
  for (const auto& [size, v] : by_size) sum += v;
  return sum;
}

PolymerSystem dimer_chain_system(double w) {
  PolymerSystem sys;
  sys.reach = 0;
  sys.containing = [w](TileIndex s) {
    std::vector<Polymer> v;
    if (s.j != 0) return v;
    v.push_back(make_polymer({{s.i - 1, 0}, {s.i, 0}}, w));
    v.push_back(make_polymer({{s.i, 0}, {s.i + 1, 0}}, w));
    return v;
  };
  sys.incompatible = [](const Polymer& a, const Polymer& b) {
    for (const auto& s : a.support)
      if (std::binary_search(b.support.begin(), b.support.end(), s)) return true;
    return false;
  };
  return sys;
}

double dimer_chain_pressure(double w) { return std::log((1.0 + std::sqrt(1.0 + 4.0 * w)) / 2.0); }

std::string expansion_to_json(const ExpansionResult& r, int indent) {
  nlohmann::json j;
  j["tau"] = r.tau;
  j["l0"] = r.l0;
  j["eta"] = r.eta;
  j["Lmax"] = r.Lmax;
  j["partial_sum"] = r.g;
  j["tail_bound"] = r.tail_bound;
  j["clusters"] = r.clusters;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [size, v] : r.terms_by_size) table.push_back({{"size", size}, {"term", v}});
  j["terms_by_size"] = table;
  if (r.window_sites) {
    j["window_sites"] = *r.window_sites;
    j["log_phi_bulk"] = r.log_phi_bulk;
    j["boundary_bound"] = r.boundary_bound;
  }
  return j.dump(indent);
}

}  // namespace quermass
