#include "quermass/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace quermass {

std::string BoundaryCondition::name() const {
  switch (kind) {
    case Kind::Free:
      return "free";
    case Kind::Outer:
      return "outer";
    case Kind::SpinWired:
      return spin ? "wired1" : "wired0";
  }
  return "?";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return mix(seed ^ mix(key + 0x632be59bd9b4e019ULL));
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void erase_value(std::vector<std::uint32_t>& v, std::uint32_t x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it == v.end()) throw std::logic_error("sampler bucket out of sync");
  *it = v.back();
  v.pop_back();
}

void replace_value(std::vector<std::uint32_t>& v, std::uint32_t from, std::uint32_t to) {
  auto it = std::find(v.begin(), v.end(), from);
  if (it == v.end()) throw std::logic_error("sampler bucket out of sync");
  *it = to;
}

bool overlaps(const Disk& a, const Disk& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  const double s = a.r + b.r;
  return dx * dx + dy * dy <= s * s * (1.0 + 1e-12);
}

}  // namespace

Chain::Chain(const QuermassParams& p, const Tiling& tiling, const TileWindow& window,
             const BoundaryCondition& bc, std::uint64_t seed, const SamplerOptions& opt)
    : p_(p), tiling_(tiling), win_(window), bc_(bc), opt_(opt), rng_(seed) {
  p_.validate();
  if (!(tiling_.delta > 0.0)) throw ConfigError("tile side must be positive");
  if (win_.width() < 1 || win_.height() < 1) throw ConfigError("window smaller than one tile");
  if (bc_.kind == BoundaryCondition::Kind::SpinWired && bc_.spin != 0 && bc_.spin != 1)
    throw ConfigError("wired boundary spin must be 0 or 1");
  const double tot = opt_.p_birth + opt_.p_death + opt_.p_move;
  if (!(opt_.p_birth > 0.0) || !(opt_.p_death > 0.0) || opt_.p_move < 0.0 ||
      std::abs(tot - 1.0) > 1e-9)
    throw ConfigError("proposal probabilities must be positive and sum to 1");
  rect_ = win_.rect(tiling_.delta);
  area_ = rect_.area();
  sigma_ = opt_.move_scale > 0.0 ? opt_.move_scale : 0.5 * p_.R0;
  cover_shortcut_ = 2.0 * std::sqrt(2.0) * tiling_.delta <= p_.R0 * (1.0 + 1e-12);
  for (const auto& d : bc_.outer)
    if (rect_.contains(d.x, d.y)) throw ConfigError("outer configuration has a point inside the window");
  build_grids();
  initialize();
}

std::size_t Chain::cell_of(double x, double y) const {
  long cx = static_cast<long>(std::floor((x - cx0_) / cell_));
  long cy = static_cast<long>(std::floor((y - cy0_) / cell_));
  cx = std::clamp(cx, 0L, cw_ - 1);
  cy = std::clamp(cy, 0L, ch_ - 1);
  return static_cast<std::size_t>(cy * cw_ + cx);
}

void Chain::build_grids() {
  const double delta = tiling_.delta;
  margin_ = static_cast<long>(std::ceil(p_.R1 / delta)) + 1;
  gi0_ = win_.i0 - margin_;
  gj0_ = win_.j0 - margin_;
  gw_ = win_.width() + 2 * margin_;
  gh_ = win_.height() + 2 * margin_;
  const std::size_t nt = static_cast<std::size_t>(gw_ * gh_);
  tile_pts_.assign(nt, {});
  cache_.assign(nt, 0.0);
  base_.assign(nt, 0.0);
  covered_.assign(nt, 0);
  counted_.assign(nt, 0);
  iboundary_.assign(nt, 0);
  stamp_.assign(nt, 0);
  stale_.assign(nt, 0);
  for (std::size_t s = 0; s < nt; ++s) {
    const TileIndex t = tile_at(s);
    const bool inside = win_.contains(t);
    counted_[s] = bc_.kind == BoundaryCondition::Kind::SpinWired ? inside : 1;
    iboundary_[s] = bc_.kind == BoundaryCondition::Kind::SpinWired &&
                    in_interior_boundary(win_, t, tiling_.L);
  }

  cell_ = std::max(2.0 * p_.R1, p_.R1 + delta);
  const double pad = static_cast<double>(margin_) * delta + cell_;
  cx0_ = rect_.x0 - pad;
  cy0_ = rect_.y0 - pad;
  cw_ = static_cast<long>(std::ceil((rect_.x1 - rect_.x0 + 2 * pad) / cell_)) + 1;
  ch_ = static_cast<long>(std::ceil((rect_.y1 - rect_.y0 + 2 * pad) / cell_)) + 1;
  cell_pts_.assign(static_cast<std::size_t>(cw_ * ch_), {});
  cell_outer_.assign(static_cast<std::size_t>(cw_ * ch_), {});

  outer_near_.clear();
  const double reach = static_cast<double>(margin_) * delta + p_.R1;
  for (const auto& d : bc_.outer) {
    if (d.x < rect_.x0 - reach || d.x > rect_.x1 + reach || d.y < rect_.y0 - reach ||
        d.y > rect_.y1 + reach)
      continue;
    cell_outer_[cell_of(d.x, d.y)].push_back(static_cast<std::uint32_t>(outer_near_.size()));
    outer_near_.push_back(d);
  }
  if (bc_.kind == BoundaryCondition::Kind::Outer) {
    for (std::size_t s = 0; s < nt; ++s) {
      const TileIndex t = tile_at(s);
      const TileBox b = tile_box(t, delta);
      scratch_.clear();
      const std::size_t c = cell_of(t.i * delta, t.j * delta);
      const long ccx = static_cast<long>(c) % cw_, ccy = static_cast<long>(c) / cw_;
      for (long yy = std::max(0L, ccy - 1); yy <= std::min(ch_ - 1, ccy + 1); ++yy)
        for (long xx = std::max(0L, ccx - 1); xx <= std::min(cw_ - 1, ccx + 1); ++xx)
          for (auto k : cell_outer_[static_cast<std::size_t>(yy * cw_ + xx)])
            if (disk_meets_box(outer_near_[k], b)) scratch_.push_back(outer_near_[k]);
      base_[s] = energy_of(tile_functionals_local(scratch_, t, delta), p_);
    }
  }
}

double Chain::single_disk_energy(double r) const {
  const double pi = std::numbers::pi;
  return pi * r * r + p_.theta1 * 2.0 * pi * r - p_.theta2;
}

bool Chain::isolated(const Disk& d, long exclude) const {
  const std::size_t c = cell_of(d.x, d.y);
  const long ccx = static_cast<long>(c) % cw_, ccy = static_cast<long>(c) / cw_;
  for (long yy = std::max(0L, ccy - 1); yy <= std::min(ch_ - 1, ccy + 1); ++yy) {
    for (long xx = std::max(0L, ccx - 1); xx <= std::min(cw_ - 1, ccx + 1); ++xx) {
      const std::size_t cc = static_cast<std::size_t>(yy * cw_ + xx);
      for (auto k : cell_pts_[cc])
        if (static_cast<long>(k) != exclude && overlaps(pts_[k], d)) return false;
      for (auto k : cell_outer_[cc])
        if (overlaps(outer_near_[k], d)) return false;
    }
  }
  return true;
}

bool Chain::reaches_uncounted(const Disk& d) const {
  if (bc_.kind != BoundaryCondition::Kind::SpinWired) return false;
  return !(d.x - d.r > rect_.x0 && d.x + d.r < rect_.x1 && d.y - d.r > rect_.y0 &&
           d.y + d.r < rect_.y1);
}

double Chain::tile_value(std::size_t s, const Change& ch, bool& covered) {
  const double delta = tiling_.delta;
  const TileIndex t = tile_at(s);
  covered = true;
  if (cover_shortcut_) {
    // Any centre in the 3x3 block around the tile is within 2*sqrt(2)*delta
    // <= R0 of every point of the tile.
    if (ch.has_added) {
      const TileIndex a = tile_of(ch.added.x, ch.added.y, delta);
      if (std::abs(a.i - t.i) <= 1 && std::abs(a.j - t.j) <= 1) return delta * delta;
    }
    for (long j = std::max(gj0_, t.j - 1); j <= std::min(gj0_ + gh_ - 1, t.j + 1); ++j) {
      for (long i = std::max(gi0_, t.i - 1); i <= std::min(gi0_ + gw_ - 1, t.i + 1); ++i) {
        const auto& b = tile_pts_[slot(i, j)];
        for (auto k : b)
          if (static_cast<long>(k) != ch.removed) return delta * delta;
      }
    }
  }
  const TileBox box = tile_box(t, delta);
  scratch_.clear();
  const std::size_t c = cell_of(t.i * delta, t.j * delta);
  const long ccx = static_cast<long>(c) % cw_, ccy = static_cast<long>(c) / cw_;
  for (long yy = std::max(0L, ccy - 1); yy <= std::min(ch_ - 1, ccy + 1); ++yy) {
    for (long xx = std::max(0L, ccx - 1); xx <= std::min(cw_ - 1, ccx + 1); ++xx) {
      const std::size_t cc = static_cast<std::size_t>(yy * cw_ + xx);
      for (auto k : cell_pts_[cc])
        if (static_cast<long>(k) != ch.removed && disk_meets_box(pts_[k], box))
          scratch_.push_back(pts_[k]);
      for (auto k : cell_outer_[cc])
        if (disk_meets_box(outer_near_[k], box)) scratch_.push_back(outer_near_[k]);
    }
  }
  if (ch.has_added && disk_meets_box(ch.added, box)) scratch_.push_back(ch.added);
  for (const auto& d : scratch_)
    if (box_inside_disk(box, d)) return delta * delta;
  covered = false;
  return energy_of(tile_functionals_local(scratch_, t, delta), p_);
}

double Chain::delta_energy(const Change& ch, bool fill_pending) {
  const double delta = tiling_.delta;
  if (fill_pending) pending_.clear();
  if (++stamp_id_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    stamp_id_ = 1;
  }
  double dh = 0.0;
  const Disk* removed = ch.removed >= 0 ? &pts_[static_cast<std::size_t>(ch.removed)] : nullptr;
  auto visit = [&](const Disk& d) {
    const long i0 = std::max(gi0_, static_cast<long>(std::ceil((d.x - d.r) / delta - 0.5)));
    const long i1 =
        std::min(gi0_ + gw_ - 1, static_cast<long>(std::floor((d.x + d.r) / delta + 0.5)));
    const long j0 = std::max(gj0_, static_cast<long>(std::ceil((d.y - d.r) / delta - 0.5)));
    const long j1 =
        std::min(gj0_ + gh_ - 1, static_cast<long>(std::floor((d.y + d.r) / delta + 0.5)));
    for (long j = j0; j <= j1; ++j) {
      for (long i = i0; i <= i1; ++i) {
        const std::size_t s = slot(i, j);
        if (stamp_[s] == stamp_id_) continue;
        stamp_[s] = stamp_id_;
        if (!counted_[s]) continue;
        const TileBox box = tile_box({i, j}, delta);
        if (!disk_meets_box(d, box)) {
          stamp_[s] = 0;  // may still be met by the other disk
          continue;
        }
        double old = cache_[s];
        if (stale_[s]) {
          bool c0 = false;
          old = tile_value(s, Change{}, c0);
        } else if (covered_[s] && !(removed && disk_meets_box(*removed, box))) {
          continue;
        }
        bool cov = false;
        const double v = tile_value(s, ch, cov);
        dh += v - old;
        if (fill_pending) pending_.push_back({s, v, cov});
      }
    }
  };
  if (removed) visit(*removed);
  if (ch.has_added) visit(ch.added);
  pending_ready_ = fill_pending;
  return dh;
}

void Chain::mark_stale(const Disk& d) {
  const double delta = tiling_.delta;
  const long i0 = std::max(gi0_, static_cast<long>(std::ceil((d.x - d.r) / delta - 0.5)));
  const long i1 = std::min(gi0_ + gw_ - 1, static_cast<long>(std::floor((d.x + d.r) / delta + 0.5)));
  const long j0 = std::max(gj0_, static_cast<long>(std::ceil((d.y - d.r) / delta - 0.5)));
  const long j1 = std::min(gj0_ + gh_ - 1, static_cast<long>(std::floor((d.y + d.r) / delta + 0.5)));
  for (long j = j0; j <= j1; ++j)
    for (long i = i0; i <= i1; ++i) stale_[slot(i, j)] = 1;
}

bool Chain::constraint_allows(const Change& ch) const {
  if (bc_.kind != BoundaryCondition::Kind::SpinWired) return true;
  const double delta = tiling_.delta;
  std::size_t to = static_cast<std::size_t>(-1);
  if (ch.has_added) {
    const TileIndex a = tile_of(ch.added.x, ch.added.y, delta);
    to = slot(a.i, a.j);
  }
  if (bc_.spin == 1) {
    if (ch.removed < 0) return true;
    const std::size_t from = pt_tile_[static_cast<std::size_t>(ch.removed)];
    return !(iboundary_[from] && tile_pts_[from].size() == 1 && to != from);
  }
  return !(ch.has_added && iboundary_[to]);
}

void Chain::add_point(const Disk& d) {
  const TileIndex t = tile_of(d.x, d.y, tiling_.delta);
  const std::size_t s = slot(t.i, t.j);
  const std::size_t c = cell_of(d.x, d.y);
  const auto id = static_cast<std::uint32_t>(pts_.size());
  pts_.push_back(d);
  pt_tile_.push_back(s);
  pt_cell_.push_back(c);
  tile_pts_[s].push_back(id);
  cell_pts_[c].push_back(id);
}

void Chain::remove_point(std::size_t k) {
  const auto id = static_cast<std::uint32_t>(k);
  const auto last = static_cast<std::uint32_t>(pts_.size() - 1);
  erase_value(tile_pts_[pt_tile_[k]], id);
  erase_value(cell_pts_[pt_cell_[k]], id);
  if (id != last) {
    replace_value(tile_pts_[pt_tile_[last]], last, id);
    replace_value(cell_pts_[pt_cell_[last]], last, id);
    pts_[k] = pts_[last];
    pt_tile_[k] = pt_tile_[last];
    pt_cell_[k] = pt_cell_[last];
  }
  pts_.pop_back();
  pt_tile_.pop_back();
  pt_cell_.pop_back();
}

// Applies a proposal whose increment (last_dh_) was just evaluated. Tile
// values come from pending_ when the tile route produced them; after a
// shortcut evaluation the touched tiles are only flagged stale.
void Chain::commit(const Change& ch) {
  const bool track = p_.beta > 0.0;
  if (track && !pending_ready_) {
    if (ch.removed >= 0) mark_stale(pts_[static_cast<std::size_t>(ch.removed)]);
    if (ch.has_added) mark_stale(ch.added);
  }
  if (ch.removed >= 0 && ch.has_added) {
    const std::size_t k = static_cast<std::size_t>(ch.removed);
    const auto id = static_cast<std::uint32_t>(k);
    erase_value(tile_pts_[pt_tile_[k]], id);
    erase_value(cell_pts_[pt_cell_[k]], id);
    const TileIndex t = tile_of(ch.added.x, ch.added.y, tiling_.delta);
    pts_[k] = ch.added;
    pt_tile_[k] = slot(t.i, t.j);
    pt_cell_[k] = cell_of(ch.added.x, ch.added.y);
    tile_pts_[pt_tile_[k]].push_back(id);
    cell_pts_[pt_cell_[k]].push_back(id);
  } else if (ch.removed >= 0) {
    remove_point(static_cast<std::size_t>(ch.removed));
  } else if (ch.has_added) {
    add_point(ch.added);
  }
  if (track) {
    h_total_ += last_dh_;
    if (pending_ready_) {
      for (const auto& u : pending_) {
        cache_[u.tile] = u.value;
        covered_[u.tile] = u.covered;
        stale_[u.tile] = 0;
      }
    }
  } else {
    dirty_ = true;
  }
  pending_ready_ = false;
}

void Chain::rebuild_cache() {
  const Change none;
  for (std::size_t s = 0; s < cache_.size(); ++s) {
    if (!counted_[s]) continue;
    bool cov = false;
    cache_[s] = tile_value(s, none, cov);
    covered_[s] = cov;
  }
  std::fill(stale_.begin(), stale_.end(), 0);
  h_total_ = 0.0;
  for (std::size_t s = 0; s < cache_.size(); ++s)
    if (counted_[s]) h_total_ += cache_[s] - base_[s];
  dirty_ = false;
}

void Chain::set_configuration(const Configuration& c) {
  for (auto& b : tile_pts_) b.clear();
  for (auto& b : cell_pts_) b.clear();
  pts_.clear();
  pt_tile_.clear();
  pt_cell_.clear();
  for (const auto& d : c) {
    if (!rect_.contains(d.x, d.y)) throw ConfigError("point outside the window");
    if (d.r < p_.R0 || d.r > p_.R1) throw ConfigError("radius outside [R0, R1]");
    add_point(d);
  }
  if (!constraint_ok()) throw ConfigError("configuration violates the boundary spin constraint");
  if (p_.beta > 0.0) rebuild_cache();
  else dirty_ = true;
}

void Chain::initialize() {
  Configuration c;
  if (bc_.kind == BoundaryCondition::Kind::SpinWired && bc_.spin == 1) {
    const double delta = tiling_.delta;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<TileIndex> inner;
    for (long i = win_.i0; i <= win_.i1; ++i) {
      for (long j = win_.j0; j <= win_.j1; ++j) {
        const TileBox b = tile_box({i, j}, delta);
        if (in_interior_boundary(win_, {i, j}, tiling_.L)) {
          const double x = b.x0 + delta * u01(rng_);
          const double y = b.y0 + delta * u01(rng_);
          c.push_back({std::min(x, std::nextafter(b.x1, b.x0)),
                       std::min(y, std::nextafter(b.y1, b.y0)), p_.sample_radius(rng_)});
        } else {
          inner.push_back({i, j});
        }
      }
    }
    if (!inner.empty()) {
      std::poisson_distribution<long> pois(p_.z * delta * delta * static_cast<double>(inner.size()));
      const long n = pois(rng_);
      std::uniform_int_distribution<std::size_t> pick(0, inner.size() - 1);
      for (long k = 0; k < n; ++k) {
        const TileBox b = tile_box(inner[pick(rng_)], delta);
        const double x = b.x0 + delta * u01(rng_);
        const double y = b.y0 + delta * u01(rng_);
        c.push_back({std::min(x, std::nextafter(b.x1, b.x0)),
                     std::min(y, std::nextafter(b.y1, b.y0)), p_.sample_radius(rng_)});
      }
    }
  }
  set_configuration(c);
}

bool Chain::constraint_ok() const {
  if (bc_.kind != BoundaryCondition::Kind::SpinWired) return true;
  for (std::size_t s = 0; s < iboundary_.size(); ++s) {
    if (!iboundary_[s]) continue;
    const bool occupied = !tile_pts_[s].empty();
    if (occupied != (bc_.spin == 1)) return false;
  }
  return true;
}

double Chain::bulk_area() const {
  long nb = 0;
  for (std::size_t s = 0; s < iboundary_.size(); ++s) nb += iboundary_[s];
  return area_ - static_cast<double>(nb) * tiling_.delta * tiling_.delta;
}

long Chain::bulk_size() const {
  long n = 0;
  for (std::size_t s : pt_tile_) n += !iboundary_[s];
  return n;
}

double Chain::energy() {
  if (p_.beta == 0.0) return energy_from_scratch();
  if (dirty_) rebuild_cache();
  return h_total_;
}

double Chain::energy_from_scratch() const {
  switch (bc_.kind) {
    case BoundaryCondition::Kind::Free:
      return hamiltonian(pts_, p_);
    case BoundaryCondition::Kind::Outer: {
      Configuration all = pts_;
      all.insert(all.end(), outer_near_.begin(), outer_near_.end());
      return hamiltonian(all, p_) - hamiltonian(outer_near_, p_);
    }
    case BoundaryCondition::Kind::SpinWired: {
      std::vector<TileIndex> tiles;
      tiles.reserve(static_cast<std::size_t>(win_.count()));
      for (long i = win_.i0; i <= win_.i1; ++i)
        for (long j = win_.j0; j <= win_.j1; ++j) tiles.push_back({i, j});
      double h = 0.0;
      for (const auto& [t, e] : tile_energies(pts_, tiles, tiling_.delta, p_)) h += e;
      return h;
    }
  }
  return 0.0;
}

double Chain::delta_birth(const Disk& d) {
  pending_ready_ = false;
  if (isolated(d, -1) && !reaches_uncounted(d)) return last_dh_ = single_disk_energy(d.r);
  Change ch;
  ch.has_added = true;
  ch.added = d;
  return last_dh_ = delta_energy(ch, true);
}

double Chain::delta_death(std::size_t k) {
  const Disk& d = pts_.at(k);
  pending_ready_ = false;
  if (isolated(d, static_cast<long>(k)) && !reaches_uncounted(d))
    return last_dh_ = -single_disk_energy(d.r);
  Change ch;
  ch.removed = static_cast<long>(k);
  return last_dh_ = delta_energy(ch, true);
}

double Chain::delta_move(std::size_t k, double nx, double ny) {
  const Disk& d = pts_.at(k);
  const Disk nd{nx, ny, d.r};
  const long ik = static_cast<long>(k);
  pending_ready_ = false;
  if (isolated(d, ik) && isolated(nd, ik) && !reaches_uncounted(d) && !reaches_uncounted(nd))
    return last_dh_ = 0.0;
  Change ch;
  ch.removed = ik;
  ch.has_added = true;
  ch.added = nd;
  return last_dh_ = delta_energy(ch, true);
}

double Chain::log_ratio_birth(const Disk& d) {
  Change ch;
  ch.has_added = true;
  ch.added = d;
  if (!rect_.contains(d.x, d.y) || !constraint_allows(ch)) return kNegInf;
  const double n = static_cast<double>(pts_.size());
  double lr = std::log(p_.z * area_ / (n + 1.0)) + std::log(opt_.p_death / opt_.p_birth);
  if (p_.beta > 0.0) lr -= p_.beta * delta_birth(d);
  return lr;
}

double Chain::log_ratio_death(std::size_t k) {
  Change ch;
  ch.removed = static_cast<long>(k);
  if (k >= pts_.size() || !constraint_allows(ch)) return kNegInf;
  const double n = static_cast<double>(pts_.size());
  double lr = std::log(n / (p_.z * area_)) + std::log(opt_.p_birth / opt_.p_death);
  if (p_.beta > 0.0) lr -= p_.beta * delta_death(k);
  return lr;
}

double Chain::log_ratio_move(std::size_t k, double nx, double ny) {
  if (k >= pts_.size() || !rect_.contains(nx, ny)) return kNegInf;
  Change ch;
  ch.removed = static_cast<long>(k);
  ch.has_added = true;
  ch.added = {nx, ny, pts_[k].r};
  if (!constraint_allows(ch)) return kNegInf;
  return p_.beta > 0.0 ? -p_.beta * delta_move(k, nx, ny) : 0.0;
}

void Chain::step() {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u = u01(rng_);
  if (u < opt_.p_birth) {
    ++prop_[0];
    const double x = rect_.x0 + (rect_.x1 - rect_.x0) * u01(rng_);
    const double y = rect_.y0 + (rect_.y1 - rect_.y0) * u01(rng_);
    const Disk d{x, y, p_.sample_radius(rng_)};
    const double lr = log_ratio_birth(d);
    if (lr == kNegInf) return;
    if (lr >= 0.0 || std::log(u01(rng_)) < lr) {
      Change ch;
      ch.has_added = true;
      ch.added = d;
      commit(ch);
      ++acc_[0];
    }
  } else if (u < opt_.p_birth + opt_.p_death) {
    ++prop_[1];
    if (pts_.empty()) return;
    std::uniform_int_distribution<std::size_t> pick(0, pts_.size() - 1);
    const std::size_t k = pick(rng_);
    const double lr = log_ratio_death(k);
    if (lr == kNegInf) return;
    if (lr >= 0.0 || std::log(u01(rng_)) < lr) {
      Change ch;
      ch.removed = static_cast<long>(k);
      commit(ch);
      ++acc_[1];
    }
  } else {
    ++prop_[2];
    if (pts_.empty()) return;
    std::uniform_int_distribution<std::size_t> pick(0, pts_.size() - 1);
    std::normal_distribution<double> gauss(0.0, sigma_);
    const std::size_t k = pick(rng_);
    const double nx = pts_[k].x + gauss(rng_);
    const double ny = pts_[k].y + gauss(rng_);
    const double lr = log_ratio_move(k, nx, ny);
    if (lr == kNegInf) return;
    if (lr >= 0.0 || std::log(u01(rng_)) < lr) {
      Change ch;
      ch.removed = static_cast<long>(k);
      ch.has_added = true;
      ch.added = {nx, ny, pts_[k].r};
      commit(ch);
      ++acc_[2];
    }
  }
}

void Chain::sweep() {
  const long n = win_.count();
  for (long k = 0; k < n; ++k) step();
}

std::pair<long, long> Chain::counts(MoveKind k) const {
  const int i = static_cast<int>(k);
  return {acc_[i], prop_[i]};
}

void Chain::reset_counts() {
  for (int i = 0; i < 3; ++i) acc_[i] = prop_[i] = 0;
}

Trace run_chain(const QuermassParams& p, const Tiling& tiling, const TileWindow& window,
                const BoundaryCondition& bc, long sweeps, std::uint64_t seed,
                const SamplerOptions& opt) {
  if (sweeps < 1) throw ConfigError("sweeps must be >= 1");
  if (opt.thin < 1) throw ConfigError("thinning must be >= 1");
  Chain chain(p, tiling, window, bc, seed, opt);
  Trace tr;
  tr.area = chain.area();
  tr.bulk_area = chain.bulk_area();
  const bool wired = bc.kind == BoundaryCondition::Kind::SpinWired;
  auto check = [&]() {
    if (opt.check_constraint && wired && !chain.constraint_ok()) {
      ++tr.constraint_violations;
      throw std::logic_error("boundary spin constraint violated");
    }
  };
  for (long s = 0; s < opt.burn_in; ++s) {
    chain.sweep();
    check();
  }
  chain.reset_counts();
  auto rate = [&](MoveKind k) {
    auto [a, n] = chain.counts(k);
    return n > 0 ? static_cast<double>(a) / static_cast<double>(n) : 0.0;
  };
  for (long s = 1; s <= sweeps; ++s) {
    chain.sweep();
    check();
    if (opt.validate_every > 0 && s % opt.validate_every == 0 && p.beta > 0.0) {
      const double err = std::abs(chain.energy() - chain.energy_from_scratch());
      tr.max_validation_error = std::max(tr.max_validation_error, err);
      if (err > 1e-7) throw std::logic_error("cached energy drifted from recomputation");
    }
    if (s % opt.thin == 0) {
      TraceRecord r;
      r.sweep = s;
      r.n = chain.size();
      r.n_bulk = chain.bulk_size();
      r.h = opt.record_energy ? chain.energy() : std::numeric_limits<double>::quiet_NaN();
      r.acc_birth = rate(MoveKind::Birth);
      r.acc_death = rate(MoveKind::Death);
      r.acc_move = rate(MoveKind::Move);
      tr.records.push_back(r);
      chain.reset_counts();
    }
    if (opt.snapshot_every > 0 && s % opt.snapshot_every == 0)
      tr.snapshots.push_back(chain.config());
  }
  return tr;
}

Estimate batch_means(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  const std::size_t nb = std::min<std::size_t>(20, n);
  if (nb < 10) throw InsufficientSamples("fewer than 10 batches available");
  const std::size_t bs = n / nb;
  const std::size_t off = n - nb * bs;
  std::vector<double> means(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    double s = 0.0;
    for (std::size_t k = 0; k < bs; ++k) s += xs[off + b * bs + k];
    means[b] = s / static_cast<double>(bs);
  }
  double m = 0.0;
  for (double v : means) m += v;
  m /= static_cast<double>(nb);
  double var = 0.0;
  for (double v : means) var += (v - m) * (v - m);
  var /= static_cast<double>(nb - 1);
  return {m, std::sqrt(var / static_cast<double>(nb)), static_cast<long>(nb)};
}

Estimate estimate_density(const Trace& trace) {
  std::vector<double> xs;
  xs.reserve(trace.records.size());
  for (const auto& r : trace.records) xs.push_back(static_cast<double>(r.n) / trace.area);
  return batch_means(xs);
}

Estimate estimate_bulk_density(const Trace& trace) {
  if (!(trace.bulk_area > 0.0)) throw InsufficientSamples("no unconstrained tiles in the window");
  std::vector<double> xs;
  xs.reserve(trace.records.size());
  for (const auto& r : trace.records) xs.push_back(static_cast<double>(r.n_bulk) / trace.bulk_area);
  return batch_means(xs);
}

Estimate estimate_mean_n(const Trace& trace) {
  std::vector<double> xs;
  xs.reserve(trace.records.size());
  for (const auto& r : trace.records) xs.push_back(static_cast<double>(r.n));
  return batch_means(xs);
}

Estimate estimate_mean_energy(const Trace& trace) {
  std::vector<double> xs;
  xs.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    if (std::isnan(r.h)) throw InsufficientSamples("trace was recorded without energies");
    xs.push_back(r.h);
  }
  return batch_means(xs);
}

}  // namespace quermass
