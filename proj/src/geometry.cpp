#include "quermass/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "quermass/simd.hpp"

namespace quermass {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double clamp_unit(double c) { return c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c); }

void check_radii(const DiskUnion& u) {
  for (const auto& d : u) {
    if (!(d.r > 0.0) || !std::isfinite(d.x) || !std::isfinite(d.y) || !std::isfinite(d.r))
      throw GeometryError("disk with non-positive radius or non-finite coordinates");
  }
}

struct Cover {
  enum Kind { None, Full, Arc } kind = None;
  double s = 0.0, e = 0.0;
};

// Part of circle `ci` lying in the closed disk `dj`.
Cover circle_cover(const Disk& ci, const Disk& dj, double eps) {
  const double dx = dj.x - ci.x;
  const double dy = dj.y - ci.y;
  const double d2 = dx * dx + dy * dy;
  Cover c;
  if (d2 <= eps) {
    c.kind = dj.r > ci.r ? Cover::Full : Cover::None;
    return c;
  }
  const double sum = ci.r + dj.r;
  const double ext = d2 - sum * sum;
  if (ext > eps) return c;
  const double phi = std::atan2(dy, dx);
  if (ext >= -eps) {  // external tangency: one shared point
    c.kind = Cover::Arc;
    c.s = c.e = phi;
    return c;
  }
  const double dif = ci.r - dj.r;
  const double inn = d2 - dif * dif;
  if (inn < -eps) {
    c.kind = dj.r > ci.r ? Cover::Full : Cover::None;
    return c;
  }
  if (inn <= eps) {  // internal tangency
    if (dj.r > ci.r) {
      c.kind = Cover::Full;
    } else {
      c.kind = Cover::Arc;
      c.s = c.e = phi;
    }
    return c;
  }
  const double d = std::sqrt(d2);
  const double cosh = clamp_unit((ci.r * ci.r + d2 - dj.r * dj.r) / (2.0 * ci.r * d));
  const double h = std::acos(cosh);
  c.kind = Cover::Arc;
  c.s = phi - h;
  c.e = phi + h;
  return c;
}

struct Interval {
  double s, e;
  int by;
};

struct Component {
  double s, e;
  int sby, eby;
};

// Uncovered arcs of circle `i` given the coverage intervals of the others.
void arcs_of_circle(std::size_t i, std::vector<Interval>& ivs, std::vector<BoundaryArc>& out) {
  if (ivs.empty()) {
    out.push_back({i, 0.0, kTwoPi, +1, -1, -1});
    return;
  }
  for (auto& iv : ivs) {
    const double w = iv.e - iv.s;
    double s = std::fmod(iv.s, kTwoPi);
    if (s < 0.0) s += kTwoPi;
    if (s >= kTwoPi) s -= kTwoPi;
    iv.s = s;
    iv.e = s + w;
  }
  std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) {
    if (a.s != b.s) return a.s < b.s;
    if (a.e != b.e) return a.e > b.e;
    return a.by < b.by;
  });
  std::vector<Component> comps;
  comps.reserve(ivs.size());
  for (const auto& iv : ivs) {
    if (!comps.empty() && iv.s <= comps.back().e) {
      if (iv.e > comps.back().e) {
        comps.back().e = iv.e;
        comps.back().eby = iv.by;
      }
    } else {
      comps.push_back({iv.s, iv.e, iv.by, iv.by});
    }
  }
  while (comps.size() > 1 && comps.back().e >= comps.front().s + kTwoPi) {
    const double wrapped = comps.front().e + kTwoPi;
    if (wrapped > comps.back().e) {
      comps.back().e = wrapped;
      comps.back().eby = comps.front().eby;
    }
    comps.erase(comps.begin());
  }
  if (comps.size() == 1 && comps[0].e - comps[0].s >= kTwoPi) return;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const bool last = k + 1 == comps.size();
    const Component& nx = last ? comps[0] : comps[k + 1];
    const double end = last ? nx.s + kTwoPi : nx.s;
    out.push_back({i, comps[k].e, end, +1, comps[k].eby, nx.sby});
  }
}

// Uncovered arcs of all circles of a canonical union (sorted by x).
std::vector<BoundaryArc> arrangement(const DiskUnion& c, const GeometryOptions& opt) {
  std::vector<BoundaryArc> arcs;
  if (c.empty()) return arcs;
  const simd::DiskSoA soa(c);
  double rmax = 0.0;
  for (const auto& d : c) rmax = std::max(rmax, d.r);
  const auto& kern = simd::active();
  std::vector<std::uint8_t> mask;
  std::vector<Interval> ivs;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Disk& di = c[i];
    const double reach = di.r + rmax + 1e-9;
    auto lo = std::lower_bound(soa.x.begin(), soa.x.end(), di.x - reach) - soa.x.begin();
    auto hi = std::upper_bound(soa.x.begin(), soa.x.end(), di.x + reach) - soa.x.begin();
    const std::size_t n = static_cast<std::size_t>(hi - lo);
    mask.assign(n, 0);
    kern.near_mask(soa.x.data() + lo, soa.y.data() + lo, soa.r.data() + lo, n, di.x, di.y, di.r,
                   opt.coincidence_eps, mask.data());
    ivs.clear();
    bool full = false;
    for (std::size_t k = 0; k < n && !full; ++k) {
      const std::size_t j = static_cast<std::size_t>(lo) + k;
      if (j == i || !mask[k]) continue;
      Cover cv = circle_cover(di, c[j], opt.coincidence_eps);
      if (cv.kind == Cover::Full) full = true;
      if (cv.kind == Cover::Arc) ivs.push_back({cv.s, cv.e, static_cast<int>(j)});
    }
    if (!full) arcs_of_circle(i, ivs, arcs);
  }
  return arcs;
}

// Twice the signed area swept by the arc relative to the origin (ox, oy).
double green_arc(const Disk& d, double a, double b, double ox, double oy) {
  const double cx = d.x - ox;
  const double cy = d.y - oy;
  return d.r * d.r * (b - a) + d.r * cx * (std::sin(b) - std::sin(a)) -
         d.r * cy * (std::cos(b) - std::cos(a));
}

// Turning angle at a concave vertex where circle `d` (at angle b) hands
// over to circle `n`.
double vertex_turn(const Disk& d, double b, const Disk& n) {
  const double px = d.x + d.r * std::cos(b);
  const double py = d.y + d.r * std::sin(b);
  const double ux = (px - n.x) / n.r;
  const double uy = (py - n.y) / n.r;
  const double dot = std::sin(b) * uy + std::cos(b) * ux;
  return -std::acos(clamp_unit(dot));
}

}  // namespace

double BoundaryArcs::total_length() const {
  double s = 0.0;
  for (const auto& a : arcs) s += disks[a.disk].r * (a.end - a.start);
  return s;
}

DiskUnion canonicalize(const DiskUnion& u, const GeometryOptions& opt) {
  check_radii(u);
  DiskUnion c = u;
  std::sort(c.begin(), c.end(), [](const Disk& a, const Disk& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.r < b.r;
  });
  DiskUnion out;
  out.reserve(c.size());
  const double tol = std::sqrt(opt.coincidence_eps);
  for (const auto& d : c) {
    bool dup = false;
    for (std::size_t k = out.size(); k-- > 0;) {
      if (d.x - out[k].x > tol) break;
      const double dx = d.x - out[k].x;
      const double dy = d.y - out[k].y;
      const double dr = d.r - out[k].r;
      if (dx * dx + dy * dy <= opt.coincidence_eps && dr * dr <= opt.coincidence_eps) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(d);
  }
  return out;
}

BoundaryArcs boundary_arcs(const DiskUnion& u, const GeometryOptions& opt) {
  BoundaryArcs res;
  res.disks = canonicalize(u, opt);
  res.arcs = arrangement(res.disks, opt);
  return res;
}

MinkowskiValues minkowski_functionals(const DiskUnion& u, const GeometryOptions& opt) {
  const BoundaryArcs ba = boundary_arcs(u, opt);
  MinkowskiValues mv;
  if (ba.disks.empty()) return mv;
  const Disk& ref = ba.disks.front();
  double area2 = 0.0, turn = 0.0, len = 0.0;
  for (const auto& a : ba.arcs) {
    const Disk& d = ba.disks[a.disk];
    len += d.r * (a.end - a.start);
    area2 += green_arc(d, a.start, a.end, ref.x, ref.y);
    turn += a.end - a.start;
    if (a.end_neighbor >= 0) turn += vertex_turn(d, a.end, ba.disks[a.end_neighbor]);
  }
  mv.volume = 0.5 * area2;
  mv.surface = len;
  mv.euler = std::lround(turn / kTwoPi);
  return mv;
}

TileBox tile_box(TileIndex t, double delta) {
  const double cx = static_cast<double>(t.i) * delta;
  const double cy = static_cast<double>(t.j) * delta;
  return {cx - 0.5 * delta, cy - 0.5 * delta, cx + 0.5 * delta, cy + 0.5 * delta};
}

TileIndex tile_of(double x, double y, double delta) {
  return {static_cast<long>(std::floor(x / delta + 0.5)),
          static_cast<long>(std::floor(y / delta + 0.5))};
}

bool disk_meets_box(const Disk& d, const TileBox& b) {
  const double qx = std::clamp(d.x, b.x0, b.x1);
  const double qy = std::clamp(d.y, b.y0, b.y1);
  const double dx = d.x - qx;
  const double dy = d.y - qy;
  return dx * dx + dy * dy <= d.r * d.r;
}

bool box_inside_disk(const TileBox& b, const Disk& d) {
  const double fx = std::max(std::abs(b.x0 - d.x), std::abs(b.x1 - d.x));
  const double fy = std::max(std::abs(b.y0 - d.y), std::abs(b.y1 - d.y));
  return fx * fx + fy * fy <= d.r * d.r;
}

TileRange tiles_meeting(const DiskUnion& u, double delta) {
  TileRange tr;
  if (u.empty()) return tr;
  double xmin = u[0].x - u[0].r, xmax = u[0].x + u[0].r;
  double ymin = u[0].y - u[0].r, ymax = u[0].y + u[0].r;
  for (const auto& d : u) {
    xmin = std::min(xmin, d.x - d.r);
    xmax = std::max(xmax, d.x + d.r);
    ymin = std::min(ymin, d.y - d.r);
    ymax = std::max(ymax, d.y + d.r);
  }
  tr.i0 = static_cast<long>(std::ceil(xmin / delta - 0.5)) - 1;
  tr.i1 = static_cast<long>(std::floor(xmax / delta + 0.5)) + 1;
  tr.j0 = static_cast<long>(std::ceil(ymin / delta - 0.5)) - 1;
  tr.j1 = static_cast<long>(std::floor(ymax / delta + 0.5)) + 1;
  return tr;
}

namespace {

// Boundary lines of the closed tile in counter-clockwise order.
enum Edge { Bottom = 0, Right = 1, Top = 2, Left = 3 };
constexpr double kEdgeDir[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

struct Break {
  double t;
  int edge;
};

// 0 = arc endpoint (start/end of the uncovered arc), 1 = crosses the tile boundary
struct PieceEnd {
  bool crossing = false;
  int edge = -1;
};

bool inside_box(double x, double y, const TileBox& b) {
  return x >= b.x0 && x <= b.x1 && y >= b.y0 && y <= b.y1;
}

void collect_breaks(const Disk& d, const TileBox& b, std::vector<Break>& br) {
  br.clear();
  auto vertical = [&](double X, int edge) {
    const double u = (X - d.x) / d.r;
    if (std::abs(u) < 1.0) {
      const double t = std::acos(u);
      br.push_back({t, edge});
      br.push_back({-t, edge});
    }
  };
  auto horizontal = [&](double Y, int edge) {
    const double v = (Y - d.y) / d.r;
    if (std::abs(v) < 1.0) {
      const double t = std::asin(v);
      br.push_back({t, edge});
      br.push_back({kPi - t, edge});
    }
  };
  horizontal(b.y0, Bottom);
  vertical(b.x1, Right);
  horizontal(b.y1, Top);
  vertical(b.x0, Left);
}

double wrap_into(double t, double a) { return t - kTwoPi * std::floor((t - a) / kTwoPi); }

struct ClipAccum {
  double area2 = 0.0;
  double length = 0.0;
  double turn = 0.0;
};

void add_piece(const Disk& d, double u, double v, PieceEnd su, PieceEnd ev, int end_neighbor,
               const DiskUnion& disks, double ox, double oy, ClipAccum& acc) {
  acc.length += d.r * (v - u);
  acc.turn += v - u;
  acc.area2 += green_arc(d, u, v, ox, oy);
  if (su.crossing) {
    const double tx = -std::sin(u), ty = std::cos(u);
    const double dot = kEdgeDir[su.edge][0] * tx + kEdgeDir[su.edge][1] * ty;
    acc.turn += std::acos(clamp_unit(dot));
  }
  if (ev.crossing) {
    const double tx = -std::sin(v), ty = std::cos(v);
    const double dot = kEdgeDir[ev.edge][0] * tx + kEdgeDir[ev.edge][1] * ty;
    acc.turn += std::acos(clamp_unit(dot));
  } else if (end_neighbor >= 0) {
    acc.turn += vertex_turn(d, v, disks[end_neighbor]);
  }
}

void clip_arc(const DiskUnion& disks, const BoundaryArc& arc, const TileBox& b, double ox,
              double oy, std::vector<Break>& br, ClipAccum& acc) {
  const Disk& d = disks[arc.disk];
  if (d.x + d.r < b.x0 || d.x - d.r > b.x1 || d.y + d.r < b.y0 || d.y - d.r > b.y1) return;
  collect_breaks(d, b, br);
  double a = arc.start, e = arc.end;
  PieceEnd first_end, last_end;
  int end_neighbor = arc.end_neighbor;
  if (arc.start_neighbor < 0 && arc.end_neighbor < 0) {
    if (br.empty()) {
      const double mx = d.x + d.r, my = d.y;
      if (inside_box(mx, my, b)) add_piece(d, 0.0, kTwoPi, {}, {}, -1, disks, ox, oy, acc);
      return;
    }
    auto it = std::min_element(br.begin(), br.end(),
                               [](const Break& p, const Break& q) { return p.t < q.t; });
    a = it->t;
    e = a + kTwoPi;
    first_end = {true, it->edge};
    last_end = {true, it->edge};
    end_neighbor = -1;
  }
  std::vector<Break> inner;
  inner.reserve(br.size());
  for (const auto& p : br) {
    const double t = wrap_into(p.t, a);
    if (t > a && t < e) inner.push_back({t, p.edge});
  }
  std::sort(inner.begin(), inner.end(), [](const Break& p, const Break& q) { return p.t < q.t; });
  double u = a;
  PieceEnd su = first_end;
  for (std::size_t k = 0; k <= inner.size(); ++k) {
    const bool last = k == inner.size();
    const double v = last ? e : inner[k].t;
    const PieceEnd ev = last ? last_end : PieceEnd{true, inner[k].edge};
    const double m = 0.5 * (u + v);
    if (inside_box(d.x + d.r * std::cos(m), d.y + d.r * std::sin(m), b))
      add_piece(d, u, v, su, ev, last ? end_neighbor : -1, disks, ox, oy, acc);
    u = v;
    su = ev;
  }
}

struct EdgeCover {
  int pieces = 0;
  double area2 = 0.0;
};

EdgeCover cover_edge(const DiskUnion& disks, double px, double py, double qx, double qy,
                     double ox, double oy) {
  const double len = std::hypot(qx - px, qy - py);
  const double ux = (qx - px) / len, uy = (qy - py) / len;
  std::vector<std::pair<double, double>> iv;
  for (const auto& d : disks) {
    const double wx = d.x - px, wy = d.y - py;
    const double sc = wx * ux + wy * uy;
    const double perp = ux * wy - uy * wx;
    const double h2 = d.r * d.r - perp * perp;
    if (h2 < 0.0) continue;
    const double h = std::sqrt(h2);
    const double lo = std::max(0.0, sc - h);
    const double hi = std::min(len, sc + h);
    if (lo > hi) continue;
    iv.emplace_back(lo, hi);
  }
  EdgeCover ec;
  if (iv.empty()) return ec;
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& p : iv) {
    if (!merged.empty() && p.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, p.second);
    else
      merged.push_back(p);
  }
  ec.pieces = static_cast<int>(merged.size());
  for (const auto& [s1, s2] : merged) {
    const double ax = px + s1 * ux - ox, ay = py + s1 * uy - oy;
    const double bx = px + s2 * ux - ox, by = py + s2 * uy - oy;
    ec.area2 += ax * by - ay * bx;
  }
  return ec;
}

}  // namespace

MinkowskiValues tile_functionals_local(const DiskUnion& local_in, TileIndex tile, double delta,
                                       const GeometryOptions& opt) {
  const TileBox b = tile_box(tile, delta);
  DiskUnion local;
  local.reserve(local_in.size());
  for (const auto& d : local_in)
    if (disk_meets_box(d, b)) local.push_back(d);
  MinkowskiValues mv;
  if (local.empty()) return mv;
  for (const auto& d : local) {
    if (box_inside_disk(b, d)) {
      mv.volume = delta * delta;
      return mv;
    }
  }
  const DiskUnion disks = canonicalize(local, opt);
  const std::vector<BoundaryArc> arcs = arrangement(disks, opt);
  const double ox = 0.5 * (b.x0 + b.x1), oy = 0.5 * (b.y0 + b.y1);
  ClipAccum acc;
  std::vector<Break> br;
  for (const auto& a : arcs) clip_arc(disks, a, b, ox, oy, br, acc);

  const double cx[4] = {b.x0, b.x1, b.x1, b.x0};
  const double cy[4] = {b.y0, b.y0, b.y1, b.y1};
  int edge_pieces[4];
  for (int e = 0; e < 4; ++e) {
    const int f = (e + 1) % 4;
    EdgeCover ec = cover_edge(disks, cx[e], cy[e], cx[f], cy[f], ox, oy);
    edge_pieces[e] = ec.pieces;
    acc.area2 += ec.area2;
  }
  const simd::DiskSoA soa(disks);
  const auto& kern = simd::active();
  bool corner[4];
  for (int k = 0; k < 4; ++k) {
    corner[k] = kern.any_contains(soa.x.data(), soa.y.data(), soa.r.data(), soa.size(), cx[k],
                                  cy[k]);
    if (corner[k]) acc.turn += 0.5 * kPi;
  }
  const long chi_closed = std::lround(acc.turn / kTwoPi);
  mv.volume = 0.5 * acc.area2;
  mv.surface = acc.length;
  // Owned facets: the closed tile, its bottom and left edges, and its
  // bottom-left corner (the lexicographically smallest point of each).
  mv.euler = chi_closed - edge_pieces[Bottom] - edge_pieces[Left] + (corner[0] ? 1 : 0);
  return mv;
}

MinkowskiValues tile_functionals(const DiskUnion& u, TileIndex tile, double delta,
                                 const GeometryOptions& opt) {
  if (!(delta > 0.0)) throw GeometryError("tile side must be positive");
  check_radii(u);
  const TileBox b = tile_box(tile, delta);
  DiskUnion local;
  for (const auto& d : u)
    if (disk_meets_box(d, b)) local.push_back(d);
  return tile_functionals_local(local, tile, delta, opt);
}

void write_config(std::ostream& os, const DiskUnion& u) {
  os << "# quermass-config d=2\n";
  char buf[128];
  for (const auto& d : u) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", d.x, d.y, d.r);
    os << buf;
  }
}

DiskUnion read_config(std::istream& is) {
  DiskUnion u;
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("quermass-config") != std::string::npos) {
        if (line.find("d=2") == std::string::npos)
          throw GeometryError("only d=2 configurations are supported");
        header = true;
      }
      continue;
    }
    std::istringstream ls(line);
    Disk d;
    if (!(ls >> d.x >> d.y >> d.r))
      throw GeometryError("malformed disk on line " + std::to_string(lineno));
    u.push_back(d);
  }
  if (!header) throw GeometryError("missing '# quermass-config d=2' header");
  return u;
}

}  // namespace quermass
