#include "quermass/contours.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace quermass {

namespace {

long isqrt(long v) {
  if (v < 0) return -1;
  long r = static_cast<long>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

// Half-width of the ball row at vertical offset dy.
long row_half_width(long radius, long dy, CorrectnessNorm norm) {
  if (std::abs(dy) > radius) return -1;
  return norm == CorrectnessNorm::Sup ? radius : isqrt(radius * radius - dy * dy);
}

TileWindow grow(const TileWindow& w, long k) { return {w.i0 - k, w.j0 - k, w.i1 + k, w.j1 + k}; }

// Dense grid of small integers over a block of tiles.
template <class T>
struct Grid {
  TileWindow w;
  std::vector<T> v;
  Grid(const TileWindow& win, T fill) : w(win), v(static_cast<std::size_t>(win.count()), fill) {}
  bool in(long i, long j) const { return i >= w.i0 && i <= w.i1 && j >= w.j0 && j <= w.j1; }
  std::size_t idx(long i, long j) const {
    return static_cast<std::size_t>((j - w.j0) * w.width() + (i - w.i0));
  }
  T& operator()(long i, long j) { return v[idx(i, j)]; }
  const T& operator()(long i, long j) const { return v[idx(i, j)]; }
};

// Labels the 8-connected components of the cells where `member` holds;
// returns the component count. Unvisited cells keep -1.
template <class Pred>
int label_components(const TileWindow& w, Pred member, std::vector<int>& comp) {
  comp.assign(static_cast<std::size_t>(w.count()), -1);
  const long W = w.width();
  int n = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s0 = 0; s0 < comp.size(); ++s0) {
    if (comp[s0] >= 0 || !member(s0)) continue;
    comp[s0] = n;
    stack.assign(1, s0);
    while (!stack.empty()) {
      const std::size_t s = stack.back();
      stack.pop_back();
      const long x = static_cast<long>(s) % W, y = static_cast<long>(s) / W;
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          const long nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= W || ny >= w.height()) continue;
          const std::size_t t = static_cast<std::size_t>(ny * W + nx);
          if (comp[t] >= 0 || !member(t)) continue;
          comp[t] = n;
          stack.push_back(t);
        }
      }
    }
    ++n;
  }
  return n;
}

struct Offset {
  long dx, dy, d2;
};

std::vector<Offset> ball_offsets(long radius) {
  std::vector<Offset> out;
  for (long dy = -radius; dy <= radius; ++dy)
    for (long dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) out.push_back({dx, dy, dx * dx + dy * dy});
  std::sort(out.begin(), out.end(), [](const Offset& a, const Offset& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.dx != b.dx) return a.dx < b.dx;
    return a.dy < b.dy;
  });
  return out;
}

TileWindow bounding_box(const std::vector<TileIndex>& s) {
  TileWindow b{std::numeric_limits<long>::max(), std::numeric_limits<long>::max(),
               std::numeric_limits<long>::min(), std::numeric_limits<long>::min()};
  for (const auto& t : s) {
    b.i0 = std::min(b.i0, t.i);
    b.j0 = std::min(b.j0, t.j);
    b.i1 = std::max(b.i1, t.i);
    b.j1 = std::max(b.j1, t.j);
  }
  return b;
}

}  // namespace

long lattice_ball_size(double r, CorrectnessNorm norm) {
  if (r < 0.0) return 0;
  const long R = static_cast<long>(std::floor(r));
  if (norm == CorrectnessNorm::Sup) return (2 * R + 1) * (2 * R + 1);
  long n = 0;
  for (long dy = -R; dy <= R; ++dy) {
    // largest dx with dx^2 + dy^2 <= r^2
    long w = static_cast<long>(std::floor(std::sqrt(std::max(0.0, r * r - double(dy * dy)))));
    while (w >= 0 && double(w * w + dy * dy) > r * r) --w;
    while (double((w + 1) * (w + 1) + dy * dy) <= r * r) ++w;
    n += 2 * w + 1;
  }
  return n;
}

int SpinField::at(TileIndex t) const {
  if (!contains(t)) throw PaddingError("site outside the spin field");
  return spins[index(t)];
}

long Contour::count_spin(int s) const {
  return static_cast<long>(std::count(spins.begin(), spins.end(), static_cast<std::uint8_t>(s)));
}

SpinField spin_field(const Configuration& cfg, const Tiling& tiling, const TileWindow& domain) {
  if (!(tiling.delta > 0.0)) throw ContourError("tile side must be positive");
  SpinField f;
  f.domain = domain;
  f.spins.assign(static_cast<std::size_t>(std::max(0L, domain.count())), 0);
  for (const auto& d : cfg) {
    const TileIndex t = tile_of(d.x, d.y, tiling.delta);
    if (f.contains(t)) f.spins[f.index(t)] = 1;
  }
  return f;
}

SiteClass Classification::at(TileIndex t) const {
  if (!domain.contains(t)) throw PaddingError("site outside the classified domain");
  return classes[static_cast<std::size_t>((t.j - domain.j0) * domain.width() + (t.i - domain.i0))];
}

Classification classify_correctness(const SpinField& field, const Tiling& tiling,
                                    CorrectnessNorm norm) {
  const long L = tiling.L;
  if (L < 1) throw ContourError("correctness radius must be a positive integer");
  Classification c;
  c.domain = grow(field.domain, -L);
  if (c.domain.width() < 1 || c.domain.height() < 1)
    throw PaddingError("spin field too small for the correctness radius");
  const long W = field.domain.width(), Hh = field.domain.height();
  // Row prefix sums of the spins.
  std::vector<long> pre(static_cast<std::size_t>((W + 1) * Hh), 0);
  for (long y = 0; y < Hh; ++y)
    for (long x = 0; x < W; ++x)
      pre[static_cast<std::size_t>(y * (W + 1) + x + 1)] =
          pre[static_cast<std::size_t>(y * (W + 1) + x)] + field.spins[static_cast<std::size_t>(y * W + x)];
  std::vector<long> half(static_cast<std::size_t>(2 * L + 1));
  long ball = 0;
  for (long dy = -L; dy <= L; ++dy) {
    half[static_cast<std::size_t>(dy + L)] = row_half_width(L, dy, norm);
    ball += 2 * half[static_cast<std::size_t>(dy + L)] + 1;
  }
  c.classes.resize(static_cast<std::size_t>(c.domain.count()));
  std::size_t k = 0;
  for (long j = c.domain.j0; j <= c.domain.j1; ++j) {
    for (long i = c.domain.i0; i <= c.domain.i1; ++i, ++k) {
      const long x = i - field.domain.i0, y = j - field.domain.j0;
      long ones = 0;
      for (long dy = -L; dy <= L; ++dy) {
        const long w = half[static_cast<std::size_t>(dy + L)];
        const std::size_t row = static_cast<std::size_t>((y + dy) * (W + 1));
        ones += pre[row + static_cast<std::size_t>(x + w + 1)] - pre[row + static_cast<std::size_t>(x - w)];
      }
      c.classes[k] = ones == 0 ? SiteClass::ZeroCorrect
                               : (ones == ball ? SiteClass::OneCorrect : SiteClass::NonCorrect);
    }
  }
  return c;
}

std::vector<Contour> extract_contours(const SpinField& field, const Tiling& tiling,
                                      int exterior_spin, const ContourOptions& opt) {
  if (exterior_spin != 0 && exterior_spin != 1) throw ContourError("exterior spin must be 0 or 1");
  const long L = tiling.L;
  if (L < 1) throw ContourError("correctness radius must be a positive integer");
  // Pad so that every site within L + 2 of a non-correct site has a known
  // spin and every classified site's ball stays inside the padded field.
  const long pad = 2 * L + 3;
  SpinField padded;
  padded.domain = grow(field.domain, pad);
  padded.spins.assign(static_cast<std::size_t>(padded.domain.count()),
                      static_cast<std::uint8_t>(exterior_spin));
  for (long j = field.domain.j0; j <= field.domain.j1; ++j)
    for (long i = field.domain.i0; i <= field.domain.i1; ++i)
      padded.spins[padded.index({i, j})] = field.spins[field.index({i, j})];
  const Classification cls = classify_correctness(padded, tiling, opt.norm);

  std::vector<int> comp;
  const int ncomp = label_components(
      cls.domain, [&](std::size_t s) { return cls.classes[s] == SiteClass::NonCorrect; }, comp);
  std::vector<std::vector<TileIndex>> supports(static_cast<std::size_t>(ncomp));
  for (std::size_t s = 0; s < comp.size(); ++s) {
    if (comp[s] < 0) continue;
    const long W = cls.domain.width();
    supports[static_cast<std::size_t>(comp[s])].push_back(
        {cls.domain.i0 + static_cast<long>(s) % W, cls.domain.j0 + static_cast<long>(s) / W});
  }

  const std::vector<Offset> reach = ball_offsets(L + 1);
  std::vector<Contour> out;
  out.reserve(supports.size());
  for (auto& sup : supports) {
    std::sort(sup.begin(), sup.end());
    Contour g;
    g.support = sup;
    g.spins.reserve(sup.size());
    for (const auto& t : sup) g.spins.push_back(static_cast<std::uint8_t>(padded.at(t)));

    // Complementary components inside the support's box grown by L + 2;
    // everything touching the frame belongs to the unbounded one.
    const TileWindow R = grow(bounding_box(sup), L + 2);
    Grid<std::uint8_t> in_support(R, 0);
    for (const auto& t : sup) in_support(t.i, t.j) = 1;
    std::vector<int> cc;
    const int nc = label_components(R, [&](std::size_t s) { return in_support.v[s] == 0; }, cc);
    std::vector<int> remap(static_cast<std::size_t>(nc), -1);
    // component 0 is reserved for the exterior
    int next = 1;
    for (long j = R.j0; j <= R.j1; ++j) {
      for (long i = R.i0; i <= R.i1; ++i) {
        const int c0 = cc[in_support.idx(i, j)];
        if (c0 < 0) continue;
        const bool frame = i == R.i0 || i == R.i1 || j == R.j0 || j == R.j1;
        if (frame) remap[static_cast<std::size_t>(c0)] = 0;
      }
    }
    for (auto& m : remap)
      if (m < 0) m = next++;
    for (auto& c0 : cc)
      if (c0 >= 0) c0 = remap[static_cast<std::size_t>(c0)];

    // Votes of the spins on the interior and exterior boundary of each
    // component (Euclidean thresholds L + 1 and L).
    std::vector<std::array<long, 2>> votes(static_cast<std::size_t>(next), {0, 0});
    Grid<std::uint8_t> spin(R, 0);
    for (long j = R.j0; j <= R.j1; ++j)
      for (long i = R.i0; i <= R.i1; ++i) spin(i, j) = static_cast<std::uint8_t>(padded.at({i, j}));
    Grid<std::uint8_t> seen_int(R, 0);
    std::vector<std::vector<std::uint8_t>> seen_ext(static_cast<std::size_t>(next));
    for (auto& v : seen_ext) v.assign(static_cast<std::size_t>(R.count()), 0);
    for (long j = R.j0; j <= R.j1; ++j) {
      for (long i = R.i0; i <= R.i1; ++i) {
        const std::size_t sj = in_support.idx(i, j);
        const int cj = cc[sj];
        for (const auto& o : reach) {
          const long ai = i + o.dx, aj = j + o.dy;
          if (!in_support.in(ai, aj)) continue;
          const std::size_t sa = in_support.idx(ai, aj);
          const int ca = cc[sa];
          if (ca < 0 || ca == cj) continue;
          if (!seen_int.v[sa]) {
            seen_int.v[sa] = 1;
            ++votes[static_cast<std::size_t>(ca)][spin.v[sa]];
          }
          if (o.d2 <= L * L && !seen_ext[static_cast<std::size_t>(ca)][sj]) {
            seen_ext[static_cast<std::size_t>(ca)][sj] = 1;
            ++votes[static_cast<std::size_t>(ca)][spin.v[sj]];
          }
        }
      }
    }
    std::vector<int> label(static_cast<std::size_t>(next), exterior_spin);
    for (int a = 0; a < next; ++a) {
      const auto& v = votes[static_cast<std::size_t>(a)];
      if (v[0] > 0 && v[1] > 0 && opt.check_labels)
        throw LabelInconsistency("mixed spins on the boundary of a complementary component");
      label[static_cast<std::size_t>(a)] = v[1] > v[0] ? 1 : 0;
    }
    g.type = label[0];
    for (long j = R.j0; j <= R.j1; ++j) {
      for (long i = R.i0; i <= R.i1; ++i) {
        const int c0 = cc[in_support.idx(i, j)];
        if (c0 <= 0) continue;
        (label[static_cast<std::size_t>(c0)] ? g.int1 : g.int0).push_back({i, j});
      }
    }
    std::sort(g.int0.begin(), g.int0.end());
    std::sort(g.int1.begin(), g.int1.end());
    g.klass = static_cast<long>(g.int0.size() + g.int1.size());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(),
            [](const Contour& a, const Contour& b) { return a.support.front() < b.support.front(); });
  return out;
}

std::vector<Contour> contours_of(const Configuration& cfg, const Tiling& tiling,
                                 const ContourOptions& opt) {
  if (cfg.empty()) return {};
  std::vector<TileIndex> tiles;
  tiles.reserve(cfg.size());
  for (const auto& d : cfg) tiles.push_back(tile_of(d.x, d.y, tiling.delta));
  return extract_contours(spin_field(cfg, tiling, bounding_box(tiles)), tiling, 0, opt);
}

long sup_distance(const Contour& a, const Contour& b) {
  long best = std::numeric_limits<long>::max();
  const TileWindow bb = bounding_box(b.support);
  for (const auto& s : a.support) {
    // cheap lower bound from the other support's box
    const long bx = std::max({bb.i0 - s.i, 0L, s.i - bb.i1});
    const long by = std::max({bb.j0 - s.j, 0L, s.j - bb.j1});
    if (std::max(bx, by) >= best) continue;
    for (const auto& t : b.support)
      best = std::min(best, std::max(std::abs(s.i - t.i), std::abs(s.j - t.j)));
  }
  return best;
}

bool geometric_compatibility(const std::vector<Contour>& contours) {
  for (std::size_t a = 0; a < contours.size(); ++a) {
    for (std::size_t b = a + 1; b < contours.size(); ++b) {
      if (contours[a].type != contours[b].type) return false;
      if (sup_distance(contours[a], contours[b]) <= 1) return false;
    }
  }
  return true;
}

std::vector<Domino> domino_set(const Contour& contour, const Tiling& tiling) {
  const long L = tiling.L;
  if (contour.support.empty()) throw ContourError("empty contour");
  if (contour.count_spin(0) == 0 || contour.count_spin(1) == 0)
    throw ContourError("contour support must carry both spins");
  const TileWindow box = bounding_box(contour.support);
  Grid<std::int8_t> sp(box, -1);
  for (std::size_t k = 0; k < contour.support.size(); ++k)
    sp(contour.support[k].i, contour.support[k].j) = static_cast<std::int8_t>(contour.spins[k]);
  const std::vector<Offset> near = ball_offsets(L);
  const long excl = 16 * L * L;  // (4L)^2

  std::vector<TileIndex> picked;
  std::vector<Domino> out;
  for (std::size_t k = 0; k < contour.support.size(); ++k) {
    if (contour.spins[k] != 1) continue;
    const TileIndex s = contour.support[k];
    bool covered = false;
    for (const auto& q : picked) {
      const long dx = q.i - s.i, dy = q.j - s.j;
      if (dx * dx + dy * dy <= excl) {
        covered = true;
        break;
      }
    }
    if (covered) continue;
    const Offset* hit = nullptr;
    for (const auto& o : near) {
      const long i = s.i + o.dx, j = s.j + o.dy;
      if (sp.in(i, j) && sp(i, j) == 0) {
        hit = &o;
        break;
      }
    }
    if (!hit) throw ContourError("occupied support site without an empty site within L");
    const TileIndex e{s.i + hit->dx, s.j + hit->dy};
    const auto sgn = [](long v) { return (v > 0) - (v < 0); };
    const TileIndex o{e.i + sgn(s.i - e.i), e.j + sgn(s.j - e.j)};
    if (!sp.in(o.i, o.j) || sp(o.i, o.j) != 1)
      throw ContourError("domino partner is not an occupied support site");
    picked.push_back(s);
    out.push_back({o, e});
  }
  const long b5 = lattice_ball_size(static_cast<double>(5 * L));
  if (static_cast<long>(out.size()) * b5 < contour.size())
    throw ContourError("domino count below |support| / |B(0, 5L)|");
  return out;
}

std::string contours_to_json(const std::vector<Contour>& contours, int indent) {
  using nlohmann::json;
  auto sites = [](const std::vector<TileIndex>& v) {
    json a = json::array();
    for (const auto& t : v) a.push_back({t.i, t.j});
    return a;
  };
  json arr = json::array();
  for (const auto& g : contours) {
    json c;
    c["support"] = sites(g.support);
    c["spins"] = g.spins;
    c["type"] = g.type;
    c["int0"] = sites(g.int0);
    c["int1"] = sites(g.int1);
    c["class"] = g.klass;
    arr.push_back(std::move(c));
  }
  return json{{"contours", arr}}.dump(indent);
}

std::vector<Contour> contours_from_json(const std::string& text) {
  using nlohmann::json;
  std::vector<Contour> out;
  try {
    const json doc = json::parse(text);
    auto sites = [](const json& a) {
      std::vector<TileIndex> v;
      for (const auto& p : a) v.push_back({p.at(0).get<long>(), p.at(1).get<long>()});
      return v;
    };
    for (const auto& c : doc.at("contours")) {
      Contour g;
      g.support = sites(c.at("support"));
      g.spins = c.at("spins").get<std::vector<std::uint8_t>>();
      g.type = c.at("type").get<int>();
      g.int0 = sites(c.at("int0"));
      g.int1 = sites(c.at("int1"));
      g.klass = c.at("class").get<long>();
      if (g.spins.size() != g.support.size()) throw ContourError("spins and support differ in length");
      out.push_back(std::move(g));
    }
  } catch (const json::exception& e) {
    throw ContourError(std::string("malformed contour JSON: ") + e.what());
  }
  return out;
}

}  // namespace quermass
