// Pixel approximation of the three functionals. It shares nothing with the
// arc arrangement except the disk list, so it works as an independent check.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "quermass/geometry.hpp"
#include "quermass/simd.hpp"

namespace quermass {

namespace {

struct Run {
  long row, a, b;  // inclusive column range
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t v) {
    while (parent_[v] != v) v = parent_[v] = parent_[parent_[v]];
    return v;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

// Components of a run set; `diag` selects 8- instead of 4-connectivity.
// Returns component id per run.
std::vector<std::size_t> label_runs(const std::vector<std::vector<Run>>& rows, bool diag,
                                    std::vector<const Run*>& flat) {
  flat.clear();
  std::vector<std::size_t> first(rows.size() + 1, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    first[r] = flat.size();
    for (const auto& run : rows[r]) flat.push_back(&run);
  }
  first[rows.size()] = flat.size();
  UnionFind uf(flat.size());
  const long slack = diag ? 1 : 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::size_t p = first[r - 1], q = first[r];
    while (p < first[r] && q < first[r + 1]) {
      const Run& up = *flat[p];
      const Run& dn = *flat[q];
      if (dn.a <= up.b + slack && up.a <= dn.b + slack) uf.unite(p, q);
      if (up.b < dn.b) ++p;
      else ++q;
    }
  }
  std::vector<std::size_t> lab(flat.size());
  for (std::size_t k = 0; k < flat.size(); ++k) lab[k] = uf.find(k);
  return lab;
}

}  // namespace

MinkowskiValues raster_oracle(const DiskUnion& u, double pixel) {
  MinkowskiValues mv;
  if (u.empty()) return mv;
  if (!(pixel > 0.0)) throw GeometryError("pixel size must be positive");
  double xmin = u[0].x - u[0].r, xmax = u[0].x + u[0].r;
  double ymin = u[0].y - u[0].r, ymax = u[0].y + u[0].r;
  for (const auto& d : u) {
    if (!(d.r > 0.0)) throw GeometryError("disk with non-positive radius");
    xmin = std::min(xmin, d.x - d.r);
    xmax = std::max(xmax, d.x + d.r);
    ymin = std::min(ymin, d.y - d.r);
    ymax = std::max(ymax, d.y + d.r);
  }
  xmin -= 2 * pixel;
  ymin -= 2 * pixel;
  const long ncol = static_cast<long>(std::ceil((xmax - xmin) / pixel)) + 3;
  const long nrow = static_cast<long>(std::ceil((ymax - ymin) / pixel)) + 3;
  if (static_cast<double>(ncol) * static_cast<double>(nrow) > 4e8)
    throw GeometryError("raster too fine for this configuration");

  const simd::DiskSoA soa(u);
  const auto& kern = simd::active();
  const std::size_t n = soa.size();
  std::vector<double> lo(n), hi(n);
  std::vector<std::uint8_t> valid(n);
  std::vector<std::pair<long, long>> spans;

  std::vector<std::vector<Run>> in_rows(nrow), out_rows(nrow);
  std::vector<bool> bitmap(static_cast<std::size_t>(ncol * nrow), false);
  long count = 0;
  for (long row = 0; row < nrow; ++row) {
    const double yl = ymin + (row + 0.5) * pixel;
    kern.scanline_spans(soa.x.data(), soa.y.data(), soa.r.data(), n, yl, lo.data(), hi.data(),
                        valid.data());
    spans.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (!valid[k]) continue;
      const long a = static_cast<long>(std::ceil((lo[k] - xmin) / pixel - 0.5));
      const long b = static_cast<long>(std::floor((hi[k] - xmin) / pixel - 0.5));
      if (a <= b) spans.emplace_back(std::max(a, 0L), std::min(b, ncol - 1));
    }
    std::sort(spans.begin(), spans.end());
    for (const auto& [a, b] : spans) {
      if (!in_rows[row].empty() && a <= in_rows[row].back().b + 1)
        in_rows[row].back().b = std::max(in_rows[row].back().b, b);
      else
        in_rows[row].push_back({row, a, b});
    }
    long prev = 0;
    for (const auto& run : in_rows[row]) {
      count += run.b - run.a + 1;
      for (long c = run.a; c <= run.b; ++c) bitmap[static_cast<std::size_t>(row * ncol + c)] = true;
      if (run.a > prev) out_rows[row].push_back({row, prev, run.a - 1});
      prev = run.b + 1;
    }
    if (prev < ncol) out_rows[row].push_back({row, prev, ncol - 1});
  }
  mv.volume = static_cast<double>(count) * pixel * pixel;

  std::vector<const Run*> flat;
  {
    auto lab = label_runs(in_rows, false, flat);
    std::sort(lab.begin(), lab.end());
    mv.euler += std::unique(lab.begin(), lab.end()) - lab.begin();
  }
  {
    auto lab = label_runs(out_rows, true, flat);
    std::vector<bool> touches(lab.size(), false);
    for (std::size_t k = 0; k < flat.size(); ++k) {
      const Run& r = *flat[k];
      if (r.row == 0 || r.row == nrow - 1 || r.a == 0 || r.b == ncol - 1) touches[lab[k]] = true;
    }
    std::vector<std::size_t> bounded;
    for (std::size_t k = 0; k < lab.size(); ++k)
      if (!touches[lab[k]]) bounded.push_back(lab[k]);
    std::sort(bounded.begin(), bounded.end());
    mv.euler -= std::unique(bounded.begin(), bounded.end()) - bounded.begin();
  }

  // Marching squares on cells whose corner pixels disagree.
  auto f = [&](long c, long r) {
    return kern.max_signed_distance(soa.x.data(), soa.y.data(), soa.r.data(), n,
                                    xmin + (c + 0.5) * pixel, ymin + (r + 0.5) * pixel);
  };
  auto at = [&](long c, long r) { return bool(bitmap[static_cast<std::size_t>(r * ncol + c)]); };
  double perim = 0.0;
  for (long r = 0; r + 1 < nrow; ++r) {
    for (long c = 0; c + 1 < ncol; ++c) {
      const bool b0 = at(c, r), b1 = at(c + 1, r), b2 = at(c + 1, r + 1), b3 = at(c, r + 1);
      if (b0 == b1 && b1 == b2 && b2 == b3) continue;
      const double v[4] = {f(c, r), f(c + 1, r), f(c + 1, r + 1), f(c, r + 1)};
      const double px[4] = {0, 1, 1, 0}, py[4] = {0, 0, 1, 1};
      double ex[4], ey[4];
      bool cut[4];
      for (int e = 0; e < 4; ++e) {
        const int g = (e + 1) % 4;
        cut[e] = (v[e] >= 0.0) != (v[g] >= 0.0);
        if (cut[e]) {
          const double t = v[e] / (v[e] - v[g]);
          ex[e] = px[e] + t * (px[g] - px[e]);
          ey[e] = py[e] + t * (py[g] - py[e]);
        }
      }
      auto seg = [&](int a, int b) { perim += std::hypot(ex[a] - ex[b], ey[a] - ey[b]) * pixel; };
      const int ncut = cut[0] + cut[1] + cut[2] + cut[3];
      if (ncut == 2) {
        int a = -1, b = -1;
        for (int e = 0; e < 4; ++e)
          if (cut[e]) (a < 0 ? a : b) = e;
        seg(a, b);
      } else if (ncut == 4) {
        const bool centre_in = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= 0.0;
        const bool diag02 = v[0] >= 0.0;
        if (centre_in == diag02) {
          seg(0, 1);
          seg(2, 3);
        } else {
          seg(3, 0);
          seg(1, 2);
        }
      }
    }
  }
  mv.surface = perim;
  return mv;
}

}  // namespace quermass
