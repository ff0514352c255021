#include <cmath>
#include <limits>

#include "quermass/simd.hpp"

namespace quermass::simd {

DiskSoA::DiskSoA(const DiskUnion& u) {
  x.reserve(u.size());
  y.reserve(u.size());
  r.reserve(u.size());
  for (const auto& d : u) push_back(d);
}

namespace {

void near_mask_scalar(const double* x, const double* y, const double* r, std::size_t n, double cx,
                      double cy, double cr, double eps, std::uint8_t* out) {
  for (std::size_t k = 0; k < n; ++k) {
    double dx = x[k] - cx;
    double dy = y[k] - cy;
    double d2 = dx * dx + dy * dy;
    double s = cr + r[k];
    out[k] = d2 <= s * s + eps ? 1 : 0;
  }
}

bool any_contains_scalar(const double* x, const double* y, const double* r, std::size_t n,
                         double px, double py) {
  for (std::size_t k = 0; k < n; ++k) {
    double dx = x[k] - px;
    double dy = y[k] - py;
    if (dx * dx + dy * dy <= r[k] * r[k]) return true;
  }
  return false;
}

double max_signed_distance_scalar(const double* x, const double* y, const double* r,
                                  std::size_t n, double px, double py) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    double dx = x[k] - px;
    double dy = y[k] - py;
    double v = r[k] - std::sqrt(dx * dx + dy * dy);
    best = v > best ? v : best;
  }
  return best;
}

void scanline_spans_scalar(const double* x, const double* y, const double* r, std::size_t n,
                           double yl, double* lo, double* hi, std::uint8_t* valid) {
  for (std::size_t k = 0; k < n; ++k) {
    double dy = yl - y[k];
    double w2 = r[k] * r[k] - dy * dy;
    bool ok = w2 >= 0.0;
    double w = std::sqrt(ok ? w2 : 0.0);
    lo[k] = x[k] - w;
    hi[k] = x[k] + w;
    valid[k] = ok ? 1 : 0;
  }
}

const Kernels kScalar{near_mask_scalar, any_contains_scalar, max_signed_distance_scalar,
                      scanline_spans_scalar};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace quermass::simd
