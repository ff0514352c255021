#include "quermass/simd.hpp"

#if defined(__ARM_NEON) && defined(__aarch64__)
#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace quermass::simd {
namespace {

void near_mask_neon(const double* x, const double* y, const double* r, std::size_t n, double cx,
                    double cy, double cr, double eps, std::uint8_t* out) {
  const float64x2_t vcx = vdupq_n_f64(cx);
  const float64x2_t vcy = vdupq_n_f64(cy);
  const float64x2_t vcr = vdupq_n_f64(cr);
  const float64x2_t veps = vdupq_n_f64(eps);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    float64x2_t dx = vsubq_f64(vld1q_f64(x + k), vcx);
    float64x2_t dy = vsubq_f64(vld1q_f64(y + k), vcy);
    float64x2_t d2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    float64x2_t s = vaddq_f64(vcr, vld1q_f64(r + k));
    uint64x2_t m = vcleq_f64(d2, vaddq_f64(vmulq_f64(s, s), veps));
    out[k] = vgetq_lane_u64(m, 0) ? 1 : 0;
    out[k + 1] = vgetq_lane_u64(m, 1) ? 1 : 0;
  }
  for (; k < n; ++k) {
    double dx = x[k] - cx;
    double dy = y[k] - cy;
    double d2 = dx * dx + dy * dy;
    double s = cr + r[k];
    out[k] = d2 <= s * s + eps ? 1 : 0;
  }
}

bool any_contains_neon(const double* x, const double* y, const double* r, std::size_t n,
                       double px, double py) {
  const float64x2_t vpx = vdupq_n_f64(px);
  const float64x2_t vpy = vdupq_n_f64(py);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    float64x2_t dx = vsubq_f64(vld1q_f64(x + k), vpx);
    float64x2_t dy = vsubq_f64(vld1q_f64(y + k), vpy);
    float64x2_t d2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    float64x2_t rr = vld1q_f64(r + k);
    uint64x2_t m = vcleq_f64(d2, vmulq_f64(rr, rr));
    if (vgetq_lane_u64(m, 0) | vgetq_lane_u64(m, 1)) return true;
  }
  for (; k < n; ++k) {
    double dx = x[k] - px;
    double dy = y[k] - py;
    if (dx * dx + dy * dy <= r[k] * r[k]) return true;
  }
  return false;
}

double max_signed_distance_neon(const double* x, const double* y, const double* r,
                                std::size_t n, double px, double py) {
  double best = -std::numeric_limits<double>::infinity();
  const float64x2_t vpx = vdupq_n_f64(px);
  const float64x2_t vpy = vdupq_n_f64(py);
  float64x2_t vbest = vdupq_n_f64(best);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    float64x2_t dx = vsubq_f64(vld1q_f64(x + k), vpx);
    float64x2_t dy = vsubq_f64(vld1q_f64(y + k), vpy);
    float64x2_t d = vsqrtq_f64(vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy)));
    vbest = vmaxq_f64(vbest, vsubq_f64(vld1q_f64(r + k), d));
  }
  double l0 = vgetq_lane_f64(vbest, 0);
  double l1 = vgetq_lane_f64(vbest, 1);
  best = l0 > best ? l0 : best;
  best = l1 > best ? l1 : best;
  for (; k < n; ++k) {
    double dx = x[k] - px;
    double dy = y[k] - py;
    double v = r[k] - std::sqrt(dx * dx + dy * dy);
    best = v > best ? v : best;
  }
  return best;
}

void scanline_spans_neon(const double* x, const double* y, const double* r, std::size_t n,
                         double yl, double* lo, double* hi, std::uint8_t* valid) {
  const float64x2_t vyl = vdupq_n_f64(yl);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    float64x2_t dy = vsubq_f64(vyl, vld1q_f64(y + k));
    float64x2_t rr = vld1q_f64(r + k);
    float64x2_t w2 = vsubq_f64(vmulq_f64(rr, rr), vmulq_f64(dy, dy));
    uint64x2_t ok = vcgeq_f64(w2, zero);
    float64x2_t w = vsqrtq_f64(vbslq_f64(ok, w2, zero));
    float64x2_t cx = vld1q_f64(x + k);
    vst1q_f64(lo + k, vsubq_f64(cx, w));
    vst1q_f64(hi + k, vaddq_f64(cx, w));
    valid[k] = vgetq_lane_u64(ok, 0) ? 1 : 0;
    valid[k + 1] = vgetq_lane_u64(ok, 1) ? 1 : 0;
  }
  for (; k < n; ++k) {
    double dy = yl - y[k];
    double w2 = r[k] * r[k] - dy * dy;
    bool ok = w2 >= 0.0;
    double w = std::sqrt(ok ? w2 : 0.0);
    lo[k] = x[k] - w;
    hi[k] = x[k] + w;
    valid[k] = ok ? 1 : 0;
  }
}

const Kernels kNeon{near_mask_neon, any_contains_neon, max_signed_distance_neon,
                    scanline_spans_neon};

}  // namespace

const Kernels* neon_kernels() { return &kNeon; }

}  // namespace quermass::simd

#else

namespace quermass::simd {
const Kernels* neon_kernels() { return nullptr; }
}  // namespace quermass::simd

#endif
