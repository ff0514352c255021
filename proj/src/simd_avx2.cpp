#include "quermass/simd.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

#include <cmath>
#include <limits>

#define QM_AVX2 __attribute__((target("avx2")))

namespace quermass::simd {
namespace {

QM_AVX2 void near_mask_avx2(const double* x, const double* y, const double* r, std::size_t n,
                            double cx, double cy, double cr, double eps, std::uint8_t* out) {
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  const __m256d vcr = _mm256_set1_pd(cr);
  const __m256d veps = _mm256_set1_pd(eps);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + k), vcx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + k), vcy);
    __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    __m256d s = _mm256_add_pd(vcr, _mm256_loadu_pd(r + k));
    __m256d lim = _mm256_add_pd(_mm256_mul_pd(s, s), veps);
    int m = _mm256_movemask_pd(_mm256_cmp_pd(d2, lim, _CMP_LE_OQ));
    out[k] = m & 1;
    out[k + 1] = (m >> 1) & 1;
    out[k + 2] = (m >> 2) & 1;
    out[k + 3] = (m >> 3) & 1;
  }
  for (; k < n; ++k) {
    double dx = x[k] - cx;
    double dy = y[k] - cy;
    double d2 = dx * dx + dy * dy;
    double s = cr + r[k];
    out[k] = d2 <= s * s + eps ? 1 : 0;
  }
}

QM_AVX2 bool any_contains_avx2(const double* x, const double* y, const double* r, std::size_t n,
                               double px, double py) {
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + k), vpx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + k), vpy);
    __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    __m256d rr = _mm256_loadu_pd(r + k);
    if (_mm256_movemask_pd(_mm256_cmp_pd(d2, _mm256_mul_pd(rr, rr), _CMP_LE_OQ))) return true;
  }
  for (; k < n; ++k) {
    double dx = x[k] - px;
    double dy = y[k] - py;
    if (dx * dx + dy * dy <= r[k] * r[k]) return true;
  }
  return false;
}

QM_AVX2 double max_signed_distance_avx2(const double* x, const double* y, const double* r,
                                        std::size_t n, double px, double py) {
  double best = -std::numeric_limits<double>::infinity();
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  __m256d vbest = _mm256_set1_pd(best);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + k), vpx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + k), vpy);
    __m256d d = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
    vbest = _mm256_max_pd(vbest, _mm256_sub_pd(_mm256_loadu_pd(r + k), d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vbest);
  for (double v : lanes) best = v > best ? v : best;
  for (; k < n; ++k) {
    double dx = x[k] - px;
    double dy = y[k] - py;
    double v = r[k] - std::sqrt(dx * dx + dy * dy);
    best = v > best ? v : best;
  }
  return best;
}

QM_AVX2 void scanline_spans_avx2(const double* x, const double* y, const double* r,
                                 std::size_t n, double yl, double* lo, double* hi,
                                 std::uint8_t* valid) {
  const __m256d vyl = _mm256_set1_pd(yl);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d dy = _mm256_sub_pd(vyl, _mm256_loadu_pd(y + k));
    __m256d rr = _mm256_loadu_pd(r + k);
    __m256d w2 = _mm256_sub_pd(_mm256_mul_pd(rr, rr), _mm256_mul_pd(dy, dy));
    __m256d ok = _mm256_cmp_pd(w2, zero, _CMP_GE_OQ);
    __m256d w = _mm256_sqrt_pd(_mm256_blendv_pd(zero, w2, ok));
    __m256d cx = _mm256_loadu_pd(x + k);
    _mm256_storeu_pd(lo + k, _mm256_sub_pd(cx, w));
    _mm256_storeu_pd(hi + k, _mm256_add_pd(cx, w));
    int m = _mm256_movemask_pd(ok);
    valid[k] = m & 1;
    valid[k + 1] = (m >> 1) & 1;
    valid[k + 2] = (m >> 2) & 1;
    valid[k + 3] = (m >> 3) & 1;
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

const Kernels kAvx2{near_mask_avx2, any_contains_avx2, max_signed_distance_avx2,
                    scanline_spans_avx2};

}  // namespace

const Kernels* avx2_kernels() { return &kAvx2; }

}  // namespace quermass::simd

#else

namespace quermass::simd {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace quermass::simd

#endif
