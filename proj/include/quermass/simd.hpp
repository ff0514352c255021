#pragma once

// Batched disk kernels. Every vector variant performs the same IEEE
// operations in the same order as the scalar reference, so results are
// bit-identical; tests/test_simd.cpp checks that.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "quermass/geometry.hpp"

namespace quermass::simd {

enum class Level { Scalar, AVX2, NEON };

struct DiskSoA {
  std::vector<double> x, y, r;
  DiskSoA() = default;
  explicit DiskSoA(const DiskUnion& u);
  std::size_t size() const { return x.size(); }
  void push_back(const Disk& d) {
    x.push_back(d.x);
    y.push_back(d.y);
    r.push_back(d.r);
  }
};

struct Kernels {
  // out[k] = 1 iff |c_k - c|^2 <= (cr + r_k)^2 + eps
  void (*near_mask)(const double* x, const double* y, const double* r, std::size_t n, double cx,
                    double cy, double cr, double eps, std::uint8_t* out);
  // true iff some closed disk contains (px, py)
  bool (*any_contains)(const double* x, const double* y, const double* r, std::size_t n,
                       double px, double py);
  // max_k (r_k - |p - c_k|); -inf for n == 0
  double (*max_signed_distance)(const double* x, const double* y, const double* r,
                                std::size_t n, double px, double py);
  // covered x-interval [lo, hi] of each disk on the horizontal line y = yl
  void (*scanline_spans)(const double* x, const double* y, const double* r, std::size_t n,
                         double yl, double* lo, double* hi, std::uint8_t* valid);
};

const Kernels& scalar_kernels();
const Kernels* avx2_kernels();  // nullptr when not compiled in
const Kernels* neon_kernels();  // nullptr when not compiled in

bool level_supported(Level l);
const char* level_name(Level l);

// Chosen at first use from the CPU; QUERMASS_SIMD=scalar|avx2|neon overrides.
Level active_level();
const Kernels& active();
// Test hook. Returns false (and keeps the current level) if unsupported.
bool force_level(Level l);

}  // namespace quermass::simd
