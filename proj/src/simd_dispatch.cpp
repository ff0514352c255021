#include <atomic>
#include <cstdlib>
#include <cstring>

#include "quermass/simd.hpp"

namespace quermass::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Level detect() {
  if (const char* env = std::getenv("QUERMASS_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Level::Scalar;
    if (std::strcmp(env, "avx2") == 0 && level_supported(Level::AVX2)) return Level::AVX2;
    if (std::strcmp(env, "neon") == 0 && level_supported(Level::NEON)) return Level::NEON;
  }
  if (level_supported(Level::AVX2)) return Level::AVX2;
  if (level_supported(Level::NEON)) return Level::NEON;
  return Level::Scalar;
}

const Kernels* table_for(Level l) {
  switch (l) {
    case Level::AVX2:
      return avx2_kernels();
    case Level::NEON:
      return neon_kernels();
    default:
      return &scalar_kernels();
  }
}

std::atomic<const Kernels*> g_active{nullptr};
std::atomic<int> g_level{-1};

void ensure_init() {
  if (g_active.load(std::memory_order_acquire)) return;
  Level l = detect();
  g_level.store(static_cast<int>(l));
  g_active.store(table_for(l), std::memory_order_release);
}

}  // namespace

bool level_supported(Level l) {
  switch (l) {
    case Level::Scalar:
      return true;
    case Level::AVX2:
      return avx2_kernels() != nullptr && cpu_has_avx2();
    case Level::NEON:
      return neon_kernels() != nullptr;
  }
  return false;
}

const char* level_name(Level l) {
  switch (l) {
    case Level::Scalar:
      return "scalar";
    case Level::AVX2:
      return "avx2";
    case Level::NEON:
      return "neon";
  }
  return "?";
}

Level active_level() {
  ensure_init();
  return static_cast<Level>(g_level.load());
}

const Kernels& active() {
  ensure_init();
  return *g_active.load(std::memory_order_acquire);
}

bool force_level(Level l) {
  if (!level_supported(l)) return false;
  g_level.store(static_cast<int>(l));
  g_active.store(table_for(l), std::memory_order_release);
  return true;
}

}  // namespace quermass::simd
