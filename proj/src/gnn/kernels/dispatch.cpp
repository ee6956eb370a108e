#include <atomic>
#include <cstdlib>
#include <string>

#include "kgprobe/gnn/kernels.hpp"

namespace kgprobe::simd {

#ifdef KGPROBE_HAVE_AVX2
const KernelTable& avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(KGPROBE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* by_name(std::string_view name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") return avx2_kernels();
  if (name == "auto") {
    const KernelTable* best = avx2_kernels();
    return best ? best : &scalar_kernels();
  }
  return nullptr;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{[] {
    const KernelTable* chosen = nullptr;
    if (const char* env = std::getenv("KGPROBE_KERNELS")) chosen = by_name(env);
    return chosen ? chosen : by_name("auto");
  }()};
  return slot;
}

}  // namespace

const KernelTable* avx2_kernels() {
#ifdef KGPROBE_HAVE_AVX2
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

bool select_kernels(std::string_view name) {
  const KernelTable* table = by_name(name);
  if (!table) return false;
  active_slot().store(table, std::memory_order_release);
  return true;
}

}  // namespace kgprobe::simd
