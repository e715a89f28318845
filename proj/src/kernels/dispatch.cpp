#include <atomic>
#include <cstdlib>
#include <string>

#include "qas/kernels.hpp"

namespace qas::kernels {

#if defined(QAS_WITH_AVX2)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2() {
#if defined(QAS_WITH_AVX2)
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* resolve() {
  if (const char* forced = std::getenv("QAS_KERNELS")) {
    const std::string name(forced);
    if (name == "scalar") return &scalar();
    if (name == "avx2" && avx2() != nullptr) return avx2();
  }
  if (const KernelTable* t = avx2()) return t;
  return &scalar();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{resolve()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const KernelTable* t = nullptr;
  if (name == "scalar") t = &scalar();
  if (name == "avx2") t = avx2();
  if (t == nullptr) return false;
  slot().store(t, std::memory_order_release);
  return true;
}

}  // namespace qas::kernels
