#include "variants.hpp"

#include <cstdlib>
#include <string_view>

namespace qmeasure::simd {

const KernelTable& scalar_kernels() { return detail::kScalarKernels; }

const KernelTable* avx2_kernels() {
#if defined(QMEASURE_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::kAvx2Kernels : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& resolve() {
  const char* env = std::getenv("QMEASURE_SIMD");
  const std::string_view choice = env ? env : "auto";
  if (choice == "scalar") return scalar_kernels();
  if (const KernelTable* v = avx2_kernels()) return *v;
  return scalar_kernels();
}

} // namespace

const KernelTable& active() {
  static const KernelTable& table = resolve();
  return table;
}

} // namespace qmeasure::simd
