#pragma once

// Data-parallel inner loops shared by the engines.
//
// Every kernel has a portable scalar reference implementation. Vector
// variants (currently AVX2+FMA on x86-64) are compiled into separate
// translation units and picked at runtime from CPU feature detection.
// Set QMEASURE_SIMD=scalar|avx2 to force a variant.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace qmeasure::simd {

using cplx = std::complex<double>;

struct KernelTable {
  std::string_view name;

  // y[i] = sum_k m[i*ld + k] * x[k], k < cols  (real matrix, complex vector)
  void (*real_matvec)(std::span<const double> m, std::size_t rows, std::size_t cols,
                      std::size_t ld, std::span<const cplx> x, std::span<cplx> y);

  // y[k] = sum_i c[i] * m[i*ld + k], k < cols  (transposed product, synthesis)
  void (*real_matvec_t)(std::span<const double> m, std::size_t rows, std::size_t cols,
                        std::size_t ld, std::span<const cplx> c, std::span<cplx> y);

  // sum_k w[k] * |x[k]|^2
  double (*weighted_abs2)(std::span<const double> w, std::span<const cplx> x);

  // out[k] = w[k] * x[k]
  void (*scale_real)(std::span<const double> w, std::span<const cplx> x, std::span<cplx> out);

  // out[j] = d[j]*x[j] + off*(x[j-1] + x[j+1]), with x[-1] = x[n] = 0
  void (*tridiag_apply)(std::span<const cplx> d, cplx off, std::span<const cplx> x,
                        std::span<cplx> out);

  // Three-term Hermite-function step: out[k] = a*y[k]*prev[k] - b*prev2[k]
  void (*hermite_step)(double a, double b, std::span<const double> y, std::span<const double> prev,
                       std::span<const double> prev2, std::span<double> out);
};

const KernelTable& scalar_kernels();

// nullptr when the variant is not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels();

// Variant used by the library; resolved once.
const KernelTable& active();

} // namespace qmeasure::simd
