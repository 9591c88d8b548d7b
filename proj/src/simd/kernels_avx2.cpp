// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "variants.hpp"

#include <immintrin.h>

namespace qmeasure::simd::detail {
namespace {

// (m[k], m[k], m[k+1], m[k+1])
inline __m256d dup_pair(const double* m) {
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(m)), 0b01010000);
}

inline const double* raw(std::span<const cplx> x) { return reinterpret_cast<const double*>(x.data()); }
inline double* raw(std::span<cplx> x) { return reinterpret_cast<double*>(x.data()); }

// (a0*b0, a1*b1) for two interleaved complex numbers per register
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d are = _mm256_movedup_pd(a);
  const __m256d aim = _mm256_permute_pd(a, 0b1111);
  const __m256d bsw = _mm256_permute_pd(b, 0b0101);
  return _mm256_fmaddsub_pd(are, b, _mm256_mul_pd(aim, bsw));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void real_matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
                 std::size_t ld, std::span<const cplx> x, std::span<cplx> y) {
  const double* xs = raw(x);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m.data() + i * ld;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= cols; k += 4) {
      acc0 = _mm256_fmadd_pd(dup_pair(row + k), _mm256_loadu_pd(xs + 2 * k), acc0);
      acc1 = _mm256_fmadd_pd(dup_pair(row + k + 2), _mm256_loadu_pd(xs + 2 * k + 4), acc1);
    }
    for (; k + 2 <= cols; k += 2)
      acc0 = _mm256_fmadd_pd(dup_pair(row + k), _mm256_loadu_pd(xs + 2 * k), acc0);
    const __m256d acc = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double re = lanes[0] + lanes[2];
    double im = lanes[1] + lanes[3];
    for (; k < cols; ++k) {
      re += row[k] * x[k].real();
      im += row[k] * x[k].imag();
    }
    y[i] = {re, im};
  }
}

void real_matvec_t(std::span<const double> m, std::size_t rows, std::size_t cols,
                   std::size_t ld, std::span<const cplx> c, std::span<cplx> y) {
  double* ys = raw(y);
  for (std::size_t k = 0; k < cols; ++k) y[k] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double cr = c[i].real();
    const double ci = c[i].imag();
    if (cr == 0.0 && ci == 0.0) continue;
    const double* row = m.data() + i * ld;
    const __m256d cv = _mm256_setr_pd(cr, ci, cr, ci);
    std::size_t k = 0;
    for (; k + 2 <= cols; k += 2) {
      double* dst = ys + 2 * k;
      _mm256_storeu_pd(dst, _mm256_fmadd_pd(dup_pair(row + k), cv, _mm256_loadu_pd(dst)));
    }
    for (; k < cols; ++k) y[k] += cplx{cr * row[k], ci * row[k]};
  }
}

double weighted_abs2(std::span<const double> w, std::span<const cplx> x) {
  const double* xs = raw(x);
  const std::size_t n = w.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d v = _mm256_loadu_pd(xs + 2 * k);
    acc = _mm256_fmadd_pd(dup_pair(w.data() + k), _mm256_mul_pd(v, v), acc);
  }
  double total = hsum(acc);
  for (; k < n; ++k) total += w[k] * std::norm(x[k]);
  return total;
}

void scale_real(std::span<const double> w, std::span<const cplx> x, std::span<cplx> out) {
  const double* xs = raw(x);
  double* os = raw(out);
  const std::size_t n = w.size();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2)
    _mm256_storeu_pd(os + 2 * k, _mm256_mul_pd(dup_pair(w.data() + k), _mm256_loadu_pd(xs + 2 * k)));
  for (; k < n; ++k) out[k] = w[k] * x[k];
}

void tridiag_apply(std::span<const cplx> d, cplx off, std::span<const cplx> x,
                   std::span<cplx> out) {
  const std::size_t n = x.size();
  if (n < 4) {
    kScalarKernels.tridiag_apply(d, off, x, out);
    return;
  }
  const double* xs = raw(x);
  const double* ds = raw(d);
  double* os = raw(out);
  const __m256d offv = _mm256_setr_pd(off.real(), off.imag(), off.real(), off.imag());
  out[0] = d[0] * x[0] + off * x[1];
  std::size_t j = 1;
  for (; j + 2 < n; j += 2) {
    const __m256d xc = _mm256_loadu_pd(xs + 2 * j);
    const __m256d xl = _mm256_loadu_pd(xs + 2 * (j - 1));
    const __m256d xr = _mm256_loadu_pd(xs + 2 * (j + 1));
    const __m256d diag = cmul(_mm256_loadu_pd(ds + 2 * j), xc);
    const __m256d side = cmul(offv, _mm256_add_pd(xl, xr));
    _mm256_storeu_pd(os + 2 * j, _mm256_add_pd(diag, side));
  }
  for (; j + 1 < n; ++j) out[j] = d[j] * x[j] + off * (x[j - 1] + x[j + 1]);
  out[n - 1] = d[n - 1] * x[n - 1] + off * x[n - 2];
}

void hermite_step(double a, double b, std::span<const double> y, std::span<const double> prev,
                  std::span<const double> prev2, std::span<double> out) {
  const std::size_t n = y.size();
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d t = _mm256_mul_pd(_mm256_mul_pd(av, _mm256_loadu_pd(y.data() + k)),
                                    _mm256_loadu_pd(prev.data() + k));
    _mm256_storeu_pd(out.data() + k, _mm256_fnmadd_pd(bv, _mm256_loadu_pd(prev2.data() + k), t));
  }
  for (; k < n; ++k) out[k] = a * y[k] * prev[k] - b * prev2[k];
}

} // namespace

const KernelTable kAvx2Kernels{
    "avx2", real_matvec, real_matvec_t, weighted_abs2, scale_real, tridiag_apply, hermite_step,
};

} // namespace qmeasure::simd::detail
