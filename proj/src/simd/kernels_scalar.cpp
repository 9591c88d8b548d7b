#include "variants.hpp"

namespace qmeasure::simd::detail {
namespace {

void real_matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
                 std::size_t ld, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m.data() + i * ld;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      re += row[k] * x[k].real();
      im += row[k] * x[k].imag();
    }
    y[i] = {re, im};
  }
}

void real_matvec_t(std::span<const double> m, std::size_t rows, std::size_t cols,
                   std::size_t ld, std::span<const cplx> c, std::span<cplx> y) {
  for (std::size_t k = 0; k < cols; ++k) y[k] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m.data() + i * ld;
    const double cr = c[i].real();
    const double ci = c[i].imag();
    if (cr == 0.0 && ci == 0.0) continue;
    for (std::size_t k = 0; k < cols; ++k) y[k] += cplx{cr * row[k], ci * row[k]};
  }
}

double weighted_abs2(std::span<const double> w, std::span<const cplx> x) {
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * std::norm(x[k]);
  return acc;
}

void scale_real(std::span<const double> w, std::span<const cplx> x, std::span<cplx> out) {
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = w[k] * x[k];
}

void tridiag_apply(std::span<const cplx> d, cplx off, std::span<const cplx> x,
                   std::span<cplx> out) {
  const std::size_t n = x.size();
  if (n == 0) return;
  if (n == 1) {
    out[0] = d[0] * x[0];
    return;
  }
  out[0] = d[0] * x[0] + off * x[1];
  for (std::size_t j = 1; j + 1 < n; ++j) out[j] = d[j] * x[j] + off * (x[j - 1] + x[j + 1]);
  out[n - 1] = d[n - 1] * x[n - 1] + off * x[n - 2];
}

void hermite_step(double a, double b, std::span<const double> y, std::span<const double> prev,
                  std::span<const double> prev2, std::span<double> out) {
  for (std::size_t k = 0; k < y.size(); ++k) out[k] = a * y[k] * prev[k] - b * prev2[k];
}

} // namespace

const KernelTable kScalarKernels{
    "scalar", real_matvec, real_matvec_t, weighted_abs2, scale_real, tridiag_apply, hermite_step,
};

} // namespace qmeasure::simd::detail
