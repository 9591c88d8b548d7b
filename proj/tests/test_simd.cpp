#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "qmeasure/simd/kernels.hpp"

using namespace qmeasure::simd;

namespace {
std::mt19937_64 rng(99);
std::normal_distribution<double> normal;

std::vector<double> reals(std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}
std::vector<cplx> complexes(std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = {normal(rng), normal(rng)};
  return v;
}
double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}
} // namespace

TEST_CASE("scalar kernels against naive loops") {
  const auto& s = scalar_kernels();
  const std::size_t rows = 5, cols = 7, ld = 9;
  const auto m = reals(rows * ld);
  const auto x = complexes(cols);
  std::vector<cplx> y(rows);
  s.real_matvec(m, rows, cols, ld, x, y);
  for (std::size_t i = 0; i < rows; ++i) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < cols; ++k) acc += m[i * ld + k] * x[k];
    CHECK(std::abs(acc - y[i]) < 1e-13);
  }
  const auto d = complexes(6);
  const auto v = complexes(6);
  std::vector<cplx> out(6);
  s.tridiag_apply(d, cplx(0.5, -1.0), v, out);
  CHECK(std::abs(out[0] - (d[0] * v[0] + cplx(0.5, -1.0) * v[1])) < 1e-14);
  CHECK(std::abs(out[5] - (d[5] * v[5] + cplx(0.5, -1.0) * v[4])) < 1e-14);
}

TEST_CASE("AVX2 variant agrees with the scalar reference") {
  const KernelTable* v = avx2_kernels();
  if (!v) {
    MESSAGE("AVX2 variant unavailable on this build or CPU");
    return;
  }
  const auto& s = scalar_kernels();
  CHECK(&active() != nullptr);
  // odd sizes exercise the remainder loops
  for (std::size_t n : {1u, 3u, 4u, 17u, 160u, 1001u}) {
    const std::size_t rows = 13, ld = n + 3;
    const auto m = reals(rows * ld);
    const auto x = complexes(n);
    std::vector<cplx> ys(rows), yv(rows);
    s.real_matvec(m, rows, n, ld, x, ys);
    v->real_matvec(m, rows, n, ld, x, yv);
    CHECK(max_diff(ys, yv) < 1e-12 * std::sqrt(static_cast<double>(n)) * 10);

    const auto c = complexes(rows);
    std::vector<cplx> ts(n), tv(n);
    s.real_matvec_t(m, rows, n, ld, c, ts);
    v->real_matvec_t(m, rows, n, ld, c, tv);
    CHECK(max_diff(ts, tv) < 1e-12);

    const auto w = reals(n);
    const double as = s.weighted_abs2(w, x), av = v->weighted_abs2(w, x);
    CHECK(std::abs(as - av) < 1e-12 * std::max(1.0, std::abs(as)) * std::sqrt(static_cast<double>(n)));

    std::vector<cplx> ss(n), sv(n);
    s.scale_real(w, x, ss);
    v->scale_real(w, x, sv);
    CHECK(max_diff(ss, sv) == 0.0);

    const auto dg = complexes(n);
    std::vector<cplx> ds(n), dv(n);
    s.tridiag_apply(dg, cplx(-0.3, 0.7), x, ds);
    v->tridiag_apply(dg, cplx(-0.3, 0.7), x, dv);
    CHECK(max_diff(ds, dv) < 1e-13);

    const auto yy = reals(n), p1 = reals(n), p2 = reals(n);
    std::vector<double> hs(n), hv(n);
    s.hermite_step(1.25, 0.75, yy, p1, p2, hs);
    v->hermite_step(1.25, 0.75, yy, p1, p2, hv);
    for (std::size_t k = 0; k < n; ++k) CHECK(hs[k] == doctest::Approx(hv[k]).epsilon(1e-14).scale(1e-14));
  }
}

TEST_CASE("active table is a known variant") {
  const auto name = active().name;
  CHECK((name == "scalar" || name == "avx2"));
}
