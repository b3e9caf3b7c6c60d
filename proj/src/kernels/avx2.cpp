// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>

#include "drgcl/kernels/kernels.hpp"

namespace drgcl::kernels {
namespace {

constexpr std::size_t kLanes = 4;

void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c) {
  std::fill(c, c + m * n, 0.0);
  const std::size_t nv = n - n % kLanes;
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const __m256d av = _mm256_set1_pd(aip);
      const double* brow = b + p * n;
      std::size_t j = 0;
      for (; j < nv; j += kLanes) {
        __m256d cv = _mm256_loadu_pd(crow + j);
        cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cv);
        _mm256_storeu_pd(crow + j, cv);
      }
      for (; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + kLanes),
                           _mm256_loadu_pd(y + i + kLanes), acc1);
  }
  for (; i + kLanes <= n; i += kLanes)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc0);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

template <typename VecOp, typename ScalarOp>
inline void binary_avx2(std::size_t n, const double* x, const double* y,
                        double* out, VecOp vop, ScalarOp sop) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    _mm256_storeu_pd(out + i, vop(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = sop(x[i], y[i]);
}

void add_avx2(std::size_t n, const double* x, const double* y, double* out) {
  binary_avx2(n, x, y, out, [](__m256d a, __m256d b) { return _mm256_add_pd(a, b); },
              [](double a, double b) { return a + b; });
}

void sub_avx2(std::size_t n, const double* x, const double* y, double* out) {
  binary_avx2(n, x, y, out, [](__m256d a, __m256d b) { return _mm256_sub_pd(a, b); },
              [](double a, double b) { return a - b; });
}

void mul_avx2(std::size_t n, const double* x, const double* y, double* out) {
  binary_avx2(n, x, y, out, [](__m256d a, __m256d b) { return _mm256_mul_pd(a, b); },
              [](double a, double b) { return a * b; });
}

void scale_avx2(std::size_t n, double alpha, const double* x, double* out) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = alpha * x[i];
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::Avx2, "avx2",    gemm_avx2,
                                 dot_avx2,  axpy_avx2, add_avx2,
                                 sub_avx2,  mul_avx2,  scale_avx2};
  return table;
}

}  // namespace drgcl::kernels
