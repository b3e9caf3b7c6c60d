// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dense float64 inner loops used by the tensor engine and the linear
// classifier. Each kernel has a scalar reference implementation and, on
// x86-64, an AVX2/FMA variant. The active table is picked once at startup
// from CPU capabilities; DRGCL_KERNELS=scalar|avx2 overrides the choice.

#include <cstddef>
#include <string_view>

namespace drgcl::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  // C[m x n] = A[m x k] * B[k x n], all row-major and contiguous.
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k,
               const double* a, const double* b, double* c);
  double (*dot)(std::size_t n, const double* x, const double* y);
  // y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  void (*add)(std::size_t n, const double* x, const double* y, double* out);
  void (*sub)(std::size_t n, const double* x, const double* y, double* out);
  void (*mul)(std::size_t n, const double* x, const double* y, double* out);
  void (*scale)(std::size_t n, double alpha, const double* x, double* out);
};

const KernelTable& scalar_kernels();

// True when the running CPU can execute `isa` and the variant was compiled in.
bool isa_available(Isa isa);

// Throws std::invalid_argument when `isa` is unavailable.
const KernelTable& kernels_for(Isa isa);

const KernelTable& active();

Isa parse_isa(std::string_view name);

}  // namespace drgcl::kernels
