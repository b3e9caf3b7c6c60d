// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "drgcl/kernels/kernels.hpp"

namespace drgcl::kernels {

#if defined(DRGCL_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(DRGCL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument("kernel variant not available on this CPU/build");
#if defined(DRGCL_HAVE_AVX2)
  if (isa == Isa::Avx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  throw std::invalid_argument("unknown kernel variant '" + std::string(name) + "'");
}

namespace {

const KernelTable& select() {
  if (const char* forced = std::getenv("DRGCL_KERNELS"); forced && *forced &&
                                                          std::string_view(forced) != "auto")
    return kernels_for(parse_isa(forced));
  if (isa_available(Isa::Avx2)) return kernels_for(Isa::Avx2);
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace drgcl::kernels
