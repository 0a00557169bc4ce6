#include "hkt/simd/kernels.hpp"

namespace hkt::simd {

const Kernels& avx2_kernels();

const Kernels& kernels() {
#if defined(__x86_64__) || defined(_M_X64)
  static const Kernels& chosen =
      __builtin_cpu_supports("avx2") ? avx2_kernels() : scalar_kernels();
#else
  static const Kernels& chosen = scalar_kernels();
#endif
  return chosen;
}

}  // namespace hkt::simd
