#pragma once

#include <complex>
#include <cstddef>

namespace hkt::simd {

using cdouble = std::complex<double>;

/// Inner-loop kernels for the grid-level field operations. Two
/// implementations exist: a portable scalar reference and an AVX2 variant;
/// kernels() picks one at load time from CPU capabilities. All arrays use the
/// interleaved (re, im) layout of std::complex<double>.
struct Kernels {
  const char* name;

  /// out[i] += scale * a[i] * b[i]
  void (*cmul_acc)(cdouble* out, const cdouble* a, const cdouble* b, double scale, size_t len);
  /// y[i] += s * x[i]
  void (*axpy)(cdouble* y, cdouble s, const cdouble* x, size_t len);
  /// a[i] *= s
  void (*scale)(cdouble* a, cdouble s, size_t len);
  /// sum of a[i]
  cdouble (*sum)(const cdouble* a, size_t len);
  /// sum of |a[i]|^2
  double (*sum_abs2)(const cdouble* a, size_t len);
};

const Kernels& scalar_kernels();
const Kernels& kernels();  // runtime-dispatched

}  // namespace hkt::simd
