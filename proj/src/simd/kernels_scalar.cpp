#include "hkt/simd/kernels.hpp"

namespace hkt::simd {

namespace {

void cmul_acc_scalar(cdouble* out, const cdouble* a, const cdouble* b, double scale, size_t len) {
  for (size_t i = 0; i < len; ++i) out[i] += scale * a[i] * b[i];
}

void axpy_scalar(cdouble* y, cdouble s, const cdouble* x, size_t len) {
  for (size_t i = 0; i < len; ++i) y[i] += s * x[i];
}

void scale_scalar(cdouble* a, cdouble s, size_t len) {
  for (size_t i = 0; i < len; ++i) a[i] *= s;
}

cdouble sum_scalar(const cdouble* a, size_t len) {
  double re = 0.0, im = 0.0;
  for (size_t i = 0; i < len; ++i) {
    re += a[i].real();
    im += a[i].imag();
  }
  return {re, im};
}

double sum_abs2_scalar(const cdouble* a, size_t len) {
  double acc = 0.0;
  for (size_t i = 0; i < len; ++i) acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return acc;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", cmul_acc_scalar, axpy_scalar, scale_scalar, sum_scalar,
                         sum_abs2_scalar};
  return k;
}

}  // namespace hkt::simd
