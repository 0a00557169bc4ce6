// Compiled with -mavx2 -mfma; only reached after the CPU check in dispatch.
#include <immintrin.h>

#include "hkt/simd/kernels.hpp"

namespace hkt::simd {

namespace {

inline __m256d complex_mul(__m256d a, __m256d b) {
  __m256d b_re = _mm256_movedup_pd(b);
  __m256d b_im = _mm256_permute_pd(b, 0xF);
  __m256d a_swap = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_swap, b_im));
}

void cmul_acc_avx2(cdouble* out, const cdouble* a, const cdouble* b, double scale, size_t len) {
  const __m256d vs = _mm256_set1_pd(scale);
  size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    __m256d vb = _mm256_loadu_pd(reinterpret_cast<const double*>(b + i));
    __m256d vo = _mm256_loadu_pd(reinterpret_cast<double*>(out + i));
    vo = _mm256_fmadd_pd(complex_mul(va, vb), vs, vo);
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i), vo);
  }
  for (; i < len; ++i) out[i] += scale * a[i] * b[i];
}

void axpy_avx2(cdouble* y, cdouble s, const cdouble* x, size_t len) {
  const __m256d vs =
      _mm256_setr_pd(s.real(), s.imag(), s.real(), s.imag());
  size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    __m256d vx = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    __m256d vy = _mm256_loadu_pd(reinterpret_cast<double*>(y + i));
    vy = _mm256_add_pd(vy, complex_mul(vx, vs));
    _mm256_storeu_pd(reinterpret_cast<double*>(y + i), vy);
  }
  for (; i < len; ++i) y[i] += s * x[i];
}

void scale_avx2(cdouble* a, cdouble s, size_t len) {
  const __m256d vs =
      _mm256_setr_pd(s.real(), s.imag(), s.real(), s.imag());
  size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(a + i), complex_mul(va, vs));
  }
  for (; i < len; ++i) a[i] *= s;
}

cdouble sum_avx2(const cdouble* a, size_t len) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 2 <= len; i += 2)
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(reinterpret_cast<const double*>(a + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  cdouble total{lanes[0] + lanes[2], lanes[1] + lanes[3]};
  for (; i < len; ++i) total += a[i];
  return total;
}

double sum_abs2_avx2(const cdouble* a, size_t len) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    acc = _mm256_fmadd_pd(va, va, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < len; ++i) total += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return total;
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{"avx2", cmul_acc_avx2, axpy_avx2, scale_avx2, sum_avx2, sum_abs2_avx2};
  return k;
}

}  // namespace hkt::simd
