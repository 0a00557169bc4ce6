#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

namespace hkt {

using cdouble = std::complex<double>;

/// A complex-valued exterior form at a point of R^{4n}, expressed over the
/// fixed complex frame (dz_0, dzbar_0, dz_1, dzbar_1, ...). Coefficients are
/// dense over the lexicographic multi-index basis of the given degree.
struct FiberForm {
  int n = 0;
  int degree = 0;
  Eigen::VectorXcd coeffs;

  FiberForm() = default;
  FiberForm(int n_, int degree_, Eigen::VectorXcd c)
      : n(n_), degree(degree_), coeffs(std::move(c)) {}

  double norm() const { return coeffs.norm(); }

  FiberForm& operator+=(const FiberForm& o) {
    coeffs += o.coeffs;
    return *this;
  }
  FiberForm& operator-=(const FiberForm& o) {
    coeffs -= o.coeffs;
    return *this;
  }
  FiberForm& operator*=(cdouble s) {
    coeffs *= s;
    return *this;
  }
  friend FiberForm operator+(FiberForm a, const FiberForm& b) { return a += b; }
  friend FiberForm operator-(FiberForm a, const FiberForm& b) { return a -= b; }
  friend FiberForm operator*(cdouble s, FiberForm a) { return a *= s; }
};

}  // namespace hkt
