#pragma once

#include <utility>
#include <vector>

#include "hkt/fiber_algebra.hpp"
#include "hkt/grid.hpp"

namespace hkt {

/// A form-valued field on the torus. Only nonzero basis components are
/// stored; each component is a C-contiguous array over the active axes.
/// `constant` marks spatially constant fields (their products need no
/// dealiasing).
struct FormField {
  TorusGrid grid;
  int degree = 0;
  bool constant = false;
  std::vector<std::pair<int, Eigen::VectorXcd>> comps;  // sorted by rank

  const Eigen::VectorXcd* find(int rank) const;
  /// Component array for `rank`, inserted as zeros when absent.
  Eigen::VectorXcd& component(int rank);

  /// L2-over-grid, Frobenius-over-fiber norm.
  double norm() const;
  double max_abs() const;

  FormField& operator+=(const FormField& o);
  FormField& operator-=(const FormField& o);
  FormField& operator*=(cdouble s);
};

FormField zero_field(const TorusGrid& grid, int degree);
FormField constant_field(const TorusGrid& grid, const FiberForm& fiber);
FormField scalar_field(const TorusGrid& grid, Eigen::VectorXcd values);

/// Fiber value at a grid point (flat index over active axes).
FiberForm fiber_at(const FormField& field, long point);
/// Fiberwise mean over the grid.
FiberForm mean_fiber(const FormField& field);

Eigen::VectorXcd& scalar_values(FormField& field);
const Eigen::VectorXcd& scalar_values(const FormField& field);

/// x_m coordinate values over the grid (zero when the axis is inactive).
Eigen::VectorXd grid_coordinates(const TorusGrid& grid, int axis);

/// amplitude * cos(2 pi k.x + phase) as a real scalar field. Wave-vector
/// entries on inactive axes must be zero.
FormField mode_scalar_field(const TorusGrid& grid, const std::vector<int>& k, double amplitude,
                            double phase);

/// Pointwise application of a degree-preserving fiber-linear map.
FormField apply_fiber_linear(const Eigen::MatrixXcd& M, const FormField& field);
FormField conj_field(const FormField& field);
FormField extend_J_field(const FormField& field);
FormField project_plus_field(const FormField& field);
/// Blockwise R applied pointwise (constant coefficients).
FormField R_field(const FormField& field);

FormField operator+(FormField a, const FormField& b);
FormField operator-(FormField a, const FormField& b);
FormField operator*(cdouble s, FormField a);

/// Dolbeault differentials via spectral differentiation: (p,q) -> (p+1,q)
/// and (p,q) -> (p,q+1).
FormField pd(const FormField& field);
FormField dbar(const FormField& field);
/// de Rham differential, pd + dbar.
FormField d(const FormField& field);
/// The twisted differential on (p,0)-forms, J^{-1} dbar J.
FormField pd_J(const FormField& field);
/// Quaternionic Dolbeault differential, project_plus of d (degree <= 2n-1).
FormField d_plus(const FormField& field);

/// Pointwise wedge with 2/3-rule dealiasing (skipped when a factor is
/// spatially constant).
FormField wedge_field(const FormField& a, const FormField& b);

/// Zero all Fourier modes with |k| > N/3 on any active axis.
void dealias(FormField& field);

/// Integral of a top-degree (4n) field against the positively oriented unit
/// volume of the torus.
cdouble integrate(const FormField& top);

/// Largest imaginary magnitude over all components (real-drift monitor).
double imag_drift(const FormField& field);
/// Drop imaginary parts in place.
void force_real(FormField& field);

/// Both sides of the pointwise identity
/// |grad psi|^2_{g0} = 4n (pd psi ^ pd_J psi ^ Omega_0^{n-1}) / Omega_0^n
/// as scalar fields over the grid.
std::pair<FormField, FormField> grad_norm_identity(const FormField& psi);

}  // namespace hkt
