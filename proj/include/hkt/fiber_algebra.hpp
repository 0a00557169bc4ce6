#pragma once

#include <optional>

#include "hkt/fiber_context.hpp"
#include "hkt/fiber_form.hpp"

namespace hkt {

FiberForm wedge(const FiberForm& a, const FiberForm& b);

/// Complex conjugate as a form: conjugates coefficients and swaps each dz_c
/// with dzbar_c in the basis (with the resulting reordering sign).
FiberForm conj_form(const FiberForm& eta);

/// Left action of L on a 1-form: beta(X) = alpha(X.L). Rejects degree != 1.
FiberForm act_on_covector(int L, const FiberForm& alpha);

/// Multiplicative extension of J to all degrees; maps (p,q) to (q,p).
FiberForm extend_J(const FiberForm& eta);

/// Derivation extension of the degree-1 action of L; for L = I acts on a
/// (p,q)-form as sqrt(-1)(p-q).
FiberForm ad_L_derivation(int L, const FiberForm& eta);

/// Projection onto the top su(2)-weight part. Rejects degree > 2n.
FiberForm project_plus(const FiberForm& eta);

/// Projection of a (1,1)-form onto the SU(2)-invariant 2-forms,
/// (1/2)(eta(.,.) + eta(.J, .J)). Rejects non-(1,1) input.
FiberForm project_su2_invariant(const FiberForm& eta);

/// (p,q) tag if the form is supported on a single bidegree block (within tol).
std::optional<std::pair<int, int>> pure_bidegree(const FiberForm& eta, double rel_tol = 1e-12);

/// Restriction of a degree-k form to its (p,q) block.
FiberForm bidegree_part(const FiberForm& eta, int p, int q);

/// The three metric 2-forms omega_L(X,Y) = g(X, Y.L) of a structure.
struct OmegaForms {
  FiberForm omega_I, omega_J, omega_K;
};
OmegaForms omega_forms(const HypercomplexStructure& H);

/// The flat HKT fiber Omega_0 = -omega_J + sqrt(-1) omega_K, a (2,0)-form.
FiberForm hkt_fiber(const HypercomplexStructure& H);

/// Degree-2 form as a complex antisymmetric matrix over the real dx basis.
Eigen::MatrixXcd as_real_matrix(const FiberForm& eta);
/// Inverse of as_real_matrix for antisymmetric W.
FiberForm from_real_matrix(int n, const Eigen::MatrixXcd& W);

/// Real symmetric matrix of the quadratic form X -> eta(X, X.J) of a q-real
/// (2,0)-form (imaginary part must be round-off only, and is checked).
Eigen::MatrixXd q_quadratic_form(const FiberForm& eta);

}  // namespace hkt
