#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace hkt {

/// The constant matrices of a flat hypercomplex structure on R^{4n}.
///
/// Convention: quaternionic coordinates q_a = x_{4a} + x_{4a+1} i + x_{4a+2} j
/// + x_{4a+3} k, and I, J, K act on tangent vectors by right quaternion
/// multiplication. The stored matrices I_mat, J_mat, K_mat are the induced
/// *left* actions on covector coefficient vectors: (L.alpha)(X) = alpha(X.L).
/// In this convention I_mat * J_mat = -J_mat * I_mat = K_mat. The tangent
/// action is recovered by transposition: X.L = L_mat^T X.
struct HypercomplexStructure {
  int n = 0;  // quaternionic dimension; real dimension is 4n
  Eigen::MatrixXd I_mat, J_mat, K_mat;
  Eigen::MatrixXd g;  // flat metric, symmetric positive definite

  int real_dim() const { return 4 * n; }
  const Eigen::MatrixXd& covector_action(int which) const {
    switch (which) {
      case 0: return I_mat;
      case 1: return J_mat;
      default: return K_mat;
    }
  }
  /// Right action on a tangent vector: X.L.
  Eigen::VectorXd act_tangent(int which, const Eigen::VectorXd& X) const {
    return covector_action(which).transpose() * X;
  }
};

/// Builds the standard flat structure on H^n = R^{4n} with g = identity.
/// Throws std::invalid_argument for n < 1.
HypercomplexStructure standard_structure(int n);

}  // namespace hkt
