#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "hkt/fiber_form.hpp"
#include "hkt/multi_index.hpp"
#include "hkt/structure.hpp"

namespace hkt {

/// Immutable per-n cache of everything constant about the fiber algebra:
/// frame transforms, covector actions of I/J/K, su(2) derivation matrices,
/// Casimir eigenprojectors, wedge tables, and the bicomplex matrices Psi
/// used by the R map. Construction is lazy per degree; once built, entries
/// never change, so concurrent readers are safe.
class FiberContext {
 public:
  enum Structure3 { L_I = 0, L_J = 1, L_K = 2 };

  static const FiberContext& get(int n);

  int n;
  int frame_dim;  // 4n
  int hol_dim;    // 2n
  HypercomplexStructure H;
  IndexTables idx;

  // frame_f = sum_m frame_to_real(f,m) dx_m ; coeff change a -> c = real_to_frame * a
  Eigen::MatrixXcd frame_to_real;
  Eigen::MatrixXcd real_to_frame;
  Eigen::MatrixXcd cov[3];  // covector action of I, J, K in the complex frame

  // Top-degree basis form (all frame covectors wedged in order) expressed as a
  // multiple of the Lebesgue volume dx_0 ^ ... ^ dx_{4n-1}.
  cdouble top_basis_to_lebesgue;

  struct WeightDecomposition {
    std::vector<int> weights;               // descending
    std::vector<Eigen::MatrixXcd> proj;     // idempotent, mutually annihilating
  };
  struct WedgeEntry {
    int r1, r2, rout;
    double sign;
  };

  /// Derivation extension of the covector action of L to degree k.
  const Eigen::MatrixXcd& ad_matrix(int L, int k) const;
  /// Multiplicative (exterior-power) extension of the covector action of L.
  const Eigen::MatrixXcd& mult_matrix(int L, int k) const;
  /// Casimir spectral decomposition at degree k.
  const WeightDecomposition& weight_decomposition(int k) const;
  /// Projector onto the top su(2)-weight k part of degree k <= 2n.
  const Eigen::MatrixXcd& plus_projector(int k) const;
  /// Sparse wedge table for degrees (k1, k2).
  const std::vector<WedgeEntry>& wedge_table(int k1, int k2) const;
  /// Psi_{p,q}: Lambda^{p+q,0} -> Lambda^{p+q}, the bicomplex embedding of the
  /// h1^p h2^q slot. Columns follow the (p+q,0) block basis order.
  const Eigen::MatrixXcd& psi(int p, int q) const;
  /// Least-squares solver for psi(p,q) (its image is Lambda^{p,q}_+).
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd>& psi_solver(int p, int q) const;

  /// Ranks of the (p,q) block inside degree p+q (cached copy of IndexTables).
  const std::vector<int>& block(int p, int q) const;

  /// Expands a wedge of degree-1 coefficient vectors into a FiberForm.
  FiberForm wedge_vectors(const std::vector<Eigen::VectorXcd>& vs) const;

 private:
  explicit FiberContext(int n_);

  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, Eigen::MatrixXcd> ad_, mult_;
  mutable std::map<int, WeightDecomposition> wd_;
  mutable std::map<std::pair<int, int>, std::vector<WedgeEntry>> wedge_;
  mutable std::map<std::pair<int, int>, Eigen::MatrixXcd> psi_;
  mutable std::map<std::pair<int, int>,
                   std::unique_ptr<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd>>>
      psi_cod_;
  mutable std::map<std::pair<int, int>, std::vector<int>> blocks_;
};

}  // namespace hkt
