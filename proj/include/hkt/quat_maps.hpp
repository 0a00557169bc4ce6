#pragma once

#include <random>

#include "hkt/fiber_algebra.hpp"

namespace hkt {

/// Constant holomorphic (2n,0) volume fiber: q-real, q-positive, non-vanishing.
struct ThetaForm {
  FiberForm form;
};

/// The canonical (n,n)-form (sqrt(-1))^n V(1): real, top-weight, weakly
/// positive, closed. The scalar factor makes the form real; V(1) itself obeys
/// conj(V(1)) = (-1)^n V(1), which follows from the twisted conjugation rule
/// of R, so it is purely imaginary for odd n.
struct PhiForm {
  FiberForm form;
};

enum class Positivity { strongly_positive, weakly_positive_only, boundary, not_positive };

struct PositivityVerdict {
  Positivity status = Positivity::boundary;
  double margin = 0.0;  // smallest tested pairing / eigenvalue
  std::optional<Eigen::VectorXd> witness;

  bool is_positive() const {
    return status == Positivity::strongly_positive || status == Positivity::weakly_positive_only;
  }
};

/// R: Lambda^{p,q} -> Lambda^{p+q,0}, top-weight projection followed by the
/// inverse of the bicomplex embedding. Input must be of pure bidegree.
FiberForm R_map(const FiberForm& eta);

/// R applied block-by-block to a mixed form of fixed total degree.
FiberForm R_blockwise(const FiberForm& eta);

/// || R(conj eta) - (-1)^p conj(J(R(eta))) ||.
double R_conjugation_residual(const FiberForm& eta);

/// V: Lambda^{2p,0} -> Lambda^{n+p,n+p} defined by the duality
/// V(eta) ^ xi = eta ^ R(xi) ^ conj(Theta) against all (n-p,n-p) test forms.
FiberForm V_map(const FiberForm& eta, const ThetaForm& theta);

/// Theta = scale * Omega_0^n / n! in the standard flat frame (scale > 0).
ThetaForm make_theta(int n, double scale = 1.0);

PhiForm make_phi(const ThetaForm& theta);

bool check_q_real(const FiberForm& eta, double rel_tol = 1e-11);

/// Exact (eigenvalue-based) q-positivity check for q-real (2,0)-forms, plus
/// `samples` random test directions.
PositivityVerdict check_strong_q_positive(const FiberForm& eta, int samples, std::mt19937_64& rng);

enum class PositivityMode { strong, weak };

/// Sampled positivity check for q-real (2p,0)-forms. strongly_positive
/// verdicts are certificates only up to the sampled directions; not_positive
/// verdicts carry an exact witness.
PositivityVerdict check_positive_2p(const FiberForm& eta, PositivityMode mode, int samples,
                                    std::mt19937_64& rng, const ThetaForm& theta);

/// Sampled Phi-positivity check for real (1,1)-forms.
PositivityVerdict check_phi_positive(const FiberForm& eta, const PhiForm& phi, int samples,
                                     std::mt19937_64& rng);

/// Coefficient of a top-degree (4n) fiber form relative to the positively
/// oriented unit-volume form of (R^{4n}, I).
cdouble top_coefficient(const FiberForm& top);

/// Coefficient of a (2n,0)-form relative to Theta.
cdouble coefficient_vs_theta(const FiberForm& eta, const ThetaForm& theta);

// Sampling helpers (shared with tests).
FiberForm random_form(int n, int degree, std::mt19937_64& rng);
FiberForm random_bidegree_form(int n, int p, int q, std::mt19937_64& rng);
/// Sum of `terms` products of p factors -sqrt(-1) a ^ conj(a): strongly
/// positive (p,p). The sign matches the metric form omega_I(X,Y) = g(X, Y.I),
/// whose positive cone is generated by -sqrt(-1) a ^ conj(a) in this frame.
FiberForm random_strongly_positive_pp(int n, int p, int terms, std::mt19937_64& rng);
/// Strongly q-positive (2,0)-form, certified PSD before being returned.
FiberForm random_strong_q_positive_20(int n, std::mt19937_64& rng);

FiberForm unit_scalar(int n);

/// Matrix of the blockwise R map on the full degree-k coefficient basis
/// (output supported on the (k,0) block). Cached per (n, k).
const Eigen::MatrixXcd& R_full_matrix(int n, int degree);

}  // namespace hkt
