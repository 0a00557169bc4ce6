#include "hkt/fiber_algebra.hpp"

#include <stdexcept>

namespace hkt {

namespace {
constexpr cdouble kI{0.0, 1.0};
}

FiberForm wedge(const FiberForm& a, const FiberForm& b) {
  if (a.n != b.n) throw std::invalid_argument("wedge: mismatched fiber dimension");
  const FiberContext& ctx = FiberContext::get(a.n);
  const int k = a.degree + b.degree;
  FiberForm out{a.n, k, Eigen::VectorXcd::Zero(k <= ctx.frame_dim ? ctx.idx.dim(k) : 0)};
  if (k > ctx.frame_dim) {
    out.degree = k;
    return out;  // identically zero above top degree
  }
  for (const auto& e : ctx.wedge_table(a.degree, b.degree))
    out.coeffs[e.rout] += e.sign * a.coeffs[e.r1] * b.coeffs[e.r2];
  return out;
}

FiberForm conj_form(const FiberForm& eta) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  const int k = eta.degree;
  FiberForm out{eta.n, k, Eigen::VectorXcd::Zero(ctx.idx.dim(k))};
  for (int r = 0; r < ctx.idx.dim(k); ++r) {
    const uint32_t mask = ctx.idx.mask_of(k, r);
    // Toggle dz <-> dzbar within each pair; a pair fully present flips order.
    uint32_t cm = 0;
    int pairs_full = 0;
    for (int c = 0; c < ctx.hol_dim; ++c) {
      const uint32_t lo = 1u << (2 * c), hi = 1u << (2 * c + 1);
      if (mask & lo) cm |= hi;
      if (mask & hi) cm |= lo;
      if ((mask & lo) && (mask & hi)) ++pairs_full;
    }
    const double sign = (pairs_full & 1) ? -1.0 : 1.0;
    out.coeffs[ctx.idx.rank_of(cm)] += sign * std::conj(eta.coeffs[r]);
  }
  return out;
}

FiberForm act_on_covector(int L, const FiberForm& alpha) {
  if (alpha.degree != 1) throw std::invalid_argument("act_on_covector: degree must be 1");
  const FiberContext& ctx = FiberContext::get(alpha.n);
  return {alpha.n, 1, ctx.cov[L] * alpha.coeffs};
}

FiberForm extend_J(const FiberForm& eta) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  if (eta.degree == 0) return eta;
  return {eta.n, eta.degree, ctx.mult_matrix(FiberContext::L_J, eta.degree) * eta.coeffs};
}

FiberForm ad_L_derivation(int L, const FiberForm& eta) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  if (eta.degree == 0) return {eta.n, 0, Eigen::VectorXcd::Zero(1)};
  return {eta.n, eta.degree, ctx.ad_matrix(L, eta.degree) * eta.coeffs};
}

FiberForm project_plus(const FiberForm& eta) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  if (eta.degree > 2 * ctx.n) throw std::invalid_argument("project_plus: degree exceeds 2n");
  if (eta.degree == 0) return eta;
  return {eta.n, eta.degree, ctx.plus_projector(eta.degree) * eta.coeffs};
}

FiberForm project_su2_invariant(const FiberForm& eta) {
  auto bd = pure_bidegree(eta);
  if (!bd || *bd != std::make_pair(1, 1))
    throw std::invalid_argument("project_su2_invariant: input must be a (1,1)-form");
  const FiberContext& ctx = FiberContext::get(eta.n);
  Eigen::VectorXcd pulled = ctx.mult_matrix(FiberContext::L_J, 2) * eta.coeffs;
  return {eta.n, 2, 0.5 * (eta.coeffs + pulled)};
}

std::optional<std::pair<int, int>> pure_bidegree(const FiberForm& eta, double rel_tol) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  const double tot = eta.norm();
  const double tol = rel_tol * (tot > 0 ? tot : 1.0);
  std::optional<std::pair<int, int>> found;
  for (int r = 0; r < ctx.idx.dim(eta.degree); ++r) {
    if (std::abs(eta.coeffs[r]) <= tol) continue;
    auto pq = IndexTables::bidegree_of(ctx.idx.mask_of(eta.degree, r));
    if (found && *found != pq) return std::nullopt;
    found = pq;
  }
  if (!found) found = std::make_pair(eta.degree, 0);  // zero form: any tag
  return found;
}

FiberForm bidegree_part(const FiberForm& eta, int p, int q) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  FiberForm out{eta.n, eta.degree, Eigen::VectorXcd::Zero(ctx.idx.dim(eta.degree))};
  for (int r : ctx.block(p, q)) out.coeffs[r] = eta.coeffs[r];
  return out;
}

Eigen::MatrixXcd as_real_matrix(const FiberForm& eta) {
  if (eta.degree != 2) throw std::invalid_argument("as_real_matrix: degree must be 2");
  const FiberContext& ctx = FiberContext::get(eta.n);
  const int d = ctx.frame_dim;
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(d, d);
  for (int r = 0; r < ctx.idx.dim(2); ++r) {
    const cdouble c = eta.coeffs[r];
    if (c == 0.0) continue;
    const uint32_t mask = ctx.idx.mask_of(2, r);
    const int i = std::countr_zero(mask);
    const int j = std::countr_zero(mask & (mask - 1));
    const auto Ei = ctx.frame_to_real.row(i), Ej = ctx.frame_to_real.row(j);
    W += c * (Ei.transpose() * Ej - Ej.transpose() * Ei);
  }
  return W;
}

FiberForm from_real_matrix(int n, const Eigen::MatrixXcd& W) {
  const FiberContext& ctx = FiberContext::get(n);
  Eigen::MatrixXcd M = ctx.real_to_frame * W * ctx.real_to_frame.transpose();
  FiberForm out{n, 2, Eigen::VectorXcd::Zero(ctx.idx.dim(2))};
  for (int r = 0; r < ctx.idx.dim(2); ++r) {
    const uint32_t mask = ctx.idx.mask_of(2, r);
    const int i = std::countr_zero(mask);
    const int j = std::countr_zero(mask & (mask - 1));
    out.coeffs[r] = M(i, j);
  }
  return out;
}

OmegaForms omega_forms(const HypercomplexStructure& H) {
  OmegaForms out;
  FiberForm* dst[3] = {&out.omega_I, &out.omega_J, &out.omega_K};
  for (int L = 0; L < 3; ++L) {
    Eigen::MatrixXd W = H.g * H.covector_action(L).transpose();
    if ((W + W.transpose()).norm() > 1e-12 * W.norm())
      throw std::runtime_error("omega_forms: metric is not quaternionic Hermitian");
    *dst[L] = from_real_matrix(H.n, W.cast<cdouble>());
  }
  return out;
}

FiberForm hkt_fiber(const HypercomplexStructure& H) {
  OmegaForms w = omega_forms(H);
  FiberForm out = w.omega_K;
  out *= kI;
  out -= w.omega_J;
  return out;
}

Eigen::MatrixXd q_quadratic_form(const FiberForm& eta) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  Eigen::MatrixXcd W = as_real_matrix(eta);
  Eigen::MatrixXcd A = W * ctx.H.J_mat.transpose().cast<cdouble>();
  Eigen::MatrixXcd S = 0.5 * (A + A.transpose().eval());
  if (S.imag().norm() > 1e-9 * (1.0 + S.norm()))
    throw std::invalid_argument("q_quadratic_form: form is not q-real");
  return S.real();
}

}  // namespace hkt
