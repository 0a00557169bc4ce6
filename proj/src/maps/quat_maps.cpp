#include "hkt/quat_maps.hpp"

#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "hkt/nnls.hpp"

namespace hkt {

namespace {

constexpr cdouble kI{0.0, 1.0};

// Lebesgue coefficient of a top-degree form.
cdouble lebesgue_coeff(const FiberForm& top) {
  const FiberContext& ctx = FiberContext::get(top.n);
  if (top.degree != ctx.frame_dim)
    throw std::invalid_argument("top_coefficient: not a top-degree form");
  return top.coeffs[0] * ctx.top_basis_to_lebesgue;
}

// Lebesgue coefficient of the positively oriented unit volume of (R^{4n}, I),
// prod_c (i/2) dz_c ^ dzbar_c.
double orientation(int n) {
  static std::mutex mu;
  static std::map<int, double> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const FiberContext& ctx = FiberContext::get(n);
  FiberForm vol = unit_scalar(n);
  for (int c = 0; c < ctx.hol_dim; ++c) {
    FiberForm pair{n, 2, Eigen::VectorXcd::Zero(ctx.idx.dim(2))};
    pair.coeffs[ctx.idx.rank_of((1u << (2 * c)) | (1u << (2 * c + 1)))] = 0.5 * kI;
    vol = wedge(vol, pair);
  }
  const double o = std::real(vol.coeffs[0] * ctx.top_basis_to_lebesgue);
  cache[n] = o;
  return o;
}

double pos_tol(double scale) { return 1e-10 * (scale + 1e-300); }

Eigen::VectorXd stack_reim(const Eigen::VectorXcd& v) {
  Eigen::VectorXd out(2 * v.size());
  out << v.real(), v.imag();
  return out;
}

}  // namespace

FiberForm unit_scalar(int n) {
  FiberForm one{n, 0, Eigen::VectorXcd::Ones(1)};
  return one;
}

cdouble top_coefficient(const FiberForm& top) {
  return lebesgue_coeff(top) / orientation(top.n);
}

cdouble coefficient_vs_theta(const FiberForm& eta, const ThetaForm& theta) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  const int r = ctx.block(2 * ctx.n, 0)[0];
  return eta.coeffs[r] / theta.form.coeffs[r];
}

FiberForm R_map(const FiberForm& eta) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  if (eta.degree == 0) return eta;
  if (eta.degree > 2 * ctx.n) throw std::invalid_argument("R_map: degree exceeds 2n");
  auto bd = pure_bidegree(eta);
  if (!bd) throw std::invalid_argument("R_map: input has mixed bidegree");
  const auto [p, q] = *bd;
  const int k = p + q;
  Eigen::VectorXcd plus = ctx.plus_projector(k) * eta.coeffs;
  Eigen::VectorXcd lam = ctx.psi_solver(p, q).solve(plus);
  FiberForm out{eta.n, k, Eigen::VectorXcd::Zero(ctx.idx.dim(k))};
  const std::vector<int>& hol = ctx.block(k, 0);
  for (size_t i = 0; i < hol.size(); ++i) out.coeffs[hol[i]] = lam[i];
  return out;
}

const Eigen::MatrixXcd& R_full_matrix(int n, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, Eigen::MatrixXcd> cache;
  std::scoped_lock lock(mu);
  auto key = std::make_pair(n, degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const FiberContext& ctx = FiberContext::get(n);
  const int D = ctx.idx.dim(degree);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(D, D);
  for (int r = 0; r < D; ++r) {
    FiberForm unit{n, degree, Eigen::VectorXcd::Zero(D)};
    unit.coeffs[r] = 1.0;
    M.col(r) = R_blockwise(unit).coeffs;
  }
  return cache.emplace(key, std::move(M)).first->second;
}

FiberForm R_blockwise(const FiberForm& eta) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  const int k = eta.degree;
  FiberForm out{eta.n, k, Eigen::VectorXcd::Zero(ctx.idx.dim(k))};
  for (int p = 0; p <= k; ++p) {
    FiberForm part = bidegree_part(eta, p, k - p);
    if (part.norm() == 0.0) continue;
    out += R_map(part);
  }
  return out;
}

double R_conjugation_residual(const FiberForm& eta) {
  auto bd = pure_bidegree(eta);
  if (!bd) throw std::invalid_argument("R_conjugation_residual: mixed bidegree");
  const int p = bd->first;
  FiberForm lhs = R_map(conj_form(eta));
  FiberForm rhs = conj_form(extend_J(R_map(eta)));
  rhs *= (p % 2 == 0) ? 1.0 : -1.0;
  return (lhs - rhs).norm();
}

namespace {

// Wedge pairing matrix for V at (n, p): rows are (n-p,n-p) test basis forms,
// columns the (n+p,n+p) basis; entries are top-form merge signs.
const Eigen::PartialPivLU<Eigen::MatrixXcd>& v_pairing_lu(int n, int p) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXcd>>>
      cache;
  std::scoped_lock lock(mu);
  auto key = std::make_pair(n, p);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  const FiberContext& ctx = FiberContext::get(n);
  const std::vector<int>& target = ctx.block(n + p, n + p);
  const std::vector<int>& tests = ctx.block(n - p, n - p);
  if (target.size() != tests.size())
    throw std::logic_error("v_pairing_lu: block dimension mismatch");
  const int D = static_cast<int>(target.size());
  const uint32_t full = (ctx.frame_dim == 32) ? ~0u : ((1u << ctx.frame_dim) - 1u);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(D, D);
  for (int j = 0; j < D; ++j) {
    const uint32_t mj = ctx.idx.mask_of(2 * (n - p), tests[j]);
    for (int i = 0; i < D; ++i) {
      const uint32_t mi = ctx.idx.mask_of(2 * (n + p), target[i]);
      if ((mi & mj) == 0 && (mi | mj) == full)
        M(j, i) = static_cast<double>(IndexTables::merge_sign(mi, mj));
    }
  }
  auto lu = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXcd>>(M);
  return *cache.emplace(key, std::move(lu)).first->second;
}

}  // namespace

FiberForm V_map(const FiberForm& eta, const ThetaForm& theta) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  const int n = ctx.n;
  if (eta.degree % 2 != 0) throw std::invalid_argument("V_map: degree must be even");
  const int p = eta.degree / 2;
  if (p > n) throw std::invalid_argument("V_map: degree exceeds 2n");

  const FiberForm theta_bar = conj_form(theta.form);
  const std::vector<int>& tests = ctx.block(n - p, n - p);
  const std::vector<int>& target = ctx.block(n + p, n + p);
  const int D = static_cast<int>(tests.size());
  Eigen::VectorXcd rhs(D);
  for (int j = 0; j < D; ++j) {
    FiberForm xi{eta.n, 2 * (n - p), Eigen::VectorXcd::Zero(ctx.idx.dim(2 * (n - p)))};
    xi.coeffs[tests[j]] = 1.0;
    FiberForm prod = wedge(wedge(eta, R_map(xi)), theta_bar);
    rhs[j] = prod.coeffs[0];
  }
  Eigen::VectorXcd v = v_pairing_lu(n, p).solve(rhs);
  FiberForm out{eta.n, 2 * (n + p), Eigen::VectorXcd::Zero(ctx.idx.dim(2 * (n + p)))};
  for (int i = 0; i < D; ++i) out.coeffs[target[i]] = v[i];
  return out;
}

ThetaForm make_theta(int n, double scale) {
  if (scale <= 0) throw std::invalid_argument("make_theta: scale must be positive");
  const FiberContext& ctx = FiberContext::get(n);
  FiberForm omega0 = hkt_fiber(ctx.H);
  FiberForm theta = unit_scalar(n);
  double fact = 1.0;
  for (int i = 1; i <= n; ++i) {
    theta = wedge(theta, omega0);
    fact *= i;
  }
  theta *= scale / fact;
  ThetaForm out{theta};
  if (!check_q_real(theta)) throw std::runtime_error("make_theta: fiber is not q-real");
  return out;
}

PhiForm make_phi(const ThetaForm& theta) {
  // V(1) is real only up to the factor (sqrt(-1))^n; the rescaled form is the
  // real representative, and every use of Phi is scale-invariant.
  FiberForm phi = V_map(unit_scalar(theta.form.n), theta);
  phi *= std::pow(kI, theta.form.n);
  return {phi};
}

bool check_q_real(const FiberForm& eta, double rel_tol) {
  const double nrm = eta.norm();
  return (eta - extend_J(conj_form(eta))).norm() <= rel_tol * (nrm > 0 ? nrm : 1.0);
}

PositivityVerdict check_strong_q_positive(const FiberForm& eta, int samples,
                                          std::mt19937_64& rng) {
  Eigen::MatrixXd S = q_quadratic_form(eta);  // throws on non-q-real input
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  double margin = es.eigenvalues().minCoeff();
  int argmin = 0;
  es.eigenvalues().minCoeff(&argmin);
  Eigen::VectorXd wit = es.eigenvectors().col(argmin);

  std::normal_distribution<double> dist;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd X(S.rows());
    for (int i = 0; i < X.size(); ++i) X[i] = dist(rng);
    X.normalize();
    const double v = X.dot(S * X);
    if (v < margin) {
      margin = v;
      wit = X;
    }
  }
  PositivityVerdict out;
  out.margin = margin;
  const double tol = pos_tol(S.norm());
  if (margin > tol) {
    out.status = Positivity::strongly_positive;
  } else if (margin < -tol) {
    out.status = Positivity::not_positive;
    out.witness = wit;
  } else {
    out.status = Positivity::boundary;
  }
  return out;
}

FiberForm random_form(int n, int degree, std::mt19937_64& rng) {
  const FiberContext& ctx = FiberContext::get(n);
  std::normal_distribution<double> dist;
  FiberForm out{n, degree, Eigen::VectorXcd(ctx.idx.dim(degree))};
  for (int r = 0; r < out.coeffs.size(); ++r) out.coeffs[r] = cdouble(dist(rng), dist(rng));
  return out;
}

FiberForm random_bidegree_form(int n, int p, int q, std::mt19937_64& rng) {
  const FiberContext& ctx = FiberContext::get(n);
  std::normal_distribution<double> dist;
  FiberForm out{n, p + q, Eigen::VectorXcd::Zero(ctx.idx.dim(p + q))};
  for (int r : ctx.block(p, q)) out.coeffs[r] = cdouble(dist(rng), dist(rng));
  return out;
}

FiberForm random_strongly_positive_pp(int n, int p, int terms, std::mt19937_64& rng) {
  const FiberContext& ctx = FiberContext::get(n);
  std::normal_distribution<double> dist;
  if (p == 0) {
    FiberForm out = unit_scalar(n);
    out *= std::abs(dist(rng)) + 0.5;
    return out;
  }
  FiberForm acc{n, 2 * p, Eigen::VectorXcd::Zero(ctx.idx.dim(2 * p))};
  for (int t = 0; t < terms; ++t) {
    FiberForm prod = unit_scalar(n);
    for (int r = 0; r < p; ++r) {
      FiberForm a{n, 1, Eigen::VectorXcd::Zero(ctx.frame_dim)};
      for (int c = 0; c < ctx.hol_dim; ++c) a.coeffs[2 * c] = cdouble(dist(rng), dist(rng));
      FiberForm pos = wedge(a, conj_form(a));
      pos *= -kI;
      prod = wedge(prod, pos);
    }
    acc += prod;
  }
  return acc;
}

FiberForm random_strong_q_positive_20(int n, std::mt19937_64& rng) {
  FiberForm pp = random_strongly_positive_pp(n, 1, 2 * n, rng);
  FiberForm out = R_map(pp);
  out *= kI;
  Eigen::MatrixXd S = q_quadratic_form(out);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.eigenvalues().minCoeff() < -1e-9 * (S.norm() + 1.0))
    throw std::logic_error("random_strong_q_positive_20: sample failed PSD certificate");
  return out;
}

PositivityVerdict check_positive_2p(const FiberForm& eta, PositivityMode mode, int samples,
                                    std::mt19937_64& rng, const ThetaForm& theta) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  const int n = ctx.n;
  if (eta.degree % 2 != 0) throw std::invalid_argument("check_positive_2p: odd degree");
  const int p = eta.degree / 2;
  if (!check_q_real(eta, 1e-9)) throw std::invalid_argument("check_positive_2p: input not q-real");

  if (p == 1) return check_strong_q_positive(eta, samples, rng);

  const double enorm = eta.norm() + 1e-300;
  if (p == n) {
    const cdouble c = coefficient_vs_theta(eta, theta);
    PositivityVerdict out;
    out.margin = std::real(c) * theta.form.norm() / enorm;
    const double tol = pos_tol(1.0);
    if (out.margin > tol)
      out.status = Positivity::strongly_positive;
    else if (out.margin < -tol) {
      out.status = Positivity::not_positive;
      out.witness = stack_reim(Eigen::VectorXcd::Ones(1));
    } else
      out.status = Positivity::boundary;
    return out;
  }

  // Weak-mode pairing against sampled products of q-positive (2,0)-forms.
  auto weak_check = [&](int count) {
    PositivityVerdict out;
    out.margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < count; ++s) {
      FiberForm xi = unit_scalar(eta.n);
      for (int r = 0; r < n - p; ++r) xi = wedge(xi, random_strong_q_positive_20(eta.n, rng));
      const double c =
          std::real(coefficient_vs_theta(wedge(eta, xi), theta)) / (enorm * (xi.norm() + 1e-300));
      if (c < out.margin) {
        out.margin = c;
        if (c < -pos_tol(1.0)) out.witness = stack_reim(xi.coeffs);
      }
    }
    const double tol = pos_tol(1.0);
    out.status = out.margin > tol ? Positivity::strongly_positive
                 : out.margin < -tol ? Positivity::not_positive
                                     : Positivity::boundary;
    return out;
  };

  PositivityVerdict weak = weak_check(samples);
  if (mode == PositivityMode::weak) return weak;

  // Strong mode: nonnegative fit over sampled generators of the cone.
  const std::vector<int>& blk = ctx.block(2 * p, 0);
  Eigen::MatrixXd A(2 * blk.size(), samples);
  for (int s = 0; s < samples; ++s) {
    FiberForm g = unit_scalar(eta.n);
    for (int r = 0; r < p; ++r) g = wedge(g, random_strong_q_positive_20(eta.n, rng));
    Eigen::VectorXcd gb(blk.size());
    for (size_t i = 0; i < blk.size(); ++i) gb[i] = g.coeffs[blk[i]];
    A.col(s) = stack_reim(gb);
  }
  Eigen::VectorXcd eb(blk.size());
  for (size_t i = 0; i < blk.size(); ++i) eb[i] = eta.coeffs[blk[i]];
  Eigen::VectorXd b = stack_reim(eb);
  Eigen::VectorXd x = nnls(A, b);
  const double rel_res = (A * x - b).norm() / enorm;

  PositivityVerdict out = weak;
  if (rel_res <= 1e-9) {
    out.status = Positivity::strongly_positive;
  } else if (weak.status == Positivity::strongly_positive) {
    out.status = Positivity::weakly_positive_only;
  }
  return out;
}

PositivityVerdict check_phi_positive(const FiberForm& eta, const PhiForm& phi, int samples,
                                     std::mt19937_64& rng) {
  const FiberContext& ctx = FiberContext::get(eta.n);
  const int n = ctx.n;
  const double enorm = eta.norm() + 1e-300;
  PositivityVerdict out;
  out.margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    FiberForm nu = random_strongly_positive_pp(eta.n, n - 1, 2, rng);
    const FiberForm top = wedge(wedge(phi.form, nu), eta);
    const double c = std::real(top_coefficient(top)) /
                     (enorm * (nu.norm() + 1e-300) * (phi.form.norm() + 1e-300));
    if (c < out.margin) {
      out.margin = c;
      if (c < 0) out.witness = stack_reim(nu.coeffs);
    }
  }
  const double tol = pos_tol(1.0);
  out.status = out.margin > tol ? Positivity::strongly_positive
               : out.margin < -tol ? Positivity::not_positive
                                   : Positivity::boundary;
  if (out.status != Positivity::not_positive) out.witness.reset();
  return out;
}

}  // namespace hkt
