#include "hkt/fiber_context.hpp"

#include <cmath>
#include <stdexcept>

namespace hkt {

namespace {
constexpr cdouble kI{0.0, 1.0};

double factorial(int k) {
  double r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}
}  // namespace

const FiberContext& FiberContext::get(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<FiberContext>> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::unique_ptr<FiberContext>(new FiberContext(n))).first;
  return *it->second;
}

FiberContext::FiberContext(int n_)
    : n(n_), frame_dim(4 * n_), hol_dim(2 * n_), H(standard_structure(n_)), idx(4 * n_) {
  const int F = frame_dim;
  frame_to_real = Eigen::MatrixXcd::Zero(F, F);
  for (int c = 0; c < hol_dim; ++c) {
    const int A = 4 * (c / 2) + 2 * (c % 2);
    const double s = (c % 2 == 0) ? 1.0 : -1.0;  // dz = dx + i*s*dy
    frame_to_real(2 * c, A) = 1.0;
    frame_to_real(2 * c, A + 1) = kI * s;
    frame_to_real(2 * c + 1, A) = 1.0;
    frame_to_real(2 * c + 1, A + 1) = -kI * s;
  }
  real_to_frame = frame_to_real.transpose().inverse();
  for (int L = 0; L < 3; ++L)
    cov[L] = real_to_frame * H.covector_action(L).cast<cdouble>() * frame_to_real.transpose();
  top_basis_to_lebesgue = frame_to_real.determinant();
}

const Eigen::MatrixXcd& FiberContext::ad_matrix(int L, int k) const {
  std::scoped_lock lock(mu_);
  auto key = std::make_pair(L, k);
  auto it = ad_.find(key);
  if (it != ad_.end()) return it->second;

  const int D = idx.dim(k);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(D, D);
  for (int r = 0; r < D; ++r) {
    const uint32_t mask = idx.mask_of(k, r);
    uint32_t mm = mask;
    while (mm) {
      const int f = std::countr_zero(mm);
      mm &= mm - 1;
      const uint32_t rest = mask & ~(1u << f);
      const int sf = std::popcount(rest & ((1u << f) - 1));
      for (int g = 0; g < frame_dim; ++g) {
        const cdouble c = cov[L](g, f);
        if (c == 0.0) continue;
        if (rest & (1u << g)) continue;  // repeated covector
        const int sg = std::popcount(rest & ((1u << g) - 1));
        const double sign = ((sf + sg) & 1) ? -1.0 : 1.0;
        M(idx.rank_of(rest | (1u << g)), r) += sign * c;
      }
    }
  }
  return ad_.emplace(key, std::move(M)).first->second;
}

FiberForm FiberContext::wedge_vectors(const std::vector<Eigen::VectorXcd>& vs) const {
  const int k = static_cast<int>(vs.size());
  FiberForm out{n, k, Eigen::VectorXcd::Zero(idx.dim(k))};
  // Depth-first expansion over frame indices per factor.
  struct Frame {
    uint32_t mask;
    cdouble coeff;
    int depth;
  };
  std::vector<Frame> stack{{0u, cdouble(1.0), 0}};
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    if (fr.depth == k) {
      out.coeffs[idx.rank_of(fr.mask)] += fr.coeff;
      continue;
    }
    const Eigen::VectorXcd& v = vs[fr.depth];
    for (int g = 0; g < frame_dim; ++g) {
      if (v[g] == 0.0) continue;
      if (fr.mask & (1u << g)) continue;
      const int inv = std::popcount(fr.mask >> (g + 1));
      const double sign = (inv & 1) ? -1.0 : 1.0;
      stack.push_back({fr.mask | (1u << g), fr.coeff * v[g] * sign, fr.depth + 1});
    }
  }
  return out;
}

const Eigen::MatrixXcd& FiberContext::mult_matrix(int L, int k) const {
  {
    std::scoped_lock lock(mu_);
    auto it = mult_.find({L, k});
    if (it != mult_.end()) return it->second;
  }
  const int D = idx.dim(k);
  Eigen::MatrixXcd M(D, D);
  for (int r = 0; r < D; ++r) {
    uint32_t mask = idx.mask_of(k, r);
    std::vector<Eigen::VectorXcd> vs;
    while (mask) {
      const int f = std::countr_zero(mask);
      mask &= mask - 1;
      vs.push_back(cov[L].col(f));
    }
    M.col(r) = wedge_vectors(vs).coeffs;
  }
  std::scoped_lock lock(mu_);
  return mult_.emplace(std::make_pair(L, k), std::move(M)).first->second;
}

const FiberContext::WeightDecomposition& FiberContext::weight_decomposition(int k) const {
  {
    std::scoped_lock lock(mu_);
    auto it = wd_.find(k);
    if (it != wd_.end()) return it->second;
  }
  const Eigen::MatrixXcd& aI = ad_matrix(L_I, k);
  const Eigen::MatrixXcd& aJ = ad_matrix(L_J, k);
  const Eigen::MatrixXcd& aK = ad_matrix(L_K, k);
  Eigen::MatrixXcd cas = -(aI * aI + aJ * aJ + aK * aK);
  cas = 0.5 * (cas + cas.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cas);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("weight_decomposition: eigensolver failed");

  WeightDecomposition wd;
  const auto& evals = es.eigenvalues();
  const auto& evecs = es.eigenvectors();
  const int D = static_cast<int>(evals.size());
  std::map<int, std::vector<int>> groups;  // weight -> eigenvector columns
  for (int i = 0; i < D; ++i) {
    const double lam = std::max(0.0, evals[i]);
    const int w = static_cast<int>(std::lround(-1.0 + std::sqrt(1.0 + lam)));
    if (std::abs(lam - double(w) * (w + 2)) > 1e-7 * (1.0 + lam))
      throw std::runtime_error("weight_decomposition: non-integral su(2) weight");
    groups[w].push_back(i);
  }
  for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
    Eigen::MatrixXcd U(D, it->second.size());
    for (size_t j = 0; j < it->second.size(); ++j) U.col(j) = evecs.col(it->second[j]);
    wd.weights.push_back(it->first);
    wd.proj.push_back(U * U.adjoint());
  }
  std::scoped_lock lock(mu_);
  return wd_.emplace(k, std::move(wd)).first->second;
}

const Eigen::MatrixXcd& FiberContext::plus_projector(int k) const {
  if (k > 2 * n) throw std::invalid_argument("plus_projector: degree exceeds 2n");
  const WeightDecomposition& wd = weight_decomposition(k);
  for (size_t i = 0; i < wd.weights.size(); ++i)
    if (wd.weights[i] == k) return wd.proj[i];
  throw std::runtime_error("plus_projector: top weight component missing");
}

const std::vector<FiberContext::WedgeEntry>& FiberContext::wedge_table(int k1, int k2) const {
  std::scoped_lock lock(mu_);
  auto key = std::make_pair(k1, k2);
  auto it = wedge_.find(key);
  if (it != wedge_.end()) return it->second;

  std::vector<WedgeEntry> tab;
  const int k = k1 + k2;
  if (k <= frame_dim) {
    for (int r1 = 0; r1 < idx.dim(k1); ++r1) {
      const uint32_t m1 = idx.mask_of(k1, r1);
      for (int r2 = 0; r2 < idx.dim(k2); ++r2) {
        const uint32_t m2 = idx.mask_of(k2, r2);
        if (m1 & m2) continue;
        tab.push_back({r1, r2, idx.rank_of(m1 | m2),
                       static_cast<double>(IndexTables::merge_sign(m1, m2))});
      }
    }
  }
  return wedge_.emplace(key, std::move(tab)).first->second;
}

const std::vector<int>& FiberContext::block(int p, int q) const {
  std::scoped_lock lock(mu_);
  auto key = std::make_pair(p, q);
  auto it = blocks_.find(key);
  if (it != blocks_.end()) return it->second;
  return blocks_.emplace(key, idx.block_ranks(p, q)).first->second;
}

const Eigen::MatrixXcd& FiberContext::psi(int p, int q) const {
  {
    std::scoped_lock lock(mu_);
    auto it = psi_.find({p, q});
    if (it != psi_.end()) return it->second;
  }
  const int k = p + q;
  const std::vector<int>& hol = block(k, 0);
  const int S = static_cast<int>(hol.size());
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(idx.dim(k), S);
  const double scale = factorial(p) * factorial(q) / factorial(k);

  for (int col = 0; col < S; ++col) {
    uint32_t mask = idx.mask_of(k, hol[col]);
    std::vector<int> fs;
    while (mask) {
      fs.push_back(std::countr_zero(mask));
      mask &= mask - 1;
    }
    // Sum over placements of q copies of h2 = J among the k factors.
    for (uint32_t S_bits = 0; S_bits < (1u << k); ++S_bits) {
      if (std::popcount(S_bits) != q) continue;
      std::vector<Eigen::VectorXcd> vs;
      vs.reserve(k);
      for (int i = 0; i < k; ++i) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(frame_dim);
        e[fs[i]] = 1.0;
        vs.push_back((S_bits & (1u << i)) ? Eigen::VectorXcd(cov[L_J] * e) : e);
      }
      M.col(col) += scale * wedge_vectors(vs).coeffs;
    }
  }
  std::scoped_lock lock(mu_);
  return psi_.emplace(std::make_pair(p, q), std::move(M)).first->second;
}

const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd>& FiberContext::psi_solver(
    int p, int q) const {
  const Eigen::MatrixXcd& M = psi(p, q);
  std::scoped_lock lock(mu_);
  auto key = std::make_pair(p, q);
  auto it = psi_cod_.find(key);
  if (it != psi_cod_.end()) return *it->second;
  auto cod = std::make_unique<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd>>(M);
  return *psi_cod_.emplace(key, std::move(cod)).first->second;
}

}  // namespace hkt
