#include "hkt/nnls.hpp"

#include <limits>
#include <vector>

namespace hkt {

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter) {
  const int ncol = static_cast<int>(A.cols());
  if (max_iter <= 0) max_iter = 3 * ncol + 30;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ncol);
  std::vector<bool> active(ncol, false);
  const double tol = 1e-12 * (A.norm() + b.norm() + 1.0);

  auto solve_passive = [&](const std::vector<int>& P) {
    Eigen::MatrixXd Ap(A.rows(), P.size());
    for (size_t j = 0; j < P.size(); ++j) Ap.col(j) = A.col(P[j]);
    return Eigen::VectorXd(Ap.colPivHouseholderQr().solve(b));
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    int best = -1;
    double wmax = tol;
    for (int j = 0; j < ncol; ++j)
      if (!active[j] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    if (best < 0) break;
    active[best] = true;

    for (;;) {
      std::vector<int> P;
      for (int j = 0; j < ncol; ++j)
        if (active[j]) P.push_back(j);
      Eigen::VectorXd z = solve_passive(P);
      double alpha = 1.0;
      for (size_t j = 0; j < P.size(); ++j)
        if (z[j] <= 0) alpha = std::min(alpha, x[P[j]] / (x[P[j]] - z[j]));
      if (alpha >= 1.0) {
        for (size_t j = 0; j < P.size(); ++j) x[P[j]] = z[j];
        break;
      }
      for (size_t j = 0; j < P.size(); ++j) {
        x[P[j]] += alpha * (z[j] - x[P[j]]);
        if (x[P[j]] <= tol) {
          x[P[j]] = 0;
          active[P[j]] = false;
        }
      }
    }
  }
  return x;
}

}  // namespace hkt
