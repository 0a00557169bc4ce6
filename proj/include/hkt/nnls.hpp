#pragma once

#include <Eigen/Dense>

namespace hkt {

/// Lawson-Hanson active-set solve of min ||A x - b|| subject to x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter = 0);

}  // namespace hkt
