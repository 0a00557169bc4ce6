#include "hkt/structure.hpp"

#include "hkt/quaternion.hpp"

namespace hkt {

namespace {

// 4x4 matrix of right multiplication by unit quaternion u on coordinate
// vectors (w,x,y,z): column m is the coordinates of e_m * u.
Eigen::Matrix4d right_mult(const Quaternion& u) {
  Eigen::Matrix4d M;
  const Quaternion basis[4] = {quat_one, quat_i, quat_j, quat_k};
  for (int m = 0; m < 4; ++m) {
    Quaternion r = basis[m] * u;
    M(0, m) = r.w;
    M(1, m) = r.x;
    M(2, m) = r.y;
    M(3, m) = r.z;
  }
  return M;
}

}  // namespace

HypercomplexStructure standard_structure(int n) {
  if (n < 1) throw std::invalid_argument("standard_structure: n must be >= 1");
  HypercomplexStructure H;
  H.n = n;
  const int d = 4 * n;
  H.I_mat = Eigen::MatrixXd::Zero(d, d);
  H.J_mat = Eigen::MatrixXd::Zero(d, d);
  H.K_mat = Eigen::MatrixXd::Zero(d, d);
  H.g = Eigen::MatrixXd::Identity(d, d);
  const Quaternion units[3] = {quat_i, quat_j, quat_k};
  Eigen::MatrixXd* mats[3] = {&H.I_mat, &H.J_mat, &H.K_mat};
  for (int u = 0; u < 3; ++u) {
    Eigen::Matrix4d block = right_mult(units[u]).transpose();  // covector action
    for (int a = 0; a < n; ++a)
      mats[u]->block<4, 4>(4 * a, 4 * a) = block;
  }
  return H;
}

}  // namespace hkt
