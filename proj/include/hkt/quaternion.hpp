#pragma once

#include <cmath>

namespace hkt {

/// Real quaternion w + x*i + y*j + z*k.
struct Quaternion {
  double w = 0, x = 0, y = 0, z = 0;

  friend Quaternion operator+(const Quaternion& a, const Quaternion& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Quaternion operator-(const Quaternion& a, const Quaternion& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Quaternion operator*(double s, const Quaternion& q) {
    return {s * q.w, s * q.x, s * q.y, s * q.z};
  }
  // Hamilton product, i*j = k.
  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  Quaternion conj() const { return {w, -x, -y, -z}; }
  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
};

inline constexpr Quaternion quat_one{1, 0, 0, 0};
inline constexpr Quaternion quat_i{0, 1, 0, 0};
inline constexpr Quaternion quat_j{0, 0, 1, 0};
inline constexpr Quaternion quat_k{0, 0, 0, 1};

}  // namespace hkt
