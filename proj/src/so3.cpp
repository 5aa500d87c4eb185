#include "phbench/so3.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace phbench {

Eigen::Matrix3d skew(const Eigen::Vector3d& a) {
  Eigen::Matrix3d m;
  m << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return m;
}

Eigen::Vector3d log_so3(const Eigen::Matrix3d& R) {
  Eigen::Quaterniond quat(R);
  quat.normalize();
  if (quat.w() < 0.0) quat.coeffs() *= -1.0;
  const Eigen::Vector3d v = quat.vec();
  const double s = v.norm();
  if (s < 1e-12) {
    // angle ~ 2 s / w; first-order series is exact to rounding here
    return 2.0 * v / quat.w();
  }
  return (2.0 * std::atan2(s, quat.w()) / s) * v;
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w) {
  const double angle = w.norm();
  if (angle < 1e-15) return Eigen::Matrix3d::Identity() + skew(w);
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

}  // namespace phbench
