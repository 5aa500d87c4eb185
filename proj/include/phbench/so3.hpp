#pragma once

#include <Eigen/Core>

namespace phbench {

/// Skew-symmetric cross-product matrix: skew(a) * b == a.cross(b).
Eigen::Matrix3d skew(const Eigen::Vector3d& a);

/// Rotation vector (axis * angle, angle in [0, pi]) of a rotation matrix.
Eigen::Vector3d log_so3(const Eigen::Matrix3d& R);

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w);

}  // namespace phbench
