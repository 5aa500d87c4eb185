#pragma once

// Rigid-body dynamics of a serial chain. All spatial quantities are
// expressed in world axes about the world origin, with motion vectors
// ordered [angular; linear].

#include "phbench/model.hpp"

#include <Eigen/Core>

#include <vector>

namespace phbench {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix6Xd = Eigen::Matrix<double, 6, Eigen::Dynamic>;

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

struct CartesianState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d orientation = Eigen::Matrix3d::Identity();
  /// Selected task rows of [v (world); w (end-effector axes)]; empty when
  /// only the pose was requested.
  Eigen::VectorXd twist;

  Pose pose() const { return {position, orientation}; }
};

struct TaskSpaceModel {
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd gamma;
  Eigen::MatrixXd jacobian;
  Eigen::MatrixXd jacobian_dot;
};

/// Per-configuration kinematic data shared by the algorithms below.
struct ChainKinematics {
  std::vector<Eigen::Matrix3d> link_rotation;
  std::vector<Eigen::Vector3d> link_position;
  Matrix6Xd axes;                  // motion subspace of each joint
  std::vector<Matrix6d> inertia;   // spatial inertia of each link
  Eigen::Matrix3d ee_rotation;
  Eigen::Vector3d ee_position;
};

Matrix6d motion_cross(const Vector6d& v);
Matrix6d force_cross(const Vector6d& v);

ChainKinematics chain_kinematics(const RobotModel& model, const Eigen::VectorXd& q);

CartesianState forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q);
/// Pose plus task twist J(q) qd.
CartesianState end_effector_state(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd);

Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q);
/// dM/dq_k for k = 0..n-1.
std::vector<Eigen::MatrixXd> mass_matrix_derivatives(const RobotModel& model, const Eigen::VectorXd& q);
Eigen::VectorXd gravity_vector(const RobotModel& model, const Eigen::VectorXd& q);
/// C(q, qd) qd + g(q).
Eigen::VectorXd bias_forces(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd);
/// Christoffel-consistent Coriolis matrix (Mdot - 2C skew-symmetric).
Eigen::MatrixXd coriolis_matrix(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd);
Eigen::VectorXd inverse_dynamics(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& qdd);

/// Potential energy -sum m_i g.c_i with the world origin as datum.
double potential_energy(const RobotModel& model, const Eigen::VectorXd& q);

/// Full 6 x n Jacobian of the end-effector point: rows [v (world); w (end-effector axes)].
Eigen::MatrixXd full_jacobian(const RobotModel& model, const Eigen::VectorXd& q);
Eigen::MatrixXd geometric_jacobian(const RobotModel& model, const Eigen::VectorXd& q);
Eigen::MatrixXd jacobian_dot(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd);

struct TaskSpaceOptions {
  double singular_threshold = 1e-4;
};

/// Throws SingularConfiguration when sigma_min(J) < options.singular_threshold.
TaskSpaceModel task_space_model(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                const TaskSpaceOptions& options = {});

/// qdd = M^-1 (tau + J^T f_ext - C qd - g); f_ext has the task dimension (may be empty).
Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& tau, const Eigen::VectorXd& f_ext);

/// Task coordinates of a pose: position rows as-is, rotation rows as the rotation vector log(R).
Eigen::VectorXd task_coordinates(const RobotModel& model, const Pose& pose);
Pose pose_from_task_coordinates(const RobotModel& model, const Eigen::VectorXd& x, const Pose& fill);
/// e = x - x_d: position difference and log(R_d^T R) on the selected rows.
Eigen::VectorXd task_error(const RobotModel& model, const Pose& pose, const Pose& desired);

}  // namespace phbench
