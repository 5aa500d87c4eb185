#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace phbench {

enum class JointKind { revolute, prismatic };

struct JointSpec {
  JointKind kind = JointKind::revolute;
  /// Unit motion axis, expressed in the joint frame.
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  /// Pose of the joint frame in the parent link frame (translation, then roll-pitch-yaw).
  Eigen::Vector3d origin_xyz = Eigen::Vector3d::Zero();
  Eigen::Vector3d origin_rpy = Eigen::Vector3d::Zero();
  std::optional<std::pair<double, double>> position_limits;

  Eigen::Matrix3d origin_rotation() const;

  friend bool operator==(const JointSpec&, const JointSpec&) = default;
};

struct LinkSpec {
  double mass = 1.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  /// Rotational inertia about the centre of mass, in the link frame.
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();

  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

/// Serial chain: link i is the child of joint i, link -1 is the fixed base.
///
/// The task is the end-effector point `end_effector_offset` on link
/// `end_effector_link`; `task_rows` selects rows of the 6-D twist
/// [v_x v_y v_z w_x w_y w_z] (linear part in world axes, angular part in
/// end-effector axes) that make up the k task coordinates.
struct RobotModel {
  std::string name;
  Eigen::Vector3d gravity = Eigen::Vector3d(0.0, 0.0, -9.81);
  std::vector<JointSpec> joints;
  std::vector<LinkSpec> links;
  int end_effector_link = 0;
  Eigen::Vector3d end_effector_offset = Eigen::Vector3d::Zero();
  std::vector<int> task_rows{0, 1, 2};

  int dof() const { return static_cast<int>(joints.size()); }
  int task_dim() const { return static_cast<int>(task_rows.size()); }
  double total_mass() const;

  friend bool operator==(const RobotModel&, const RobotModel&) = default;
};

/// Throws ModelError when an invariant of the serial-chain description fails.
void validate(const RobotModel& model);

RobotModel parse_model(std::string_view text);
std::string serialize_model(const RobotModel& model);

/// One of planar2, gantry3, arm6, leg3.
RobotModel builtin_model(std::string_view name);
std::vector<std::string> builtin_model_names();
/// Model-file text behind a built-in model.
std::string builtin_model_text(std::string_view name);

/// Prepends an unactuated vertical prismatic joint carrying a trunk body.
RobotModel with_vertical_trunk(const RobotModel& leg, double trunk_mass, const Eigen::Matrix3d& trunk_inertia);

/// Fixed-base chain made of joints [first, n); the base is link first-1.
RobotModel subchain(const RobotModel& model, int first_joint);

/// Multiplies each link mass and inertia by the matching factor.
RobotModel scale_link_masses(const RobotModel& model, const std::vector<double>& factors);

/// Rotation matrix from roll-pitch-yaw (fixed-axis X, then Y, then Z).
Eigen::Matrix3d rpy_to_rotation(const Eigen::Vector3d& rpy);

}  // namespace phbench
