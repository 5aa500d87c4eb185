#pragma once

#include "phbench/dynamics.hpp"
#include "phbench/reference.hpp"

#include <Eigen/Core>

#include <optional>

namespace phbench {

/// Diagonal impedance K_d, D_d and, with inertia shaping, Lambda_d. Without
/// inertia shaping the rendered inertia is the robot's own Lambda(x).
struct ImpedanceParams {
  Eigen::VectorXd stiffness;
  Eigen::VectorXd damping;
  std::optional<Eigen::VectorXd> inertia;

  bool inertia_shaping() const { return inertia.has_value(); }
  int task_dim() const { return static_cast<int>(stiffness.size()); }

  /// Throws ConfigError unless every vector has k entries and every entry is > 0.
  void validate(int k) const;

  /// Desired inertia for the current task-space inertia `lambda`.
  Eigen::MatrixXd desired_inertia(const Eigen::MatrixXd& lambda) const;

  /// Arm with inertia shaping: K 800/120, D 134.2/13.96, Lambda_d 10 kg / 0.722 kg m^2.
  static ImpedanceParams arm_with_shaping();
  /// Arm without inertia shaping: K 400,400,400 / 70,70,40, D 134.2/15.08.
  static ImpedanceParams arm_without_shaping();
  /// Leg (translational task, no inertia shaping): K 400,400,800, D 43,43,90.
  static ImpedanceParams leg();
};

struct ControlOutput {
  Eigen::VectorXd tau_act;
  /// Bracketed Cartesian term before mapping through J^T.
  Eigen::VectorXd cartesian_force_cmd;
  Eigen::VectorXd error;
  Eigen::VectorXd error_rate;
  Eigen::VectorXd twist;
  Eigen::MatrixXd lambda;
};

struct ControlOptions {
  TaskSpaceOptions task_space;
};

/// tau = g + J^T [Lambda xdd_d + Gamma xd - Lambda Lambda_d^-1 (D e_dot + K e) + (Lambda Lambda_d^-1 - I) f_int]
ControlOutput control_with_inertia_shaping(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                           const ReferenceSample& ref, const ImpedanceParams& params,
                                           const Eigen::VectorXd& f_int, const ControlOptions& options = {});

/// tau = g + J^T [Lambda xdd_d + Gamma xd - D e_dot - K e]
ControlOutput control_without_inertia_shaping(const RobotModel& model, const Eigen::VectorXd& q,
                                              const Eigen::VectorXd& qd, const ReferenceSample& ref,
                                              const ImpedanceParams& params, const ControlOptions& options = {});

/// Dispatches on params.inertia_shaping(); f_int is ignored without shaping.
ControlOutput impedance_control(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                const ReferenceSample& ref, const ImpedanceParams& params,
                                const Eigen::VectorXd& f_int, const ControlOptions& options = {});

}  // namespace phbench
