#pragma once

#include "phbench/dynamics.hpp"

#include <Eigen/Core>

#include <vector>

namespace phbench {

enum class ReferenceKind { constant, step, gait, jump_sequence, sinusoid, ramp };

const char* to_string(ReferenceKind kind);

/// Desired pose with task-space velocity and acceleration (k-vectors).
struct ReferenceSample {
  Pose pose;
  Eigen::VectorXd velocity;
  Eigen::VectorXd acceleration;
};

struct StepInfo {
  int axis = 0;  // task index
  double amplitude = 0.0;
  double time = 0.0;
};

/// Time-parameterised desired end-effector pose. Task indices refer to the
/// rows of the model's task (e.g. 0 = x for a translational task).
class ReferenceSignal {
 public:
  /// Empty constant reference; replace before use.
  ReferenceSignal() = default;

  static ReferenceSignal constant(const RobotModel& model, const Pose& pose);
  /// x_d jumps by `amplitude` on task axis `axis` at `time` (rotation axes rotate about the end-effector axis).
  static ReferenceSignal step(const RobotModel& model, const Pose& base, int axis, double amplitude, double time = 0.0);
  /// Periodic foot path: linear stance sweep of `step_length` along `forward_axis`
  /// for the first half of the period, cycloidal swing of height `step_height`
  /// along `vertical_axis` for the second half. `base` is the sweep centre at ground level.
  static ReferenceSignal gait(const RobotModel& model, const Pose& base, double step_length, double period,
                              double step_height = 0.08, int forward_axis = 0, int vertical_axis = 2);
  /// From `start`, `count` repetitions every `repeat_period` of: drop by `drop`
  /// along `vertical_axis`, back to `rest` after `return_delay`.
  static ReferenceSignal jump_sequence(const RobotModel& model, const Pose& rest, double drop, double return_delay,
                                       double start = 0.0, int count = 1, double repeat_period = 0.0,
                                       int vertical_axis = 2);
  /// base + amplitude .* sin(omega t + phase) on translational task axes.
  static ReferenceSignal sinusoid(const RobotModel& model, const Pose& base, const Eigen::VectorXd& amplitude,
                                  const Eigen::VectorXd& omega, const Eigen::VectorXd& phase);

  /// base + velocity t on translational task axes (constant velocity, zero acceleration).
  static ReferenceSignal ramp(const RobotModel& model, const Pose& base, const Eigen::VectorXd& velocity);

  ReferenceKind kind() const { return kind_; }
  int task_dim() const { return static_cast<int>(task_rows_.size()); }

  ReferenceSample evaluate(double t) const;
  /// The value just before t = 0 (before any step at t = 0 has happened).
  ReferenceSample evaluate_before_start() const;

  /// Report zero velocity and acceleration and keep only the pose; the
  /// gait then drives the controller as a sequence of set-points.
  ReferenceSignal position_only() const;
  bool is_position_only() const { return position_only_; }

  /// Single-axis step parameters (kind == step).
  const StepInfo& step_info() const { return step_; }

  /// True when the signal reports zero velocity and acceleration at every t.
  bool quasi_static() const;

 private:
  ReferenceSignal(const RobotModel& model, ReferenceKind kind, const Pose& base);
  ReferenceSample hold(const Pose& pose) const;
  Pose offset_axis(const Pose& pose, int axis, double amount) const;

  ReferenceKind kind_ = ReferenceKind::constant;
  std::vector<int> task_rows_;
  Pose base_;
  bool position_only_ = false;

  StepInfo step_;

  double step_length_ = 0.0;
  double period_ = 1.0;
  double step_height_ = 0.0;
  int forward_axis_ = 0;
  int vertical_axis_ = 2;

  double drop_ = 0.0;
  double return_delay_ = 0.0;
  double start_ = 0.0;
  int count_ = 1;
  double repeat_period_ = 0.0;

  Eigen::VectorXd amplitude_;
  Eigen::VectorXd omega_;
  Eigen::VectorXd phase_;
};

}  // namespace phbench
