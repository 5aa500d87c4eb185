#pragma once

// Fixed-step closed-loop simulation: controller at the control rate with a
// zero-order hold on the torque, RK4 physics at control_dt / physics_substeps,
// penalty ground contact and joint-limit springs.

#include "phbench/dynamics.hpp"
#include "phbench/impedance.hpp"
#include "phbench/ph_metrics.hpp"
#include "phbench/reference.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phbench {

struct ContactParams {
  double ground_height = 0.0;
  double normal_stiffness = 1e5;
  double normal_damping = 1e3;
  double tangential_viscous = 200.0;

  void validate() const;
};

/// Unilateral ground force on a point at `position` moving with `velocity`
/// (world axes). Zero above the ground.
Eigen::Vector3d contact_force(const Eigen::Vector3d& position, const Eigen::Vector3d& velocity,
                              const ContactParams& params);
/// Same, reading the linear velocity from the first three twist rows.
Eigen::Vector3d contact_force(const CartesianState& foot, const ContactParams& params);

/// Penalty spring-damper pushing joints back inside their position limits.
struct JointLimitParams {
  double stiffness = 5e3;
  double damping = 50.0;

  void validate() const;
};

/// Zero inside the limits; never pulls a joint outwards.
Eigen::VectorXd joint_limit_torque(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                   const JointLimitParams& params);

struct SimConfig {
  double control_dt = 1e-3;
  int physics_substeps = 10;
  double duration = 1.0;
  std::optional<ContactParams> contact;
  std::optional<JointLimitParams> joint_limits;
  /// Per-link mass multiplier of the model the controller believes in; empty means 1.
  std::vector<double> model_error_scale;
  double divergence_limit = 1e6;

  void validate() const;
  long ticks() const;
};

/// Extra wrench on the end effector, task rows, as a function of time.
using ExternalWrench = std::function<Eigen::VectorXd(double)>;

/// Everything that determines a run.
struct Scenario {
  std::string name;
  RobotModel plant;
  /// The controller drives joints [control_offset, n) of the plant; joints
  /// before that are passive (e.g. a free trunk).
  int control_offset = 0;
  Eigen::VectorXd q0;
  Eigen::VectorXd qd0;
  ImpedanceParams params;
  ReferenceSignal reference;
  SimConfig sim;
  ExternalWrench external_wrench;
  TaskSpaceOptions task_space;
  /// False runs the plant with zero actuation (the controller is not evaluated).
  bool actuated = true;

  /// Controller model: the plant (mass-scaled) minus the passive joints.
  RobotModel controller_model() const;
  /// Mass-scaled plant used for energy bookkeeping.
  RobotModel believed_plant() const;
  MetricsContext metrics_context() const;
  void validate() const;
};

struct SimState {
  long tick = 0;
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
};

/// Steps one scenario. Not thread-safe; one instance per run.
class Simulator {
 public:
  explicit Simulator(Scenario scenario);

  const SimState& state() const { return state_; }
  const Scenario& scenario() const { return scenario_; }

  /// Evaluates the controller at the current tick, returns that sample and
  /// advances the plant by control_dt with the torque held.
  LogSample step();
  /// The sample at the current tick without advancing.
  LogSample observe() const;

  /// Interaction wrench on the end effector (task rows of the controller)
  /// at the given plant state and time: contact plus external wrench.
  Eigen::VectorXd interaction_wrench(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;
  /// Plant joint torque produced by the interaction and the joint limits.
  Eigen::VectorXd environment_torque(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;

 private:
  LogSample control(Eigen::VectorXd& tau_act) const;
  Eigen::VectorXd acceleration(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                               const Eigen::VectorXd& tau_act) const;
  Vector6d world_wrench(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;
  void check_divergence() const;

  Scenario scenario_;
  RobotModel controller_;
  SimState state_;
};

struct SimTrajectory {
  std::vector<LogSample> log;
  MetricsSeries metrics;
};

/// Runs ticks 0..N and computes the metrics over the log.
SimTrajectory run_scenario(const Scenario& scenario);

}  // namespace phbench
