#include "phbench/simulator.hpp"

#include "phbench/config_text.hpp"
#include "phbench/errors.hpp"

#include <algorithm>
#include <cmath>

namespace phbench {

void ContactParams::validate() const {
  if (!(normal_stiffness > 0.0)) throw ConfigError("contact normal stiffness must be > 0");
  if (!(normal_damping >= 0.0) || !(tangential_viscous >= 0.0)) throw ConfigError("contact dampings must be >= 0");
  if (!std::isfinite(ground_height)) throw ConfigError("ground height must be finite");
}

Eigen::Vector3d contact_force(const Eigen::Vector3d& position, const Eigen::Vector3d& velocity,
                              const ContactParams& params) {
  const double penetration = params.ground_height - position.z();
  if (penetration <= 0.0) return Eigen::Vector3d::Zero();
  Eigen::Vector3d f;
  f.z() = std::max(0.0, params.normal_stiffness * penetration - params.normal_damping * velocity.z());
  f.x() = -params.tangential_viscous * velocity.x();
  f.y() = -params.tangential_viscous * velocity.y();
  return f;
}

Eigen::Vector3d contact_force(const CartesianState& foot, const ContactParams& params) {
  if (foot.twist.size() < 3) throw std::invalid_argument("contact needs the linear velocity in the first twist rows");
  return contact_force(foot.position, foot.twist.head<3>(), params);
}

void JointLimitParams::validate() const {
  if (!(stiffness > 0.0) || !(damping >= 0.0)) throw ConfigError("joint limit stiffness must be > 0, damping >= 0");
}

Eigen::VectorXd joint_limit_torque(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                   const JointLimitParams& params) {
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    const auto& limits = model.joints[i].position_limits;
    if (!limits) continue;
    if (q[i] > limits->second) {
      tau[i] = std::min(0.0, -params.stiffness * (q[i] - limits->second) - params.damping * qd[i]);
    } else if (q[i] < limits->first) {
      tau[i] = std::max(0.0, params.stiffness * (limits->first - q[i]) - params.damping * qd[i]);
    }
  }
  return tau;
}

void SimConfig::validate() const {
  if (!(control_dt > 0.0)) throw ConfigError("control_dt must be > 0");
  if (physics_substeps < 1) throw ConfigError("physics_substeps must be >= 1");
  if (!(duration > 0.0)) throw ConfigError("duration must be > 0");
  if (contact) contact->validate();
  if (joint_limits) joint_limits->validate();
  for (double s : model_error_scale) {
    if (!(s > 0.0)) throw ConfigError("model_error_scale entries must be > 0");
  }
}

long SimConfig::ticks() const { return std::lround(duration / control_dt); }

// ---------------------------------------------------------------------------

RobotModel Scenario::believed_plant() const {
  return sim.model_error_scale.empty() ? plant : scale_link_masses(plant, sim.model_error_scale);
}

RobotModel Scenario::controller_model() const {
  const RobotModel believed = believed_plant();
  return control_offset == 0 ? believed : subchain(believed, control_offset);
}

MetricsContext Scenario::metrics_context() const {
  return {believed_plant(), controller_model(), control_offset, params, reference, task_space};
}

void Scenario::validate() const {
  phbench::validate(plant);
  const int n = plant.dof();
  if (control_offset < 0 || control_offset >= n) throw ConfigError("control offset must leave at least one joint");
  if (q0.size() != n || qd0.size() != n) {
    throw ConfigError("initial state needs " + std::to_string(n) + " joint values");
  }
  if (!q0.allFinite() || !qd0.allFinite()) throw ConfigError("initial state must be finite");
  if (!sim.model_error_scale.empty() && static_cast<int>(sim.model_error_scale.size()) != n) {
    throw ConfigError("model_error_scale needs one factor per link");
  }
  sim.validate();
  params.validate(plant.task_dim());
  if (reference.task_dim() != plant.task_dim()) throw ConfigError("reference task dimension does not match the model");
}

// ---------------------------------------------------------------------------

Simulator::Simulator(Scenario scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
  controller_ = scenario_.controller_model();
  state_.q = scenario_.q0;
  state_.qd = scenario_.qd0;
}

Vector6d Simulator::world_wrench(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  Vector6d w = Vector6d::Zero();
  const std::vector<int>& rows = controller_.task_rows;
  if (scenario_.sim.contact) {
    const CartesianState foot = forward_kinematics(scenario_.plant, q);
    const Eigen::Vector3d v = full_jacobian(scenario_.plant, q).topRows<3>() * qd;
    w.head<3>() = contact_force(foot.position, v, *scenario_.sim.contact);
  }
  if (scenario_.external_wrench) {
    const Eigen::VectorXd f = scenario_.external_wrench(t);
    if (f.size() != static_cast<Eigen::Index>(rows.size())) {
      throw ConfigError("external wrench must have the task dimension");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) w[rows[j]] += f[j];
  }
  return w;
}

Eigen::VectorXd Simulator::interaction_wrench(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  const Vector6d w = world_wrench(t, q, qd);
  const std::vector<int>& rows = controller_.task_rows;
  Eigen::VectorXd f(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) f[j] = w[rows[j]];
  return f;
}

Eigen::VectorXd Simulator::environment_torque(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(scenario_.plant.dof());
  if (scenario_.sim.contact || scenario_.external_wrench) {
    tau += full_jacobian(scenario_.plant, q).transpose() * world_wrench(t, q, qd);
  }
  if (scenario_.sim.joint_limits) tau += joint_limit_torque(scenario_.plant, q, qd, *scenario_.sim.joint_limits);
  return tau;
}

LogSample Simulator::control(Eigen::VectorXd& tau_act) const {
  const int off = scenario_.control_offset;
  const int nc = controller_.dof();
  const Eigen::VectorXd qc = state_.q.segment(off, nc);
  const Eigen::VectorXd qdc = state_.qd.segment(off, nc);
  const ReferenceSample ref = scenario_.reference.evaluate(state_.t);

  LogSample s;
  s.t = state_.t;
  s.q = state_.q;
  s.qd = state_.qd;
  s.f_int = interaction_wrench(state_.t, state_.q, state_.qd);
  tau_act = Eigen::VectorXd::Zero(scenario_.plant.dof());
  if (scenario_.actuated) {
    const ControlOutput out =
        impedance_control(controller_, qc, qdc, ref, scenario_.params, s.f_int, ControlOptions{scenario_.task_space});
    tau_act.segment(off, nc) = out.tau_act;
  }
  s.tau = tau_act;
  s.x = task_coordinates(controller_, forward_kinematics(controller_, qc).pose());
  s.xd_ref = task_coordinates(controller_, ref.pose);
  return s;
}

LogSample Simulator::observe() const {
  Eigen::VectorXd tau;
  return control(tau);
}

Eigen::VectorXd Simulator::acceleration(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                        const Eigen::VectorXd& tau_act) const {
  return forward_dynamics(scenario_.plant, q, qd, tau_act + environment_torque(t, q, qd), Eigen::VectorXd());
}

void Simulator::check_divergence() const {
  const double limit = scenario_.sim.divergence_limit;
  if (!state_.q.allFinite() || !state_.qd.allFinite() || state_.q.cwiseAbs().maxCoeff() > limit ||
      state_.qd.cwiseAbs().maxCoeff() > limit) {
    throw NumericalDivergence("state left the +/-" + config::format_number(limit) + " box at t = " +
                              config::format_number(state_.t));
  }
}

LogSample Simulator::step() {
  Eigen::VectorXd tau;
  LogSample sample = control(tau);

  const double dt = scenario_.sim.control_dt;
  const int substeps = scenario_.sim.physics_substeps;
  const double h = dt / substeps;
  Eigen::VectorXd q = state_.q, qd = state_.qd;
  for (int j = 0; j < substeps; ++j) {
    const double t = state_.t + j * h;
    const Eigen::VectorXd a1 = acceleration(t, q, qd, tau);
    const Eigen::VectorXd q2 = q + 0.5 * h * qd, v2 = qd + 0.5 * h * a1;
    const Eigen::VectorXd a2 = acceleration(t + 0.5 * h, q2, v2, tau);
    const Eigen::VectorXd q3 = q + 0.5 * h * v2, v3 = qd + 0.5 * h * a2;
    const Eigen::VectorXd a3 = acceleration(t + 0.5 * h, q3, v3, tau);
    const Eigen::VectorXd q4 = q + h * v3, v4 = qd + h * a3;
    const Eigen::VectorXd a4 = acceleration(t + h, q4, v4, tau);
    q += h / 6.0 * (qd + 2.0 * v2 + 2.0 * v3 + v4);
    qd += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  }
  state_.q = std::move(q);
  state_.qd = std::move(qd);
  ++state_.tick;
  state_.t = state_.tick * dt;
  check_divergence();
  return sample;
}

SimTrajectory run_scenario(const Scenario& scenario) {
  Simulator sim(scenario);
  const long n = scenario.sim.ticks();
  SimTrajectory out;
  out.log.reserve(n + 1);
  for (long i = 0; i < n; ++i) out.log.push_back(sim.step());
  out.log.push_back(sim.observe());
  out.metrics = compute_metrics(out.log, scenario.metrics_context());
  return out;
}

}  // namespace phbench
