#include "phbench/impedance.hpp"

#include "phbench/errors.hpp"

#include <cmath>

namespace phbench {

namespace {

Eigen::VectorXd repeat(double a, double b) {
  Eigen::VectorXd v(6);
  v << a, a, a, b, b, b;
  return v;
}

void check_positive(const Eigen::VectorXd& v, int k, const char* what) {
  if (v.size() != k) {
    throw ConfigError(std::string(what) + " needs " + std::to_string(k) + " entries, got " + std::to_string(v.size()));
  }
  for (int i = 0; i < k; ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) throw ConfigError(std::string(what) + " entries must be finite and > 0");
  }
}

struct Terms {
  TaskSpaceModel ts;
  Eigen::VectorXd g;
  Eigen::VectorXd twist;
  Eigen::VectorXd e;
  Eigen::VectorXd e_dot;
};

Terms common_terms(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                   const ReferenceSample& ref, const ControlOptions& options) {
  Terms t;
  t.ts = task_space_model(model, q, qd, options.task_space);
  t.g = gravity_vector(model, q);
  t.twist = t.ts.jacobian * qd;
  t.e = task_error(model, forward_kinematics(model, q).pose(), ref.pose);
  t.e_dot = t.twist - ref.velocity;
  return t;
}

ControlOutput finish(Terms&& t, Eigen::VectorXd force) {
  ControlOutput out;
  out.tau_act = t.g + t.ts.jacobian.transpose() * force;
  out.cartesian_force_cmd = std::move(force);
  out.error = std::move(t.e);
  out.error_rate = std::move(t.e_dot);
  out.twist = std::move(t.twist);
  out.lambda = std::move(t.ts.lambda);
  return out;
}

}  // namespace

void ImpedanceParams::validate(int k) const {
  check_positive(stiffness, k, "stiffness");
  check_positive(damping, k, "damping");
  if (inertia) check_positive(*inertia, k, "inertia");
}

Eigen::MatrixXd ImpedanceParams::desired_inertia(const Eigen::MatrixXd& lambda) const {
  if (inertia) return inertia->asDiagonal();
  return lambda;
}

ImpedanceParams ImpedanceParams::arm_with_shaping() {
  ImpedanceParams p;
  p.stiffness = repeat(800.0, 120.0);
  p.damping = repeat(134.2, 13.96);
  p.inertia = repeat(10.0, 0.722);
  return p;
}

ImpedanceParams ImpedanceParams::arm_without_shaping() {
  ImpedanceParams p;
  p.stiffness.resize(6);
  p.stiffness << 400.0, 400.0, 400.0, 70.0, 70.0, 40.0;
  p.damping = repeat(134.2, 15.08);
  return p;
}

ImpedanceParams ImpedanceParams::leg() {
  ImpedanceParams p;
  p.stiffness = Eigen::Vector3d(400.0, 400.0, 800.0);
  p.damping = Eigen::Vector3d(43.0, 43.0, 90.0);
  return p;
}

ControlOutput control_with_inertia_shaping(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                           const ReferenceSample& ref, const ImpedanceParams& params,
                                           const Eigen::VectorXd& f_int, const ControlOptions& options) {
  if (!params.inertia_shaping()) throw ConfigError("inertia shaping law needs a desired inertia");
  const int k = model.task_dim();
  params.validate(k);
  if (f_int.size() != k) throw std::invalid_argument("f_int must have the task dimension");
  Terms t = common_terms(model, q, qd, ref, options);
  // Lambda Lambda_d^-1 with diagonal Lambda_d
  const Eigen::MatrixXd shaping = t.ts.lambda * params.inertia->cwiseInverse().asDiagonal();
  const Eigen::VectorXd spring_damper = params.damping.cwiseProduct(t.e_dot) + params.stiffness.cwiseProduct(t.e);
  Eigen::VectorXd force = t.ts.lambda * ref.acceleration + t.ts.gamma * t.twist - shaping * spring_damper +
                          (shaping - Eigen::MatrixXd::Identity(k, k)) * f_int;
  return finish(std::move(t), std::move(force));
}

ControlOutput control_without_inertia_shaping(const RobotModel& model, const Eigen::VectorXd& q,
                                              const Eigen::VectorXd& qd, const ReferenceSample& ref,
                                              const ImpedanceParams& params, const ControlOptions& options) {
  if (params.inertia_shaping()) throw ConfigError("law without inertia shaping takes no desired inertia");
  params.validate(model.task_dim());
  Terms t = common_terms(model, q, qd, ref, options);
  Eigen::VectorXd force = t.ts.lambda * ref.acceleration + t.ts.gamma * t.twist -
                          params.damping.cwiseProduct(t.e_dot) - params.stiffness.cwiseProduct(t.e);
  return finish(std::move(t), std::move(force));
}

ControlOutput impedance_control(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                const ReferenceSample& ref, const ImpedanceParams& params,
                                const Eigen::VectorXd& f_int, const ControlOptions& options) {
  if (params.inertia_shaping()) {
    const Eigen::VectorXd f = f_int.size() == 0 ? Eigen::VectorXd::Zero(model.task_dim()) : f_int;
    return control_with_inertia_shaping(model, q, qd, ref, params, f, options);
  }
  return control_without_inertia_shaping(model, q, qd, ref, params, options);
}

}  // namespace phbench
