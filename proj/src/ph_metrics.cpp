#include "phbench/ph_metrics.hpp"

#include "phbench/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace phbench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool available(const Eigen::VectorXd& v) { return v.size() > 0 && v.allFinite(); }

double trapezoid(double t0, double t1, double a, double b) { return 0.5 * (t1 - t0) * (a + b); }

struct UnderdampedMsd {
  double wn, zeta, wd;

  UnderdampedMsd(double k, double d, double m) {
    if (!(k > 0.0) || !(m > 0.0) || d < 0.0) throw ConfigError("step response needs k > 0, m > 0, d >= 0");
    zeta = damping_ratio(k, d, m);
    if (zeta >= 1.0) {
      throw OverdampedUnsupported("damping ratio " + std::to_string(zeta) + " >= 1; only underdamped steps are supported");
    }
    wn = std::sqrt(k / m);
    wd = wn * std::sqrt(1.0 - zeta * zeta);
  }
};

}  // namespace

double robot_hamiltonian(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                         double potential_datum) {
  return 0.5 * qd.dot(mass_matrix(model, q) * qd) + potential_energy(model, q) - potential_datum;
}

double impedance_hamiltonian(const Eigen::VectorXd& e, const Eigen::VectorXd& e_dot, const Eigen::MatrixXd& inertia,
                             const Eigen::VectorXd& stiffness) {
  return 0.5 * e_dot.dot(inertia * e_dot) + 0.5 * e.dot(stiffness.cwiseProduct(e));
}

// ---------------------------------------------------------------------------

CausalImpedance CausalImpedance::from_params(const ImpedanceParams& params) {
  if (!params.inertia_shaping()) throw ConfigError("causal impedance model needs a constant desired inertia");
  params.validate(params.task_dim());
  return {Eigen::MatrixXd(params.inertia->asDiagonal()), params.stiffness, params.damping};
}

TaskReference task_reference(const RobotModel& model, const ReferenceSignal& reference) {
  return [model, reference](double t) {
    const ReferenceSample s = reference.evaluate(t);
    return TaskTarget{task_coordinates(model, s.pose), s.velocity, s.acceleration};
  };
}

CausalTrajectory simulate_causal_impedance(const CausalImpedance& impedance, const TaskReference& reference,
                                           const WrenchSignal& f_int, const Eigen::VectorXd& x0,
                                           const Eigen::VectorXd& p0, double dt, double duration) {
  const int k = impedance.dim();
  if (!(dt > 0.0) || !(duration >= 0.0)) throw ConfigError("causal integration needs dt > 0 and duration >= 0");
  if (impedance.inertia.rows() != k || impedance.inertia.cols() != k || impedance.damping.size() != k ||
      x0.size() != k || p0.size() != k) {
    throw ConfigError("causal impedance dimensions disagree");
  }
  const Eigen::LLT<Eigen::MatrixXd> inertia_llt(impedance.inertia);
  if (inertia_llt.info() != Eigen::Success) throw ConfigError("desired inertia must be positive definite");

  auto force = [&](double t) -> Eigen::VectorXd {
    if (!f_int) return Eigen::VectorXd::Zero(k);
    Eigen::VectorXd f = f_int(t);
    if (f.size() != k) throw ConfigError("interaction wrench has the wrong dimension");
    return f;
  };
  auto rhs = [&](double t, const Eigen::VectorXd& x, const Eigen::VectorXd& p, Eigen::VectorXd& dx,
                 Eigen::VectorXd& dp) {
    const TaskTarget r = reference(t);
    dx = inertia_llt.solve(p);
    const Eigen::VectorXd e_dot = dx - r.velocity;
    dp = -impedance.stiffness.cwiseProduct(x - r.x) - impedance.damping.cwiseProduct(e_dot) +
         impedance.inertia * r.acceleration + force(t);
  };

  const long steps = std::lround(duration / dt);
  CausalTrajectory out;
  out.t.reserve(steps + 1);
  Eigen::VectorXd x = x0, p = p0;
  for (long i = 0;; ++i) {
    const double t = i * dt;
    out.t.push_back(t);
    out.x.push_back(x);
    out.p.push_back(p);
    out.target.push_back(reference(t));
    out.f_int.push_back(force(t));
    if (i == steps) break;
    Eigen::VectorXd k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p;
    rhs(t, x, p, k1x, k1p);
    rhs(t + 0.5 * dt, x + 0.5 * dt * k1x, p + 0.5 * dt * k1p, k2x, k2p);
    rhs(t + 0.5 * dt, x + 0.5 * dt * k2x, p + 0.5 * dt * k2p, k3x, k3p);
    rhs(t + dt, x + dt * k3x, p + dt * k3p, k4x, k4p);
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  }
  return out;
}

double causal_hamiltonian(const CausalImpedance& impedance, const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                          const TaskTarget& target) {
  const Eigen::VectorXd p_err = p - impedance.inertia * target.velocity;
  const Eigen::VectorXd e = x - target.x;
  return 0.5 * p_err.dot(impedance.inertia.llt().solve(p_err)) + 0.5 * e.dot(impedance.stiffness.cwiseProduct(e));
}

std::vector<BalanceTerms> causal_balance(const CausalImpedance& impedance, const CausalTrajectory& traj) {
  const std::size_t n = traj.t.size();
  std::vector<BalanceTerms> out;
  if (n < 5) return out;
  const Eigen::LLT<Eigen::MatrixXd> inertia_llt(impedance.inertia);
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = causal_hamiltonian(impedance, traj.x[i], traj.p[i], traj.target[i]);
  const double dt = traj.t[1] - traj.t[0];
  for (std::size_t i = 2; i + 2 < n; ++i) {
    BalanceTerms b;
    b.t = traj.t[i];
    const TaskTarget& r = traj.target[i];
    const Eigen::VectorXd e_dot = inertia_llt.solve(traj.p[i]) - r.velocity;
    const Eigen::VectorXd p_d_dot = impedance.inertia * r.acceleration;
    b.supply = e_dot.dot(p_d_dot + traj.f_int[i]);
    b.energy_rate = (h[i - 2] - 8.0 * h[i - 1] + 8.0 * h[i + 1] - h[i + 2]) / (12.0 * dt);
    b.dissipation = e_dot.dot(impedance.damping.cwiseProduct(e_dot));
    b.reference_power = e_dot.dot(p_d_dot);
    b.residual = b.supply - b.energy_rate - b.dissipation;
    out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> general_passivity_margin(const std::vector<PortSample>& samples, const Eigen::VectorXd& stiffness) {
  std::vector<double> margin(samples.size());
  if (samples.empty()) return margin;
  double supplied = 0.0, h0 = 0.0, prev_power = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const PortSample& s = samples[i];
    if (!available(s.f_int)) {
      throw MissingInteractionData("interaction wrench unavailable at t = " + std::to_string(s.t));
    }
    const double power = s.e_dot.dot(s.p_d_dot + s.f_int);
    const double h = impedance_hamiltonian(s.e, s.e_dot, s.inertia, stiffness);
    if (i == 0) {
      h0 = h;
    } else {
      supplied += trapezoid(samples[i - 1].t, s.t, prev_power, power) + s.reference_jump_energy;
    }
    prev_power = power;
    margin[i] = supplied - (h - h0);
  }
  return margin;
}

std::vector<double> general_passivity_margin(const CausalImpedance& impedance, const CausalTrajectory& traj) {
  const Eigen::LLT<Eigen::MatrixXd> inertia_llt(impedance.inertia);
  std::vector<PortSample> samples(traj.t.size());
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const TaskTarget& r = traj.target[i];
    PortSample& s = samples[i];
    s.t = traj.t[i];
    s.e = traj.x[i] - r.x;
    s.e_dot = inertia_llt.solve(traj.p[i]) - r.velocity;
    s.p_d_dot = impedance.inertia * r.acceleration;
    s.f_int = traj.f_int[i];
    s.inertia = impedance.inertia;
  }
  return general_passivity_margin(samples, impedance.stiffness);
}

std::vector<double> hamiltonian_gap(const std::vector<double>& h_q, const std::vector<double>& h_omega, double h_q0,
                                    double h_omega0) {
  if (h_q.size() != h_omega.size()) throw std::invalid_argument("hamiltonian series lengths differ");
  std::vector<double> gap(h_q.size());
  for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = (h_q[i] - h_q0) - (h_omega[i] - h_omega0);
  return gap;
}

std::vector<double> quasi_static_passivity_margin(const std::vector<double>& int_p_cmd, const std::vector<double>& gap,
                                                  const std::vector<Eigen::VectorXd>& reference_velocity) {
  if (int_p_cmd.size() != gap.size() || gap.size() != reference_velocity.size()) {
    throw std::invalid_argument("passivity series lengths differ");
  }
  std::vector<double> margin(gap.size());
  for (std::size_t i = 0; i < gap.size(); ++i) {
    if (!reference_velocity[i].isZero(0.0)) {
      throw NonQuasiStaticReference("reference velocity is nonzero at sample " + std::to_string(i));
    }
    margin[i] = int_p_cmd[i] - gap[i];
  }
  return margin;
}

// ---------------------------------------------------------------------------

PowerDistribution power_distribution(const PowerSample& s) {
  PowerDistribution d;
  const Eigen::VectorXd e_dot = s.xdot - s.xdot_d;
  d.lhs = s.qd.dot(s.tau_act) + s.xdot_d.dot(s.f_int);
  d.supply_robot = s.qd.dot(s.tau);
  d.supply_impedance = e_dot.dot(s.p_d_dot + s.f_int);
  d.reference_term = -(s.xdot_d - s.xdot).dot(s.p_d_dot);
  d.residual = d.lhs - (d.supply_robot - d.supply_impedance + d.reference_term);
  return d;
}

// ---------------------------------------------------------------------------

double damping_ratio(double k, double d, double m) { return d / (2.0 * std::sqrt(k * m)); }

StepResponse step_response_closed_form(double k, double d, double m, double amplitude, double t) {
  const UnderdampedMsd msd(k, d, m);
  if (t <= 0.0) return {};
  const double root = std::sqrt(1.0 - msd.zeta * msd.zeta);
  const double envelope = std::exp(-msd.zeta * msd.wn * t);
  const double c = std::cos(msd.wd * t), s = std::sin(msd.wd * t);
  StepResponse r;
  r.x = amplitude * (1.0 - envelope * (c + msd.zeta / root * s));
  r.xdot = amplitude * envelope * msd.wn / root * s;
  return r;
}

double step_power_reference(double k, double d, double m, double amplitude, double t) {
  const StepResponse r = step_response_closed_form(k, d, m, amplitude, t);
  return r.xdot * (k * (amplitude - r.x) - d * r.xdot);
}

double cartesian_power(const Eigen::VectorXd& xdot, const Eigen::VectorXd& e, const Eigen::VectorXd& e_dot,
                       const ImpedanceParams& params) {
  return -xdot.dot(params.stiffness.cwiseProduct(e) + params.damping.cwiseProduct(e_dot));
}

double step_power_error(double p_step, const Eigen::VectorXd& xdot, const Eigen::VectorXd& e,
                        const Eigen::VectorXd& e_dot, const ImpedanceParams& params) {
  return p_step - cartesian_power(xdot, e, e_dot, params);
}

double rms_over_window(const std::vector<double>& t, const std::vector<double>& series, double t0, double t1) {
  if (t.size() != series.size()) throw std::invalid_argument("time and series lengths differ");
  if (t.size() < 2) throw WindowError("need at least two samples");
  const double slack = 1e-9 * std::max({1.0, std::abs(t.front()), std::abs(t.back())});
  if (!(t1 > t0)) throw WindowError("window end must exceed its start");
  if (t0 < t.front() - slack || t1 > t.back() + slack) {
    throw WindowError("window [" + std::to_string(t0) + ", " + std::to_string(t1) + "] outside the log range [" +
                      std::to_string(t.front()) + ", " + std::to_string(t.back()) + "]");
  }
  t0 = std::max(t0, t.front());
  t1 = std::min(t1, t.back());
  auto value_at = [&](double tq) {
    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    std::size_t j = std::clamp<std::size_t>(it - t.begin(), 1, t.size() - 1);
    const double w = (tq - t[j - 1]) / (t[j] - t[j - 1]);
    return (1.0 - w) * series[j - 1] + w * series[j];
  };
  std::vector<std::pair<double, double>> pts{{t0, value_at(t0)}};
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > t0 && t[i] < t1) pts.emplace_back(t[i], series[i]);
  }
  pts.emplace_back(t1, value_at(t1));
  double acc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    acc += trapezoid(pts[i - 1].first, pts[i].first, pts[i - 1].second * pts[i - 1].second,
                     pts[i].second * pts[i].second);
  }
  return std::sqrt(acc / (t1 - t0));
}

// ---------------------------------------------------------------------------

MetricsSeries compute_metrics(const std::vector<LogSample>& log, const MetricsContext& ctx) {
  MetricsSeries out(log.size());
  if (log.empty()) return out;
  const int n_task = static_cast<int>(ctx.task.joints.size());
  const int k = ctx.task.task_dim();
  const int n = static_cast<int>(ctx.robot.joints.size());
  ctx.params.validate(k);
  if (ctx.task_joint_offset < 0 || ctx.task_joint_offset + n_task > n) {
    throw ConfigError("task chain does not fit inside the robot chain");
  }
  const ReferenceSignal& reference = ctx.reference;
  const bool quasi_static = reference.quasi_static();
  const ImpedanceParams& params = ctx.params;

  bool have_f = true;
  for (const LogSample& s : log) {
    if (s.q.size() != n || s.qd.size() != n || s.tau.size() != n) {
      throw SchemaError("log sample dimensions do not match the robot");
    }
    if (s.xd_ref.size() != 0 && s.xd_ref.size() != k) throw SchemaError("xd_ref has the wrong dimension");
    if (s.f_int.size() != 0 && s.f_int.size() != k) throw SchemaError("f_int has the wrong dimension");
    have_f = have_f && available(s.f_int);
  }

  // Step power setup. Without inertia shaping the rendered mass is the
  // robot's own task inertia on the step axis at the step instant.
  const bool step_kind = reference.kind() == ReferenceKind::step;
  const StepInfo step = reference.step_info();
  double step_mass = kNaN;
  bool step_ok = false;
  if (step_kind) {
    if (params.inertia_shaping()) {
      step_mass = (*params.inertia)[step.axis];
    } else {
      std::size_t j = 0;
      while (j + 1 < log.size() && log[j].t < step.time) ++j;
      const Eigen::VectorXd q = log[j].q.segment(ctx.task_joint_offset, n_task);
      step_mass = task_space_model(ctx.task, q, Eigen::VectorXd::Zero(n_task), ctx.task_space).lambda(step.axis, step.axis);
    }
    step_ok = damping_ratio(params.stiffness[step.axis], params.damping[step.axis], step_mass) < 1.0;
  }

  const double potential_datum = potential_energy(ctx.robot, log.front().q);
  double h_q0 = 0.0, h_omega_anchor = 0.0, h_omega0 = 0.0;
  double supplied = 0.0, prev_port_power = 0.0;
  Pose prev_desired;

  for (std::size_t i = 0; i < log.size(); ++i) {
    const LogSample& s = log[i];
    MetricsSample& m = out[i];
    m.t = s.t;
    const Eigen::VectorXd q = s.q.segment(ctx.task_joint_offset, n_task);
    const Eigen::VectorXd qd = s.qd.segment(ctx.task_joint_offset, n_task);
    const TaskSpaceModel ts = task_space_model(ctx.task, q, qd, ctx.task_space);
    const Pose pose = forward_kinematics(ctx.task, q).pose();
    const ReferenceSample ref = reference.evaluate(s.t);
    const Pose desired = s.xd_ref.size() == k ? pose_from_task_coordinates(ctx.task, s.xd_ref, ref.pose) : ref.pose;
    const Eigen::VectorXd xdot = ts.jacobian * qd;
    const Eigen::VectorXd e = task_error(ctx.task, pose, desired);
    const Eigen::VectorXd e_dot = xdot - ref.velocity;
    const Eigen::MatrixXd inertia = params.desired_inertia(ts.lambda);

    m.H_Omega = impedance_hamiltonian(e, e_dot, inertia, params.stiffness);
    m.H_q = robot_hamiltonian(ctx.robot, s.q, s.qd, potential_datum);
    m.P_cmd = s.qd.dot(s.tau);
    if (i == 0) {
      const ReferenceSample pre = reference.evaluate_before_start();
      h_q0 = m.H_q;
      h_omega0 = m.H_Omega;
      h_omega_anchor = impedance_hamiltonian(task_error(ctx.task, pose, pre.pose), xdot - pre.velocity, inertia,
                                             params.stiffness);
      m.int_P_cmd = 0.0;
    } else {
      // torque is held over the tick, so this is the exact commanded work
      m.int_P_cmd = out[i - 1].int_P_cmd + log[i - 1].tau.dot(s.q - log[i - 1].q);
    }
    m.gap = (m.H_q - h_q0) - (m.H_Omega - h_omega_anchor);
    m.margin_qs = quasi_static ? m.int_P_cmd - m.gap : kNaN;

    if (have_f) {
      Eigen::VectorXd p_d_dot = inertia * ref.acceleration;
      if (!params.inertia_shaping()) p_d_dot += (ts.gamma + ts.gamma.transpose()) * ref.velocity;
      const double port_power = e_dot.dot(p_d_dot + s.f_int);
      if (i > 0) {
        supplied += trapezoid(log[i - 1].t, s.t, prev_port_power, port_power);
        if (quasi_static) {
          // set-point moves between ticks: credit the energy it injects
          const Eigen::VectorXd e_prev = task_error(ctx.task, pose, prev_desired);
          supplied += m.H_Omega - impedance_hamiltonian(e_prev, e_dot, inertia, params.stiffness);
        }
      }
      prev_port_power = port_power;
      m.margin_gen = supplied - (m.H_Omega - h_omega0);
    } else {
      m.margin_gen = kNaN;
    }
    prev_desired = desired;

    m.P_x = cartesian_power(xdot, e, e_dot, params);
    if (step_ok) {
      m.P_step_ref = s.t >= step.time ? step_power_reference(params.stiffness[step.axis], params.damping[step.axis],
                                                             step_mass, step.amplitude, s.t - step.time)
                                      : 0.0;
      m.e_step = m.P_step_ref - m.P_x;
    } else {
      m.P_step_ref = kNaN;
      m.e_step = kNaN;
    }
  }
  return out;
}

MetricsSummary summarize_metrics(const MetricsSeries& series, double t0, double t1) {
  MetricsSummary s;
  s.window_t0 = t0;
  s.window_t1 = t1;
  if (series.empty()) throw WindowError("empty metrics series");
  std::vector<double> t(series.size()), e(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    t[i] = series[i].t;
    e[i] = series[i].e_step;
  }
  s.rms_e_step = rms_over_window(t, e, t0, t1);
  s.min_margin_qs = s.min_margin_gen = std::numeric_limits<double>::infinity();
  s.peak_H_Omega = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.size(); ++i) {
    s.peak_H_Omega = std::max(s.peak_H_Omega, series[i].H_Omega);
    if (i == 0) continue;
    // NaN propagates so that unavailable margins stay visible
    if (std::isnan(series[i].margin_qs) || series[i].margin_qs < s.min_margin_qs) s.min_margin_qs = series[i].margin_qs;
    if (std::isnan(series[i].margin_gen) || series[i].margin_gen < s.min_margin_gen) {
      s.min_margin_gen = series[i].margin_gen;
    }
  }
  if (series.size() == 1) {
    s.min_margin_qs = series[0].margin_qs;
    s.min_margin_gen = series[0].margin_gen;
  }
  return s;
}

}  // namespace phbench
