#pragma once

// Port-Hamiltonian energies, power balances, passivity margins and the
// step-power fidelity metric.

#include "phbench/dynamics.hpp"
#include "phbench/impedance.hpp"
#include "phbench/reference.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace phbench {

/// 1/2 qd^T M qd + U_g(q) - potential_datum.
double robot_hamiltonian(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                         double potential_datum = 0.0);

/// 1/2 e_dot^T inertia e_dot + 1/2 e^T K e, with e_dot = xdot - xdot_d.
double impedance_hamiltonian(const Eigen::VectorXd& e, const Eigen::VectorXd& e_dot, const Eigen::MatrixXd& inertia,
                             const Eigen::VectorXd& stiffness);

// ---------------------------------------------------------------------------
// Causal impedance model, state [x; p] with p = Lambda_d xdot.

struct CausalImpedance {
  Eigen::MatrixXd inertia;  // constant Lambda_d, SPD
  Eigen::VectorXd stiffness;
  Eigen::VectorXd damping;  // zero entries allowed here (lossless evaluator)

  int dim() const { return static_cast<int>(stiffness.size()); }
  /// Requires inertia shaping.
  static CausalImpedance from_params(const ImpedanceParams& params);
};

/// Reference expressed in task coordinates.
struct TaskTarget {
  Eigen::VectorXd x;
  Eigen::VectorXd velocity;
  Eigen::VectorXd acceleration;
};
using TaskReference = std::function<TaskTarget(double)>;
using WrenchSignal = std::function<Eigen::VectorXd(double)>;

TaskReference task_reference(const RobotModel& model, const ReferenceSignal& reference);

struct CausalTrajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> p;
  std::vector<TaskTarget> target;
  std::vector<Eigen::VectorXd> f_int;
};

/// RK4 integration of
///   xdot = Lambda_d^-1 p,  pdot = -K (x - x_d) - D (xdot - xdot_d) + pdot_d + f_int,
/// with p_d = Lambda_d xdot_d. Samples at t = i dt, i = 0..round(T/dt).
CausalTrajectory simulate_causal_impedance(const CausalImpedance& impedance, const TaskReference& reference,
                                           const WrenchSignal& f_int, const Eigen::VectorXd& x0,
                                           const Eigen::VectorXd& p0, double dt, double duration);

double causal_hamiltonian(const CausalImpedance& impedance, const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                          const TaskTarget& target);

struct BalanceTerms {
  double t = 0.0;
  double supply = 0.0;           // (xdot - xdot_d)^T (pdot_d + f_int)
  double energy_rate = 0.0;      // dH_Omega/dt, five-point stencil on the sampled H
  double dissipation = 0.0;      // (xdot - xdot_d)^T D (xdot - xdot_d)
  double reference_power = 0.0;  // (xdot - xdot_d)^T pdot_d
  double residual = 0.0;         // supply - energy_rate - dissipation
};

/// Balance terms at the interior samples 2..N-3. Needs smooth references and f_int.
std::vector<BalanceTerms> causal_balance(const CausalImpedance& impedance, const CausalTrajectory& trajectory);

// ---------------------------------------------------------------------------
// Passivity margins.

struct PortSample {
  double t = 0.0;
  Eigen::VectorXd e;
  Eigen::VectorXd e_dot;
  Eigen::VectorXd p_d_dot;
  Eigen::VectorXd f_int;  // empty or non-finite -> not available
  Eigen::MatrixXd inertia;
  /// Energy put into H_Omega by a set-point jump at this sample.
  double reference_jump_energy = 0.0;
};

/// margin(t) = int_0^t e_dot^T (pdot_d + f_int) dt + sum of jump energies - H_Omega(t) + H_Omega(0),
/// trapezoidal in time. Throws MissingInteractionData when f_int is unavailable on any sample.
std::vector<double> general_passivity_margin(const std::vector<PortSample>& samples,
                                             const Eigen::VectorXd& stiffness);
std::vector<double> general_passivity_margin(const CausalImpedance& impedance, const CausalTrajectory& trajectory);

/// gap = (H_q - H_q0) - (H_Omega - H_Omega0).
std::vector<double> hamiltonian_gap(const std::vector<double>& h_q, const std::vector<double>& h_omega,
                                    double h_q0, double h_omega0);

/// int_P_cmd - gap. Throws NonQuasiStaticReference if any reference velocity is nonzero.
std::vector<double> quasi_static_passivity_margin(const std::vector<double>& int_p_cmd,
                                                  const std::vector<double>& gap,
                                                  const std::vector<Eigen::VectorXd>& reference_velocity);

// ---------------------------------------------------------------------------
// Power distribution across the robot and impedance ports.

struct PowerSample {
  Eigen::VectorXd qd;
  Eigen::VectorXd tau_act;
  Eigen::VectorXd tau;  // total joint torque, tau_act + J^T f_int
  Eigen::VectorXd xdot;
  Eigen::VectorXd xdot_d;
  Eigen::VectorXd p_d_dot;
  Eigen::VectorXd f_int;
};

struct PowerDistribution {
  double lhs = 0.0;             // qd^T tau_act + xdot_d^T f_int
  double supply_robot = 0.0;    // qd^T tau
  double supply_impedance = 0.0;  // (xdot - xdot_d)^T (pdot_d + f_int)
  double reference_term = 0.0;  // -(xdot_d - xdot)^T pdot_d
  double residual = 0.0;        // lhs - (supply_robot - supply_impedance + reference_term)
};

PowerDistribution power_distribution(const PowerSample& sample);

// ---------------------------------------------------------------------------
// Step response of the 1-DoF mass-spring-damper and its power.

struct StepResponse {
  double x = 0.0;
  double xdot = 0.0;
};

double damping_ratio(double k, double d, double m);

/// Underdamped response to a step of `amplitude` at t = 0; zero for t < 0.
/// Throws OverdampedUnsupported when the damping ratio is >= 1.
StepResponse step_response_closed_form(double k, double d, double m, double amplitude, double t);

/// P_step = xdot [k (amplitude - x) - d xdot] on the closed-form response.
double step_power_reference(double k, double d, double m, double amplitude, double t);

/// Measured Cartesian power xdot^T [K (x_d - x) - D e_dot].
double cartesian_power(const Eigen::VectorXd& xdot, const Eigen::VectorXd& e, const Eigen::VectorXd& e_dot,
                       const ImpedanceParams& params);

/// e_step = P_step - cartesian_power.
double step_power_error(double p_step, const Eigen::VectorXd& xdot, const Eigen::VectorXd& e,
                        const Eigen::VectorXd& e_dot, const ImpedanceParams& params);

/// Root mean square on [t0, t1] from the trapezoidal mean of squares, with
/// linear interpolation at the window ends. Throws WindowError.
double rms_over_window(const std::vector<double>& t, const std::vector<double>& series, double t0, double t1);

// ---------------------------------------------------------------------------
// Metrics over a logged run.

/// One control tick of a log. `q`, `qd`, `tau` span the whole chain; `x`,
/// `xd_ref`, `f_int` are task coordinates of the controlled sub-chain.
struct LogSample {
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  Eigen::VectorXd tau;
  Eigen::VectorXd x;
  Eigen::VectorXd xd_ref;
  Eigen::VectorXd f_int;  // empty or NaN entries when unknown
};

struct MetricsSample {
  double t = 0.0;
  double H_q = 0.0;
  double H_Omega = 0.0;
  double P_cmd = 0.0;
  double int_P_cmd = 0.0;
  double gap = 0.0;
  double margin_qs = 0.0;
  double margin_gen = 0.0;
  double P_x = 0.0;
  double P_step_ref = 0.0;
  double e_step = 0.0;
};

using MetricsSeries = std::vector<MetricsSample>;

struct MetricsContext {
  RobotModel robot;          // whole chain, energy bookkeeping
  RobotModel task;           // sub-chain the controller acts through
  int task_joint_offset = 0; // index of the task chain's first joint in q
  ImpedanceParams params;
  ReferenceSignal reference;
  TaskSpaceOptions task_space;
};

/// Columns that cannot be evaluated come out as NaN: margin_qs for moving
/// references, margin_gen without f_int, step power without a step
/// reference or with a damping ratio >= 1 on the step axis.
MetricsSeries compute_metrics(const std::vector<LogSample>& log, const MetricsContext& context);

struct MetricsSummary {
  double window_t0 = 0.0;
  double window_t1 = 0.0;
  double rms_e_step = 0.0;
  double min_margin_qs = 0.0;   // over t > t_0
  double min_margin_gen = 0.0;  // over t > t_0
  double peak_H_Omega = 0.0;
};

MetricsSummary summarize_metrics(const MetricsSeries& series, double t0, double t1);

}  // namespace phbench
