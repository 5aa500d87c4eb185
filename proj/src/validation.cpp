#include "phbench/validation.hpp"

#include "phbench/dynamics.hpp"
#include "phbench/ph_metrics.hpp"
#include "phbench/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <random>

namespace phbench {

namespace {

constexpr double kG = 9.81;

class Suite {
 public:
  explicit Suite(const ValidationOptions& options) : options_(options), rng_(options.seed) {}

  void add(std::string name, double value, double tolerance) {
    results_.push_back({std::move(name), value, tolerance, std::isfinite(value) && value <= tolerance});
  }

  Eigen::VectorXd random_q(int n, double range = M_PI) {
    std::uniform_real_distribution<double> u(-range, range);
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = u(rng_);
    return q;
  }

  Eigen::MatrixXd mass(const RobotModel& model, const Eigen::VectorXd& q) const {
    Eigen::MatrixXd M = mass_matrix(model, q);
    if (options_.inject_mass_asymmetry && M.cols() > 1) M(0, 1) += 1e-3;
    return M;
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  ValidationOptions options_;
  std::mt19937 rng_;
  std::vector<CheckResult> results_;
};

void planar2_closed_forms(Suite& suite) {
  const RobotModel model = builtin_model("planar2");
  double em = 0.0, eg = 0.0, ej = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd q = suite.random_q(2);
    const double c1 = std::cos(q[0]), s1 = std::sin(q[0]);
    const double c2 = std::cos(q[1]);
    const double c12 = std::cos(q[0] + q[1]), s12 = std::sin(q[0] + q[1]);
    Eigen::Matrix2d M, J;
    M << 3.0 + 2.0 * c2, 1.0 + c2, 1.0 + c2, 1.0;
    J << -s1 - s12, -s12, c1 + c12, c12;
    const Eigen::Vector2d g(2.0 * kG * c1 + kG * c12, kG * c12);
    em = std::max(em, (suite.mass(model, q) - M).cwiseAbs().maxCoeff());
    eg = std::max(eg, (gravity_vector(model, q) - g).cwiseAbs().maxCoeff());
    ej = std::max(ej, (geometric_jacobian(model, q) - J).cwiseAbs().maxCoeff());
  }
  suite.add("planar2 mass matrix vs closed form", em, 1e-9);
  suite.add("planar2 gravity vs closed form", eg, 1e-9);
  suite.add("planar2 jacobian vs closed form", ej, 1e-9);
}

void structure(Suite& suite) {
  double asym = 0.0, not_pd = 0.0, skew = 0.0, roundtrip = 0.0;
  for (const char* name : {"arm6", "leg3"}) {
    const RobotModel model = builtin_model(name);
    const int n = model.dof();
    for (int i = 0; i < 25; ++i) {
      const Eigen::VectorXd q = suite.random_q(n);
      const Eigen::VectorXd qd = suite.random_q(n, 2.0);
      const Eigen::MatrixXd M = suite.mass(model, q);
      asym = std::max(asym, (M - M.transpose()).cwiseAbs().maxCoeff());
      const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (M + M.transpose())).eigenvalues()[0];
      if (!(lmin > 0.0)) not_pd = 1.0;

      const std::vector<Eigen::MatrixXd> dM = mass_matrix_derivatives(model, q);
      Eigen::MatrixXd Mdot = Eigen::MatrixXd::Zero(n, n);
      for (int k = 0; k < n; ++k) Mdot += dM[k] * qd[k];
      skew = std::max(skew, std::abs(qd.dot((Mdot - 2.0 * coriolis_matrix(model, q, qd)) * qd)));

      const Eigen::VectorXd tau = suite.random_q(n, 5.0);
      const Eigen::VectorXd qdd = M.partialPivLu().solve(tau - bias_forces(model, q, qd));
      roundtrip = std::max(roundtrip, (inverse_dynamics(model, q, qd, qdd) - tau).cwiseAbs().maxCoeff());
    }
  }
  suite.add("mass matrix symmetry (arm6, leg3)", asym, 1e-12);
  suite.add("mass matrix positive definite (arm6, leg3)", not_pd, 0.0);
  suite.add("qd^T (Mdot - 2C) qd = 0 (arm6, leg3)", skew, 1e-9);
  suite.add("forward/inverse dynamics round trip (arm6, leg3)", roundtrip, 1e-9);
}

double energy_audit(const Scenario& scenario) {
  Simulator sim(scenario);
  const RobotModel& model = scenario.plant;
  const double datum = potential_energy(model, scenario.q0);
  const double h0 = robot_hamiltonian(model, scenario.q0, scenario.qd0, datum);
  double work = 0.0;
  const long ticks = scenario.sim.ticks();
  for (long i = 0; i < ticks; ++i) {
    const Eigen::VectorXd q_prev = sim.state().q;
    const LogSample s = sim.step();
    work += s.tau.dot(sim.state().q - q_prev);  // torque is held over the tick
  }
  return std::abs(robot_hamiltonian(model, sim.state().q, sim.state().qd, datum) - h0 - work);
}

void energy(Suite& suite) {
  Scenario swing = scenario_preset("swing_planar2");
  swing.sim.duration = 2.0;
  suite.add("energy drift, unforced planar2 swing 2 s [J]", energy_audit(swing), 1e-3);
  Scenario gantry = scenario_preset("step_gantry");
  gantry.sim.duration = 1.0;
  suite.add("energy audit, gantry3 step 1 s [J]", energy_audit(gantry), 1e-2);
  Scenario arm = scenario_preset("step_arm");
  arm.sim.duration = 1.0;
  suite.add("energy audit, arm6 step 1 s [J]", energy_audit(arm), 1e-2);
}

void balances(Suite& suite) {
  const CausalImpedance imp{10.0 * Eigen::Matrix3d::Identity(), Eigen::Vector3d::Constant(800.0),
                            Eigen::Vector3d::Constant(134.2)};
  const Eigen::Vector3d v(0.2, -0.1, 0.05);
  const TaskReference ramp = [v](double t) { return TaskTarget{v * t, v, Eigen::Vector3d::Zero()}; };
  const WrenchSignal f = [](double t) {
    return Eigen::Vector3d(3.0 * std::sin(2.0 * t), -2.0 * std::cos(3.0 * t), std::sin(5.0 * t + 1.0)).eval();
  };
  const CausalTrajectory traj =
      simulate_causal_impedance(imp, ramp, f, Eigen::Vector3d(0.1, 0.0, -0.05), Eigen::Vector3d::Zero(), 1e-3, 2.0);
  double worst = 0.0;
  for (const BalanceTerms& b : causal_balance(imp, traj)) worst = std::max(worst, std::abs(b.residual));
  suite.add("causal balance residual, ramp reference with f_int [W]", worst, 1e-6);

  Scenario gantry = scenario_preset("step_gantry");
  gantry.sim.duration = 0.5;
  gantry.external_wrench = [](double t) { return Eigen::Vector3d(5.0 * std::sin(7.0 * t), 2.0, -1.0).eval(); };
  Simulator sim(gantry);
  const RobotModel model = gantry.controller_model();
  double pd = 0.0;
  for (long i = 0; i < gantry.sim.ticks(); ++i) {
    const LogSample s = sim.step();
    const Eigen::MatrixXd J = geometric_jacobian(model, s.q);
    const ReferenceSample ref = gantry.reference.evaluate(s.t);
    PowerSample p;
    p.qd = s.qd;
    p.tau_act = s.tau;
    p.tau = s.tau + J.transpose() * s.f_int;
    p.xdot = J * s.qd;
    p.xdot_d = ref.velocity;
    p.p_d_dot = gantry.params.inertia->asDiagonal() * ref.acceleration;
    p.f_int = s.f_int;
    pd = std::max(pd, std::abs(power_distribution(p).residual));
  }
  suite.add("power distribution identity, gantry3 with wrench [W]", pd, 1e-8);
}

void step_response(Suite& suite) {
  struct Row {
    double k, d, m;
  };
  // Arm gains with shaping (x, rotation); without shaping and the leg gains use
  // the diagonal of Lambda(x) at the arm6 home pose and the leg3 rest pose.
  const Row rows[] = {{800.0, 134.2, 10.0}, {120.0, 13.96, 0.722}, {400.0, 134.2, 22.0},
                      {400.0, 43.0, 3.42},  {800.0, 90.0, 3.69}};
  double worst = 0.0;
  for (const Row& r : rows) {
    const double dt = 1e-4;
    double x = 0.0, v = 0.0;
    const auto acc = [&](double xx, double vv) { return (r.k * (0.4 - xx) - r.d * vv) / r.m; };
    for (int i = 1; i <= 20000; ++i) {
      const double k1x = v, k1v = acc(x, v);
      const double k2x = v + 0.5 * dt * k1v, k2v = acc(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v);
      const double k3x = v + 0.5 * dt * k2v, k3v = acc(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v);
      const double k4x = v + dt * k3v, k4v = acc(x + dt * k3x, v + dt * k3v);
      x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      if (i % 100 == 0) {
        worst = std::max(worst, std::abs(step_response_closed_form(r.k, r.d, r.m, 0.4, i * dt).x - x));
      }
    }
  }
  suite.add("step response closed form vs RK4 [m]", worst, 1e-8);
}

}  // namespace

std::vector<CheckResult> run_validation_suite(const ValidationOptions& options) {
  Suite suite(options);
  planar2_closed_forms(suite);
  structure(suite);
  energy(suite);
  balances(suite);
  step_response(suite);
  return suite.take();
}

}  // namespace phbench
