#include "phbench/impedance.hpp"

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <Eigen/LU>

#include <random>

#include "../support/oracles.hpp"
#include "phbench/errors.hpp"

namespace phbench {
namespace {

using testing::random_vector;

ReferenceSample hold_at(const RobotModel& m, const Eigen::VectorXd& q) {
  return {forward_kinematics(m, q).pose(), Eigen::VectorXd::Zero(m.task_dim()), Eigen::VectorXd::Zero(m.task_dim())};
}

// Term-by-term evaluation of the two control laws from M, C, J, Jdot and g,
// forming Lambda and Gamma with plain dense inverses (square tasks only).
Eigen::VectorXd oracle_tau(const RobotModel& m, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                           const ReferenceSample& ref, const ImpedanceParams& p, const Eigen::VectorXd& f) {
  const Eigen::MatrixXd M = mass_matrix(m, q);
  const Eigen::MatrixXd C = coriolis_matrix(m, q, qd);
  const Eigen::MatrixXd J = geometric_jacobian(m, q);
  const Eigen::MatrixXd Jd = jacobian_dot(m, q, qd);
  const Eigen::MatrixXd Ji = J.inverse();
  const Eigen::MatrixXd L = Ji.transpose() * M * Ji;
  const Eigen::MatrixXd G = Ji.transpose() * (C - M * Ji * Jd) * Ji;
  const Eigen::VectorXd xd = J * qd;
  const Eigen::VectorXd e = task_error(m, forward_kinematics(m, q).pose(), ref.pose);
  const Eigen::VectorXd ed = xd - ref.velocity;
  const Eigen::MatrixXd K = p.stiffness.asDiagonal();
  const Eigen::MatrixXd D = p.damping.asDiagonal();
  Eigen::VectorXd F;
  if (p.inertia) {
    const Eigen::MatrixXd Ld = p.inertia->asDiagonal();
    const Eigen::MatrixXd S = L * Ld.inverse();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(L.rows(), L.cols());
    F = L * ref.acceleration + G * xd - S * (D * ed + K * e) + (S - I) * f;
  } else {
    F = L * ref.acceleration + G * xd - D * ed - K * e;
  }
  return gravity_vector(m, q) + J.transpose() * F;
}

GTEST_TEST(Impedance, PresetValues) {
  const ImpedanceParams a = ImpedanceParams::arm_with_shaping();
  EXPECT_TRUE(a.inertia_shaping());
  EXPECT_DOUBLE_EQ(a.stiffness[0], 800.0);
  EXPECT_DOUBLE_EQ(a.damping[5], 13.96);
  EXPECT_DOUBLE_EQ((*a.inertia)[3], 0.722);
  const ImpedanceParams b = ImpedanceParams::arm_without_shaping();
  EXPECT_FALSE(b.inertia_shaping());
  EXPECT_DOUBLE_EQ(b.stiffness[5], 40.0);
  EXPECT_DOUBLE_EQ(b.damping[3], 15.08);
  const ImpedanceParams l = ImpedanceParams::leg();
  EXPECT_DOUBLE_EQ(l.stiffness[2], 800.0);
  EXPECT_DOUBLE_EQ(l.damping[2], 90.0);
}

GTEST_TEST(Impedance, ValidationRejectsBadParameters) {
  ImpedanceParams p = ImpedanceParams::leg();
  EXPECT_NO_THROW(p.validate(3));
  EXPECT_THROW(p.validate(6), ConfigError);
  p.damping[1] = 0.0;
  EXPECT_THROW(p.validate(3), ConfigError);
  p = ImpedanceParams::leg();
  p.inertia = Eigen::Vector3d(1.0, -1.0, 1.0);
  EXPECT_THROW(p.validate(3), ConfigError);
}

GTEST_TEST(Impedance, GantryMatchedInertiaIsPureSpring) {
  const RobotModel g = builtin_model("gantry3");
  ImpedanceParams p = ImpedanceParams::leg();
  p.inertia = Eigen::Vector3d::Constant(10.0);
  const Eigen::VectorXd q = Eigen::Vector3d(0.1, -0.2, 0.3);
  ReferenceSample ref = hold_at(g, q);
  ref.pose.position += Eigen::Vector3d(0.05, 0.02, -0.01);
  const Eigen::VectorXd f = Eigen::Vector3d(3.0, -7.0, 1.0);
  const ControlOutput out = control_with_inertia_shaping(g, q, Eigen::VectorXd::Zero(3), ref, p, f);
  const Eigen::VectorXd e = Eigen::Vector3d(-0.05, -0.02, 0.01);
  const Eigen::VectorXd expect = gravity_vector(g, q) - p.stiffness.cwiseProduct(e);
  // carriages of 1e-9 kg leave Lambda Lambda_d^-1 - I at 2e-10
  EXPECT_LT((out.tau_act - expect).norm(), 1e-7);
}

GTEST_TEST(Impedance, ZeroErrorGivesPureCompensation) {
  std::mt19937 rng(3);
  for (const char* name : {"arm6", "leg3", "gantry3"}) {
    const RobotModel m = builtin_model(name);
    const int n = static_cast<int>(m.joints.size());
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    if (std::string(name) == "arm6") q << 0.0, -0.4, 1.0, 0.0, 0.9, 0.0;
    if (std::string(name) == "leg3") q << 0.1, 0.6, -1.2;
    const Eigen::VectorXd qd = random_vector(rng, n, -1, 1);
    const TaskSpaceModel ts = task_space_model(m, q, qd);
    ReferenceSample ref = hold_at(m, q);
    ref.velocity = ts.jacobian * qd;
    ImpedanceParams p = m.task_dim() == 6 ? ImpedanceParams::arm_without_shaping() : ImpedanceParams::leg();
    const ControlOutput out = control_without_inertia_shaping(m, q, qd, ref, p);
    const Eigen::VectorXd expect = gravity_vector(m, q) + ts.jacobian.transpose() * ts.gamma * ref.velocity;
    EXPECT_LT((out.tau_act - expect).norm(), 1e-10) << name;
    EXPECT_LT(out.error.norm(), 1e-12);
  }
}

GTEST_TEST(Impedance, Arm6ShapingMatchesTermByTermOracle) {
  const RobotModel m = builtin_model("arm6");
  Eigen::VectorXd q(6), qd(6), f(6);
  q << 0.1, -0.35, 1.05, 0.2, 0.85, -0.1;
  qd << 0.3, -0.2, 0.5, 0.1, -0.4, 0.2;
  f << 5.0, -3.0, 2.0, 0.1, -0.2, 0.3;
  Pose target;
  target.position = Eigen::Vector3d(0.5, 0.05, 0.25);
  target.rotation = Eigen::AngleAxisd(0.2, Eigen::Vector3d(1, 1, 0).normalized()).toRotationMatrix();
  ReferenceSample ref{target, Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(6)};
  ref.velocity << 0.1, 0.0, -0.1, 0.05, 0.0, 0.0;
  ref.acceleration << 0.5, -0.2, 0.0, 0.0, 0.1, 0.0;
  const ImpedanceParams p = ImpedanceParams::arm_with_shaping();
  const Eigen::VectorXd tau = control_with_inertia_shaping(m, q, qd, ref, p, f).tau_act;
  EXPECT_LT((tau - oracle_tau(m, q, qd, ref, p, f)).cwiseAbs().maxCoeff(), 1e-10);
  // dispatch picks the same law
  EXPECT_LT((impedance_control(m, q, qd, ref, p, f).tau_act - tau).norm(), 1e-12);
}

GTEST_TEST(Impedance, Leg3WithoutShapingMatchesTermByTermOracle) {
  const RobotModel m = builtin_model("leg3");
  const Eigen::VectorXd q = Eigen::Vector3d(0.15, 0.7, -1.4);
  const Eigen::VectorXd qd = Eigen::Vector3d(-0.5, 1.0, 0.8);
  Pose target;
  target.position = Eigen::Vector3d(0.05, -0.02, -0.45);
  ReferenceSample ref{target, Eigen::Vector3d(0.1, 0.0, 0.2), Eigen::Vector3d(1.0, 0.0, -2.0)};
  const ImpedanceParams p = ImpedanceParams::leg();
  const Eigen::VectorXd tau = control_without_inertia_shaping(m, q, qd, ref, p).tau_act;
  EXPECT_LT((tau - oracle_tau(m, q, qd, ref, p, Eigen::VectorXd())).cwiseAbs().maxCoeff(), 1e-10);
}

GTEST_TEST(Impedance, LawsCoincideUnderMatchedInertia) {
  const RobotModel g = builtin_model("gantry3");
  ImpedanceParams with = ImpedanceParams::leg();
  with.inertia = Eigen::Vector3d::Constant(10.0);
  const ImpedanceParams without = ImpedanceParams::leg();
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, 3, -1, 1);
    const Eigen::VectorXd qd = random_vector(rng, 3, -1, 1);
    ReferenceSample ref{Pose{}, random_vector(rng, 3, -1, 1), random_vector(rng, 3, -1, 1)};
    ref.pose.position = random_vector(rng, 3, -1, 1);
    const Eigen::VectorXd a = control_with_inertia_shaping(g, q, qd, ref, with, Eigen::VectorXd::Zero(3)).tau_act;
    const Eigen::VectorXd b = control_without_inertia_shaping(g, q, qd, ref, without).tau_act;
    // the gantry's carriages weigh 1e-9 kg, so Lambda is 10 I up to 1e-9
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + b.norm()));
  }
}

GTEST_TEST(Impedance, OutputIsAffineInErrorRateAndWrench) {
  const RobotModel m = builtin_model("leg3");
  const Eigen::VectorXd q = Eigen::Vector3d(0.1, 0.6, -1.3);
  const Eigen::VectorXd qd = Eigen::Vector3d(0.2, -0.3, 0.4);
  ImpedanceParams p = ImpedanceParams::leg();
  p.inertia = Eigen::Vector3d(2.0, 3.0, 4.0);
  const Pose at = forward_kinematics(m, q).pose();
  std::mt19937 rng(5);
  auto tau = [&](const Eigen::VectorXd& de, const Eigen::VectorXd& v, const Eigen::VectorXd& f) {
    ReferenceSample ref{at, v, Eigen::VectorXd::Zero(3)};
    ref.pose.position -= de;
    return control_with_inertia_shaping(m, q, qd, ref, p, f).tau_act;
  };
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
  const Eigen::VectorXd base = tau(z, z, z);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd e1 = random_vector(rng, 3, -0.1, 0.1), e2 = random_vector(rng, 3, -0.1, 0.1);
    const Eigen::VectorXd v1 = random_vector(rng, 3, -1, 1), v2 = random_vector(rng, 3, -1, 1);
    const Eigen::VectorXd f1 = random_vector(rng, 3, -9, 9), f2 = random_vector(rng, 3, -9, 9);
    const Eigen::VectorXd lhs = tau(e1 + e2, v1 + v2, f1 + f2) - base;
    const Eigen::VectorXd rhs = (tau(e1, v1, f1) - base) + (tau(e2, v2, f2) - base);
    EXPECT_LT((lhs - rhs).norm(), 1e-9 * (1.0 + lhs.norm()));
  }
}

GTEST_TEST(Impedance, SingularityAndMisuseAreReported) {
  const RobotModel m = builtin_model("planar2");
  const Eigen::VectorXd q = Eigen::Vector2d(0.3, 0.0);
  const ReferenceSample ref = hold_at(m, q);
  ImpedanceParams p;
  p.stiffness = Eigen::Vector2d(100, 100);
  p.damping = Eigen::Vector2d(10, 10);
  EXPECT_THROW(control_without_inertia_shaping(m, q, Eigen::VectorXd::Zero(2), ref, p), SingularConfiguration);
  EXPECT_THROW(control_with_inertia_shaping(m, Eigen::Vector2d(0.3, 1.0), Eigen::VectorXd::Zero(2), ref, p,
                                            Eigen::VectorXd::Zero(2)),
               ConfigError);
}

}  // namespace
}  // namespace phbench
