#include "phbench/dynamics.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <random>

#include "../support/oracles.hpp"
#include "phbench/errors.hpp"
#include "phbench/so3.hpp"

namespace phbench {
namespace {

using testing::random_vector;

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Numerical twist of the end effector along q(t) = q + t qd, in the same
// row convention as full_jacobian: [v (world); w (end-effector axes)].
Eigen::Matrix<double, 6, 1> fd_twist(const RobotModel& m, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  const double h = 1e-6;
  const CartesianState a = forward_kinematics(m, q + h * qd);
  const CartesianState b = forward_kinematics(m, q - h * qd);
  const CartesianState c = forward_kinematics(m, q);
  Eigen::Matrix<double, 6, 1> t;
  t.head<3>() = (a.position - b.position) / (2 * h);
  t.tail<3>() = (log_so3(c.orientation.transpose() * a.orientation) -
                 log_so3(c.orientation.transpose() * b.orientation)) / (2 * h);
  return t;
}

GTEST_TEST(Dynamics, Planar2ForwardKinematics) {
  const RobotModel m = builtin_model("planar2");
  EXPECT_TRUE(forward_kinematics(m, vec({0, 0})).position.isApprox(Eigen::Vector3d(2, 0, 0), 1e-15));
  EXPECT_LT((forward_kinematics(m, vec({kPi / 2, 0})).position - Eigen::Vector3d(0, 2, 0)).norm(), 1e-12);
}

GTEST_TEST(Dynamics, Planar2ClosedForms) {
  const RobotModel m = builtin_model("planar2");
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Vector2d q = random_vector(rng, 2, -kPi, kPi);
    const Eigen::Vector2d qd = random_vector(rng, 2, -3, 3);
    EXPECT_LT((mass_matrix(m, q) - testing::planar2_mass(q)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((gravity_vector(m, q) - testing::planar2_gravity(q)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((geometric_jacobian(m, q) - testing::planar2_jacobian(q)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((coriolis_matrix(m, q, qd) - testing::planar2_coriolis(q, qd)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(potential_energy(m, q), testing::planar2_potential(q), 1e-12);
  }
}

GTEST_TEST(Dynamics, SpecExamples) {
  const RobotModel p = builtin_model("planar2");
  Eigen::Matrix2d M0;
  M0 << 5, 2, 2, 1;
  EXPECT_LT((mass_matrix(p, vec({0, 0})) - M0).norm(), 1e-12);
  Eigen::Matrix2d M1;
  M1 << 3, 1, 1, 1;
  EXPECT_LT((mass_matrix(p, vec({0, kPi / 2})) - M1).norm(), 1e-12);
  EXPECT_LT((gravity_vector(p, vec({0, 0})) - Eigen::Vector2d(29.43, 9.81)).norm(), 1e-12);
  EXPECT_LT(gravity_vector(p, vec({kPi / 2, 0})).norm(), 1e-9);
  EXPECT_LT(coriolis_matrix(p, vec({0.4, 0.0}), vec({1.3, -0.7})).norm(), 1e-12);
  Eigen::Matrix2d C;
  C << 0, -1, 1, 0;
  EXPECT_LT((coriolis_matrix(p, vec({0, kPi / 2}), vec({1, 0})) - C).norm(), 1e-12);
  Eigen::Matrix2d J;
  J << 0, 0, 2, 1;
  EXPECT_LT((geometric_jacobian(p, vec({0, 0})) - J).norm(), 1e-12);

  const RobotModel g = builtin_model("gantry3");
  const Eigen::VectorXd qg = vec({0.3, -1.2, 0.7});
  EXPECT_LT((forward_kinematics(g, qg).position - Eigen::Vector3d(0.3, -1.2, 0.7)).norm(), 1e-15);
  EXPECT_LT((mass_matrix(g, qg) - 10.0 * Eigen::Matrix3d::Identity()).norm(), 1e-8);
  EXPECT_LT((gravity_vector(g, qg) - Eigen::Vector3d(0, 0, 98.1)).norm(), 1e-7);
  EXPECT_EQ(geometric_jacobian(g, qg), Eigen::MatrixXd::Identity(3, 3));
  EXPECT_EQ(jacobian_dot(g, qg, vec({1, 2, 3})), Eigen::MatrixXd::Zero(3, 3));
}

class AllModels : public ::testing::TestWithParam<const char*> {};

TEST_P(AllModels, MassMatrixSymmetricPositiveDefinite) {
  const RobotModel m = builtin_model(GetParam());
  std::mt19937 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, m.dof(), -2, 2);
    const Eigen::MatrixXd M = mass_matrix(m, q);
    EXPECT_LT((M - M.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff(), 0.0);
  }
}

TEST_P(AllModels, GravityIsPotentialGradient) {
  const RobotModel m = builtin_model(GetParam());
  std::mt19937 rng(12);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, m.dof(), -2, 2);
    const Eigen::VectorXd g = gravity_vector(m, q);
    for (int i = 0; i < m.dof(); ++i) {
      Eigen::VectorXd dq = Eigen::VectorXd::Zero(m.dof());
      dq[i] = h;
      const double fd = (potential_energy(m, q + dq) - potential_energy(m, q - dq)) / (2 * h);
      EXPECT_NEAR(g[i], fd, 1e-6);
    }
  }
}

TEST_P(AllModels, JacobianMatchesFiniteDifferences) {
  const RobotModel m = builtin_model(GetParam());
  std::mt19937 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, m.dof(), -2, 2);
    const Eigen::VectorXd qd = random_vector(rng, m.dof(), -1, 1);
    EXPECT_LT((full_jacobian(m, q) * qd - fd_twist(m, q, qd)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST_P(AllModels, JacobianDotMatchesFiniteDifferences) {
  const RobotModel m = builtin_model(GetParam());
  std::mt19937 rng(14);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, m.dof(), -2, 2);
    const Eigen::VectorXd qd = random_vector(rng, m.dof(), -1, 1);
    const Eigen::MatrixXd fd =
        (geometric_jacobian(m, q + h * qd) - geometric_jacobian(m, q - h * qd)) / (2 * h);
    EXPECT_LT((jacobian_dot(m, q, qd) - fd).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_EQ(jacobian_dot(m, q, Eigen::VectorXd::Zero(m.dof())).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST_P(AllModels, MassDerivativesMatchFiniteDifferences) {
  const RobotModel m = builtin_model(GetParam());
  std::mt19937 rng(15);
  const double h = 1e-5;
  const Eigen::VectorXd q = random_vector(rng, m.dof(), -2, 2);
  const auto dM = mass_matrix_derivatives(m, q);
  for (int k = 0; k < m.dof(); ++k) {
    Eigen::VectorXd dq = Eigen::VectorXd::Zero(m.dof());
    dq[k] = h;
    const Eigen::MatrixXd fd = (mass_matrix(m, q + dq) - mass_matrix(m, q - dq)) / (2 * h);
    EXPECT_LT((dM[k] - fd).cwiseAbs().maxCoeff(), 1e-7) << "k=" << k;
  }
}

TEST_P(AllModels, CoriolisConsistentWithRnea) {
  const RobotModel m = builtin_model(GetParam());
  std::mt19937 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, m.dof(), -2, 2);
    const Eigen::VectorXd qd = random_vector(rng, m.dof(), -2, 2);
    const Eigen::VectorXd lhs = coriolis_matrix(m, q, qd) * qd + gravity_vector(m, q);
    EXPECT_LT((lhs - bias_forces(m, q, qd)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(coriolis_matrix(m, q, Eigen::VectorXd::Zero(m.dof())).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST_P(AllModels, MdotMinusTwoCIsSkew) {
  const RobotModel m = builtin_model(GetParam());
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, m.dof(), -2, 2);
    const Eigen::VectorXd qd = random_vector(rng, m.dof(), -2, 2);
    Eigen::MatrixXd Mdot = Eigen::MatrixXd::Zero(m.dof(), m.dof());
    const auto dM = mass_matrix_derivatives(m, q);
    for (int k = 0; k < m.dof(); ++k) Mdot += dM[k] * qd[k];
    const Eigen::MatrixXd N = Mdot - 2 * coriolis_matrix(m, q, qd);
    EXPECT_LT((N + N.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST_P(AllModels, ForwardDynamicsPlugBack) {
  const RobotModel m = builtin_model(GetParam());
  std::mt19937 rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, m.dof(), -2, 2);
    const Eigen::VectorXd qd = random_vector(rng, m.dof(), -2, 2);
    const Eigen::VectorXd tau = random_vector(rng, m.dof(), -20, 20);
    const Eigen::VectorXd f = random_vector(rng, m.task_dim(), -5, 5);
    const Eigen::VectorXd qdd = forward_dynamics(m, q, qd, tau, f);
    const Eigen::VectorXd residual = mass_matrix(m, q) * qdd + coriolis_matrix(m, q, qd) * qd +
                                     gravity_vector(m, q) - tau - geometric_jacobian(m, q).transpose() * f;
    EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((inverse_dynamics(m, q, qd, qdd) - tau - geometric_jacobian(m, q).transpose() * f)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Builtins, AllModels, ::testing::Values("planar2", "gantry3", "arm6", "leg3"));

GTEST_TEST(Dynamics, GravityCompensationHoldsStill) {
  const RobotModel m = builtin_model("planar2");
  const Eigen::VectorXd q = vec({0.4, 0.9});
  const Eigen::VectorXd qdd = forward_dynamics(m, q, Eigen::Vector2d::Zero(), gravity_vector(m, q), {});
  EXPECT_LT(qdd.norm(), 1e-12);
  const RobotModel g = builtin_model("gantry3");
  RobotModel g0 = g;
  g0.gravity.setZero();
  const Eigen::VectorXd a = forward_dynamics(g0, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                                             Eigen::Vector3d(10, 0, 0), {});
  EXPECT_LT((a - Eigen::Vector3d(1, 0, 0)).norm(), 1e-8);
}

GTEST_TEST(TaskSpace, GantryIsTrivial) {
  const RobotModel g = builtin_model("gantry3");
  const TaskSpaceModel ts = task_space_model(g, vec({0.1, 0.2, 0.3}), vec({1, -1, 2}));
  EXPECT_LT((ts.lambda - 10.0 * Eigen::Matrix3d::Identity()).norm(), 1e-8);
  EXPECT_LT(ts.gamma.norm(), 1e-12);
}

GTEST_TEST(TaskSpace, Planar2SingularWhenStraight) {
  const RobotModel p = builtin_model("planar2");
  EXPECT_THROW(task_space_model(p, vec({0.3, 0.0}), vec({0, 0})), SingularConfiguration);
  EXPECT_THROW(task_space_model(p, vec({0.3, 1e-5}), vec({0, 0})), SingularConfiguration);
  TaskSpaceOptions loose;
  loose.singular_threshold = 1e-6;
  EXPECT_NO_THROW(task_space_model(p, vec({0.3, 1e-5}), vec({0, 0}), loose));
}

GTEST_TEST(TaskSpace, Planar2LambdaMatchesDenseOracle) {
  const RobotModel p = builtin_model("planar2");
  const Eigen::Vector2d q(0.3, 1.2);
  const Eigen::Matrix2d J = testing::planar2_jacobian(q);
  const Eigen::Matrix2d Jinv = J.inverse();
  const Eigen::Matrix2d expected = Jinv.transpose() * testing::planar2_mass(q) * Jinv;
  const TaskSpaceModel ts = task_space_model(p, q, Eigen::Vector2d::Zero());
  EXPECT_LT((ts.lambda - expected).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((ts.lambda - ts.lambda.transpose()).cwiseAbs().maxCoeff(), 1e-9);
}

// Lambda-dot from finite differences equals Gamma + Gamma^T for square tasks.
GTEST_TEST(TaskSpace, GammaSymmetricPartIsLambdaRate) {
  for (const char* name : {"planar2", "leg3", "arm6"}) {
    SCOPED_TRACE(name);
    const RobotModel m = builtin_model(name);
    std::mt19937 rng(19);
    Eigen::VectorXd q = random_vector(rng, m.dof(), -1.0, 1.0);
    if (m.name == "planar2") q[1] = 1.1;
    if (m.name == "leg3") q << 0.1, 0.6, -1.2;
    if (m.name == "arm6") q << 0.1, -0.4, 1.0, 0.2, 0.9, -0.1;
    const Eigen::VectorXd qd = random_vector(rng, m.dof(), -1, 1);
    const double h = 1e-6;
    const Eigen::MatrixXd fd = (task_space_model(m, q + h * qd, qd).lambda - task_space_model(m, q - h * qd, qd).lambda) / (2 * h);
    const TaskSpaceModel ts = task_space_model(m, q, qd);
    EXPECT_LT((fd - ts.gamma - ts.gamma.transpose()).cwiseAbs().maxCoeff(), 1e-5 * (1 + fd.norm()));
  }
}

GTEST_TEST(TaskSpace, RedundantTaskUsesDynamicallyConsistentInverse) {
  RobotModel m = builtin_model("arm6");
  m.task_rows = {0, 1, 2};
  const Eigen::VectorXd q = vec({0.1, -0.4, 1.0, 0.2, 0.9, -0.1});
  const TaskSpaceModel ts = task_space_model(m, q, Eigen::VectorXd::Zero(6));
  const Eigen::MatrixXd M = mass_matrix(m, q);
  const Eigen::MatrixXd J = geometric_jacobian(m, q);
  const Eigen::MatrixXd expected = (J * M.inverse() * J.transpose()).inverse();
  EXPECT_LT((ts.lambda - expected).cwiseAbs().maxCoeff(), 1e-9);
}

GTEST_TEST(TaskCoordinates, ErrorUsesRotationVector) {
  const RobotModel m = builtin_model("arm6");
  Pose a;
  a.position = Eigen::Vector3d(1, 2, 3);
  a.rotation = exp_so3(Eigen::Vector3d(0.1, -0.2, 0.3));
  Pose d = a;
  d.position.x() -= 0.4;
  const Eigen::VectorXd e = task_error(m, a, d);
  EXPECT_NEAR(e[0], 0.4, 1e-15);
  EXPECT_LT(e.tail<3>().norm(), 1e-12);
  const Eigen::Vector3d w(0.05, 0.02, -0.03);
  d.rotation = a.rotation * exp_so3(-w);
  EXPECT_LT((task_error(m, a, d).tail<3>() - w).norm(), 1e-12);
  const Pose back = pose_from_task_coordinates(m, task_coordinates(m, a), Pose{});
  EXPECT_LT((back.rotation - a.rotation).norm(), 1e-12);
  EXPECT_LT((back.position - a.position).norm(), 1e-15);
}

GTEST_TEST(So3, LogExpRoundTrip) {
  std::mt19937 rng(20);
  for (int i = 0; i < 100; ++i) {
    Eigen::Vector3d w = random_vector(rng, 3, -1.7, 1.7);
    EXPECT_LT((log_so3(exp_so3(w)) - w).norm(), 1e-12);
  }
  EXPECT_EQ(log_so3(Eigen::Matrix3d::Identity()).norm(), 0.0);
  EXPECT_LT((log_so3(exp_so3(Eigen::Vector3d(1e-9, 0, 0))) - Eigen::Vector3d(1e-9, 0, 0)).norm(), 1e-20);
}

}  // namespace
}  // namespace phbench
