#include "phbench/dynamics.hpp"

#include "phbench/errors.hpp"
#include "phbench/so3.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace phbench {

namespace {

void check_size(const RobotModel& model, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != model.dof()) {
    std::ostringstream msg;
    msg << what << " has " << v.size() << " entries, model has " << model.dof() << " joints";
    throw std::invalid_argument(msg.str());
  }
}

Matrix6d spatial_inertia(double mass, const Eigen::Vector3d& com, const Eigen::Matrix3d& inertia_com) {
  const Eigen::Matrix3d cx = skew(com);
  Matrix6d I;
  I.topLeftCorner<3, 3>() = inertia_com - mass * cx * cx;
  I.topRightCorner<3, 3>() = mass * cx;
  I.bottomLeftCorner<3, 3>() = -mass * cx;
  I.bottomRightCorner<3, 3>() = mass * Eigen::Matrix3d::Identity();
  return I;
}

// Composite inertias IC_l = sum_{b >= l} I_b.
std::vector<Matrix6d> composite_inertias(const ChainKinematics& kin) {
  const std::size_t n = kin.inertia.size();
  std::vector<Matrix6d> ic(n);
  Matrix6d acc = Matrix6d::Zero();
  for (std::size_t b = n; b-- > 0;) {
    acc += kin.inertia[b];
    ic[b] = acc;
  }
  return ic;
}

// Spatial velocities of every link.
Matrix6Xd link_velocities(const ChainKinematics& kin, const Eigen::VectorXd& qd) {
  const Eigen::Index n = kin.axes.cols();
  Matrix6Xd V(6, n);
  Vector6d v = Vector6d::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    v += kin.axes.col(i) * qd[i];
    V.col(i) = v;
  }
  return V;
}

Eigen::VectorXd rnea(const RobotModel& model, const ChainKinematics& kin, const Eigen::VectorXd& qd,
                     const Eigen::VectorXd* qdd, bool with_gravity) {
  const int n = model.dof();
  std::vector<Vector6d> F(n);
  Vector6d V = Vector6d::Zero();
  Vector6d A = Vector6d::Zero();
  if (with_gravity) A.tail<3>() = -model.gravity;
  for (int i = 0; i < n; ++i) {
    const Vector6d S = kin.axes.col(i);
    V += S * qd[i];
    A += motion_cross(V) * S * qd[i];
    if (qdd != nullptr) A += S * (*qdd)[i];
    const Matrix6d& I = kin.inertia[i];
    F[i] = I * A + force_cross(V) * (I * V);
  }
  Eigen::VectorXd tau(n);
  Vector6d acc = Vector6d::Zero();
  for (int i = n - 1; i >= 0; --i) {
    acc += F[i];
    tau[i] = kin.axes.col(i).dot(acc);
  }
  return tau;
}

Eigen::MatrixXd select_rows(const RobotModel& model, const Eigen::MatrixXd& full) {
  Eigen::MatrixXd out(model.task_dim(), full.cols());
  for (int r = 0; r < model.task_dim(); ++r) out.row(r) = full.row(model.task_rows[r]);
  return out;
}

}  // namespace

Matrix6d motion_cross(const Vector6d& v) {
  Matrix6d m = Matrix6d::Zero();
  const Eigen::Matrix3d wx = skew(v.head<3>());
  m.topLeftCorner<3, 3>() = wx;
  m.bottomRightCorner<3, 3>() = wx;
  m.bottomLeftCorner<3, 3>() = skew(v.tail<3>());
  return m;
}

Matrix6d force_cross(const Vector6d& v) { return -motion_cross(v).transpose(); }

ChainKinematics chain_kinematics(const RobotModel& model, const Eigen::VectorXd& q) {
  check_size(model, q, "q");
  const int n = model.dof();
  ChainKinematics kin;
  kin.link_rotation.resize(n);
  kin.link_position.resize(n);
  kin.axes.resize(6, n);
  kin.inertia.resize(n);

  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    const JointSpec& joint = model.joints[i];
    p += R * joint.origin_xyz;
    R = R * joint.origin_rotation();
    const Eigen::Vector3d z = R * joint.axis;
    Vector6d S;
    if (joint.kind == JointKind::revolute) {
      S << z, p.cross(z);
      R = R * exp_so3(joint.axis * q[i]);
    } else {
      S << Eigen::Vector3d::Zero(), z;
      p += z * q[i];
    }
    kin.axes.col(i) = S;
    kin.link_rotation[i] = R;
    kin.link_position[i] = p;
    const LinkSpec& link = model.links[i];
    kin.inertia[i] = spatial_inertia(link.mass, p + R * link.com, R * link.inertia * R.transpose());
  }
  const int e = model.end_effector_link;
  kin.ee_rotation = kin.link_rotation[e];
  kin.ee_position = kin.link_position[e] + kin.link_rotation[e] * model.end_effector_offset;
  return kin;
}

CartesianState forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q) {
  const ChainKinematics kin = chain_kinematics(model, q);
  CartesianState s;
  s.position = kin.ee_position;
  s.orientation = kin.ee_rotation;
  return s;
}

CartesianState end_effector_state(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  check_size(model, qd, "qd");
  CartesianState s = forward_kinematics(model, q);
  s.twist = geometric_jacobian(model, q) * qd;
  return s;
}

Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q) {
  const ChainKinematics kin = chain_kinematics(model, q);
  const std::vector<Matrix6d> ic = composite_inertias(kin);
  const int n = model.dof();
  Eigen::MatrixXd M(n, n);
  for (int j = 0; j < n; ++j) {
    const Vector6d f = ic[j] * kin.axes.col(j);
    for (int i = 0; i <= j; ++i) {
      M(i, j) = kin.axes.col(i).dot(f);
      M(j, i) = M(i, j);
    }
  }
  return M;
}

std::vector<Eigen::MatrixXd> mass_matrix_derivatives(const RobotModel& model, const Eigen::VectorXd& q) {
  const ChainKinematics kin = chain_kinematics(model, q);
  const std::vector<Matrix6d> ic = composite_inertias(kin);
  const int n = model.dof();
  std::vector<Eigen::MatrixXd> dM(n, Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    const Matrix6d Xk = motion_cross(kin.axes.col(k));
    const Matrix6d Fk = -Xk.transpose();
    Matrix6Xd dS = Matrix6Xd::Zero(6, n);
    for (int i = k + 1; i < n; ++i) dS.col(i) = Xk * kin.axes.col(i);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i <= j; ++i) {
        // IC_j depends on q_k through every body at or beyond max(j, k)
        const Matrix6d& IC = ic[j];
        const Matrix6d& ICk = ic[std::max(j, k)];
        const Matrix6d dIC = Fk * ICk - ICk * Xk;
        const double v = dS.col(i).dot(IC * kin.axes.col(j)) + kin.axes.col(i).dot(dIC * kin.axes.col(j)) +
                         kin.axes.col(i).dot(IC * dS.col(j));
        dM[k](i, j) = v;
        dM[k](j, i) = v;
      }
    }
  }
  return dM;
}

Eigen::VectorXd gravity_vector(const RobotModel& model, const Eigen::VectorXd& q) {
  const ChainKinematics kin = chain_kinematics(model, q);
  return rnea(model, kin, Eigen::VectorXd::Zero(model.dof()), nullptr, true);
}

Eigen::VectorXd bias_forces(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  check_size(model, qd, "qd");
  const ChainKinematics kin = chain_kinematics(model, q);
  return rnea(model, kin, qd, nullptr, true);
}

Eigen::VectorXd inverse_dynamics(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& qdd) {
  check_size(model, qd, "qd");
  check_size(model, qdd, "qdd");
  const ChainKinematics kin = chain_kinematics(model, q);
  return rnea(model, kin, qd, &qdd, true);
}

Eigen::MatrixXd coriolis_matrix(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  check_size(model, qd, "qd");
  const int n = model.dof();
  const std::vector<Eigen::MatrixXd> dM = mass_matrix_derivatives(model, q);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double c = 0.0;
      for (int k = 0; k < n; ++k) c += (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * qd[k];
      C(i, j) = 0.5 * c;
    }
  }
  return C;
}

double potential_energy(const RobotModel& model, const Eigen::VectorXd& q) {
  const ChainKinematics kin = chain_kinematics(model, q);
  double U = 0.0;
  for (int i = 0; i < model.dof(); ++i) {
    const Eigen::Vector3d c = kin.link_position[i] + kin.link_rotation[i] * model.links[i].com;
    U -= model.links[i].mass * model.gravity.dot(c);
  }
  return U;
}

Eigen::MatrixXd full_jacobian(const RobotModel& model, const Eigen::VectorXd& q) {
  const ChainKinematics kin = chain_kinematics(model, q);
  const int n = model.dof();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, n);
  const Eigen::Matrix3d Rt = kin.ee_rotation.transpose();
  for (int j = 0; j <= model.end_effector_link; ++j) {
    const Vector6d S = kin.axes.col(j);
    J.block<3, 1>(0, j) = S.tail<3>() + S.head<3>().cross(kin.ee_position);
    J.block<3, 1>(3, j) = Rt * S.head<3>();
  }
  return J;
}

Eigen::MatrixXd geometric_jacobian(const RobotModel& model, const Eigen::VectorXd& q) {
  return select_rows(model, full_jacobian(model, q));
}

Eigen::MatrixXd jacobian_dot(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
  check_size(model, qd, "qd");
  const ChainKinematics kin = chain_kinematics(model, q);
  const int n = model.dof();
  const int last = model.end_effector_link;
  const Matrix6Xd V = link_velocities(kin, qd);
  const Eigen::Vector3d w_e = V.col(last).head<3>();
  const Eigen::Vector3d pdot_e = V.col(last).tail<3>() + w_e.cross(kin.ee_position);
  const Eigen::Matrix3d Rt = kin.ee_rotation.transpose();
  Eigen::MatrixXd Jd = Eigen::MatrixXd::Zero(6, n);
  for (int j = 0; j <= last; ++j) {
    const Vector6d S = kin.axes.col(j);
    const Vector6d Sd = motion_cross(V.col(j)) * S;
    Jd.block<3, 1>(0, j) = Sd.tail<3>() + Sd.head<3>().cross(kin.ee_position) + S.head<3>().cross(pdot_e);
    Jd.block<3, 1>(3, j) = Rt * (Sd.head<3>() - w_e.cross(S.head<3>()));
  }
  return select_rows(model, Jd);
}

TaskSpaceModel task_space_model(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                const TaskSpaceOptions& options) {
  TaskSpaceModel ts;
  ts.jacobian = geometric_jacobian(model, q);
  const int k = model.task_dim();
  const int n = model.dof();
  if (k > n) throw SingularConfiguration("task dimension exceeds the number of joints");
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(ts.jacobian);
  const double sigma_min = svd.singularValues()(k - 1);
  if (!(sigma_min >= options.singular_threshold)) {
    std::ostringstream msg;
    msg << "smallest singular value of J is " << sigma_min << " (threshold " << options.singular_threshold << ")";
    throw SingularConfiguration(msg.str());
  }
  ts.jacobian_dot = jacobian_dot(model, q, qd);
  const Eigen::MatrixXd M = mass_matrix(model, q);
  const Eigen::MatrixXd C = coriolis_matrix(model, q, qd);
  if (k == n) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(ts.jacobian);
    const Eigen::MatrixXd Jinv = lu.inverse();
    ts.lambda = Jinv.transpose() * M * Jinv;
    ts.gamma = Jinv.transpose() * (C - M * Jinv * ts.jacobian_dot) * Jinv;
  } else {
    const Eigen::LDLT<Eigen::MatrixXd> Mf(M);
    const Eigen::MatrixXd MinvJt = Mf.solve(ts.jacobian.transpose());
    ts.lambda = (ts.jacobian * MinvJt).inverse();
    const Eigen::MatrixXd Jbar = MinvJt * ts.lambda;
    ts.gamma = Jbar.transpose() * C * Jbar - ts.lambda * ts.jacobian_dot * Jbar;
  }
  ts.lambda = 0.5 * (ts.lambda + ts.lambda.transpose()).eval();
  return ts;
}

Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& tau, const Eigen::VectorXd& f_ext) {
  check_size(model, qd, "qd");
  check_size(model, tau, "tau");
  const ChainKinematics kin = chain_kinematics(model, q);
  const std::vector<Matrix6d> ic = composite_inertias(kin);
  const int n = model.dof();
  Eigen::MatrixXd M(n, n);
  for (int j = 0; j < n; ++j) {
    const Vector6d f = ic[j] * kin.axes.col(j);
    for (int i = 0; i <= j; ++i) {
      M(i, j) = kin.axes.col(i).dot(f);
      M(j, i) = M(i, j);
    }
  }
  Eigen::VectorXd rhs = tau - rnea(model, kin, qd, nullptr, true);
  if (f_ext.size() > 0) {
    if (f_ext.size() != model.task_dim()) throw std::invalid_argument("f_ext must have the task dimension");
    rhs += geometric_jacobian(model, q).transpose() * f_ext;
  }
  return M.llt().solve(rhs);
}

Eigen::VectorXd task_coordinates(const RobotModel& model, const Pose& pose) {
  Vector6d full;
  full << pose.position, log_so3(pose.rotation);
  Eigen::VectorXd x(model.task_dim());
  for (int r = 0; r < model.task_dim(); ++r) x[r] = full[model.task_rows[r]];
  return x;
}

Pose pose_from_task_coordinates(const RobotModel& model, const Eigen::VectorXd& x, const Pose& fill) {
  Vector6d full;
  full << fill.position, log_so3(fill.rotation);
  bool rotation_rows = false;
  for (int r = 0; r < model.task_dim(); ++r) {
    full[model.task_rows[r]] = x[r];
    rotation_rows = rotation_rows || model.task_rows[r] >= 3;
  }
  Pose p;
  p.position = full.head<3>();
  p.rotation = rotation_rows ? exp_so3(full.tail<3>()) : fill.rotation;
  return p;
}

Eigen::VectorXd task_error(const RobotModel& model, const Pose& pose, const Pose& desired) {
  Vector6d full;
  full << pose.position - desired.position, log_so3(desired.rotation.transpose() * pose.rotation);
  Eigen::VectorXd e(model.task_dim());
  for (int r = 0; r < model.task_dim(); ++r) e[r] = full[model.task_rows[r]];
  return e;
}

}  // namespace phbench
