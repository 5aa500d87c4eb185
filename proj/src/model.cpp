#include "phbench/model.hpp"

#include "phbench/config_text.hpp"
#include "phbench/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace phbench {

namespace {

constexpr double kAxisTolerance = 1e-12;

std::string joint_label(std::size_t i) { return "joint " + std::to_string(i); }
std::string link_label(std::size_t i) { return "link " + std::to_string(i); }

void validate_inertia(const Eigen::Matrix3d& inertia, const std::string& label) {
  if (!inertia.allFinite()) throw ModelError(label + ": inertia has non-finite entries");
  const double scale = inertia.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * std::max(scale, 1e-12);
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw ModelError(label + ": inertia tensor is not symmetric");
  }
  const Eigen::Vector3d principal = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(inertia).eigenvalues();
  if (principal.minCoeff() < -tol) throw ModelError(label + ": inertia tensor is not positive semidefinite");
  const double a = principal[0];
  const double b = principal[1];
  const double c = principal[2];
  if (a + b < c - tol || a + c < b - tol || b + c < a - tol) {
    throw ModelError(label + ": principal moments violate the triangle inequality");
  }
}

}  // namespace

Eigen::Matrix3d rpy_to_rotation(const Eigen::Vector3d& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Eigen::Matrix3d JointSpec::origin_rotation() const { return rpy_to_rotation(origin_rpy); }

double RobotModel::total_mass() const {
  double m = 0.0;
  for (const LinkSpec& link : links) m += link.mass;
  return m;
}

void validate(const RobotModel& model) {
  if (model.joints.empty()) throw ModelError("model has no joints");
  if (model.joints.size() != model.links.size()) {
    throw ModelError("not a serial chain: " + std::to_string(model.joints.size()) + " joints but " +
                     std::to_string(model.links.size()) + " links");
  }
  if (!model.gravity.allFinite()) throw ModelError("gravity must be finite");
  for (std::size_t i = 0; i < model.joints.size(); ++i) {
    const JointSpec& j = model.joints[i];
    if (!j.axis.allFinite() || std::abs(j.axis.norm() - 1.0) > kAxisTolerance) {
      throw ModelError(joint_label(i) + ": axis is not a unit vector");
    }
    if (!j.origin_xyz.allFinite() || !j.origin_rpy.allFinite()) {
      throw ModelError(joint_label(i) + ": origin must be finite");
    }
    if (j.position_limits && !(j.position_limits->first < j.position_limits->second)) {
      throw ModelError(joint_label(i) + ": lower limit must be below upper limit");
    }
  }
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    const LinkSpec& l = model.links[i];
    if (!std::isfinite(l.mass) || l.mass <= 0.0) throw ModelError(link_label(i) + ": mass must be > 0");
    if (!l.com.allFinite()) throw ModelError(link_label(i) + ": centre of mass must be finite");
    validate_inertia(l.inertia, link_label(i));
  }
  if (model.end_effector_link < 0 || model.end_effector_link >= model.dof()) {
    throw ModelError("end_effector_link out of range");
  }
  if (!model.end_effector_offset.allFinite()) throw ModelError("end-effector offset must be finite");
  if (model.task_rows.empty()) throw ModelError("task_rows must not be empty");
  for (std::size_t r = 0; r < model.task_rows.size(); ++r) {
    const int row = model.task_rows[r];
    if (row < 0 || row > 5) throw ModelError("task_rows entries must lie in [0, 5]");
    if (r > 0 && row <= model.task_rows[r - 1]) throw ModelError("task_rows must be strictly increasing");
  }
}

RobotModel parse_model(std::string_view text) {
  const config::Document doc = config::parse(text);
  doc.root().require_known_keys({});
  const config::Table* robot = doc.find("robot");
  if (robot == nullptr) throw ParseError(1, "missing [robot] table");
  robot->require_known_keys(
      {"name", "gravity_m_s2", "end_effector_link", "end_effector_offset_m", "task_rows"});

  RobotModel model;
  model.name = robot->string_or("name", "");
  model.gravity = robot->vec3("gravity_m_s2");
  model.end_effector_link = robot->integer("end_effector_link");
  if (robot->has("end_effector_offset_m")) model.end_effector_offset = robot->vec3("end_effector_offset_m");
  model.task_rows = robot->integers("task_rows");

  const auto joints = doc.array("joint");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const config::Table& t = *joints[i];
    t.require_known_keys(
        {"kind", "axis", "origin_xyz_m", "origin_rpy_rad", "limits_rad", "limits_m", "parent_link"});
    JointSpec j;
    const std::string kind = t.string("kind");
    if (kind == "revolute") {
      j.kind = JointKind::revolute;
    } else if (kind == "prismatic") {
      j.kind = JointKind::prismatic;
    } else {
      throw ParseError(t.at("kind").line, "joint kind must be \"revolute\" or \"prismatic\"");
    }
    j.axis = t.vec3("axis");
    if (t.has("origin_xyz_m")) j.origin_xyz = t.vec3("origin_xyz_m");
    if (t.has("origin_rpy_rad")) j.origin_rpy = t.vec3("origin_rpy_rad");
    const char* limit_key = j.kind == JointKind::revolute ? "limits_rad" : "limits_m";
    const char* wrong_key = j.kind == JointKind::revolute ? "limits_m" : "limits_rad";
    if (t.has(wrong_key)) throw ParseError(t.at(wrong_key).line, std::string("use ") + limit_key + " for this joint kind");
    if (t.has(limit_key)) {
      const Eigen::VectorXd lim = t.vector(limit_key);
      if (lim.size() != 2) throw ParseError(t.at(limit_key).line, "limits need exactly two entries");
      j.position_limits = std::make_pair(lim[0], lim[1]);
    }
    if (t.has("parent_link") && t.integer("parent_link") != static_cast<int>(i) - 1) {
      throw ModelError(joint_label(i) + ": parent_link must be " + std::to_string(static_cast<int>(i) - 1) +
                       " (not a serial chain)");
    }
    model.joints.push_back(j);
  }

  for (const config::Table* lt : doc.array("link")) {
    const config::Table& t = *lt;
    t.require_known_keys({"mass_kg", "com_m", "inertia_kg_m2"});
    LinkSpec l;
    l.mass = t.number("mass_kg");
    if (t.has("com_m")) l.com = t.vec3("com_m");
    if (t.has("inertia_kg_m2")) l.inertia = t.mat3("inertia_kg_m2");
    model.links.push_back(l);
  }

  for (const std::string& name : doc.table_names()) {
    if (name != "robot" && name != "joint" && name != "link") {
      throw ParseError(1, "unknown table [" + name + "] in model file");
    }
  }

  validate(model);
  return model;
}

std::string serialize_model(const RobotModel& model) {
  config::Writer w;
  w.table("robot");
  w.key("name", model.name);
  w.key("gravity_m_s2", model.gravity);
  w.key("end_effector_link", static_cast<double>(model.end_effector_link));
  w.key("end_effector_offset_m", model.end_effector_offset);
  w.key("task_rows", model.task_rows);
  for (std::size_t i = 0; i < model.joints.size(); ++i) {
    const JointSpec& j = model.joints[i];
    w.blank();
    w.array_table("joint");
    w.key("kind", j.kind == JointKind::revolute ? "revolute" : "prismatic");
    w.key("parent_link", static_cast<double>(static_cast<int>(i) - 1));
    w.key("axis", j.axis);
    w.key("origin_xyz_m", j.origin_xyz);
    w.key("origin_rpy_rad", j.origin_rpy);
    if (j.position_limits) {
      w.key(j.kind == JointKind::revolute ? "limits_rad" : "limits_m",
            Eigen::Vector2d(j.position_limits->first, j.position_limits->second));
    }
  }
  for (const LinkSpec& l : model.links) {
    w.blank();
    w.array_table("link");
    w.key("mass_kg", l.mass);
    w.key("com_m", l.com);
    w.matrix_key("inertia_kg_m2", l.inertia);
  }
  return w.str();
}

RobotModel with_vertical_trunk(const RobotModel& leg, double trunk_mass, const Eigen::Matrix3d& trunk_inertia) {
  RobotModel out = leg;
  out.name = leg.name + "+trunk";
  JointSpec trunk_joint;
  trunk_joint.kind = JointKind::prismatic;
  trunk_joint.axis = Eigen::Vector3d::UnitZ();
  LinkSpec trunk;
  trunk.mass = trunk_mass;
  trunk.inertia = trunk_inertia;
  out.joints.insert(out.joints.begin(), trunk_joint);
  out.links.insert(out.links.begin(), trunk);
  out.end_effector_link += 1;
  validate(out);
  return out;
}

RobotModel subchain(const RobotModel& model, int first_joint) {
  if (first_joint < 0 || first_joint >= model.dof()) throw ModelError("subchain start out of range");
  if (model.end_effector_link < first_joint) throw ModelError("end effector lies before the subchain start");
  if (first_joint == 0) return model;
  RobotModel out = model;
  out.joints.erase(out.joints.begin(), out.joints.begin() + first_joint);
  out.links.erase(out.links.begin(), out.links.begin() + first_joint);
  out.end_effector_link -= first_joint;
  return out;
}

RobotModel scale_link_masses(const RobotModel& model, const std::vector<double>& factors) {
  if (factors.empty()) return model;
  if (factors.size() != model.links.size()) {
    throw ModelError("mass scale needs one factor per link (" + std::to_string(model.links.size()) + ")");
  }
  RobotModel out = model;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (!(factors[i] > 0.0)) throw ModelError("mass scale factors must be > 0");
    out.links[i].mass *= factors[i];
    out.links[i].inertia *= factors[i];
  }
  return out;
}

}  // namespace phbench
