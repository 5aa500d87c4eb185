#include "phbench/scenario.hpp"

#include "phbench/config_text.hpp"
#include "phbench/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace phbench {

Eigen::VectorXd inverse_kinematics(const RobotModel& model, const Pose& target, const Eigen::VectorXd& q_guess,
                                   double tolerance, int max_iterations) {
  constexpr double kDamping = 1e-6;
  Eigen::VectorXd q = q_guess;
  const int k = model.task_dim();
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd e = task_error(model, forward_kinematics(model, q).pose(), target);
    if (e.norm() < tolerance) return q;
    const Eigen::MatrixXd J = geometric_jacobian(model, q);
    const Eigen::MatrixXd JJt = J * J.transpose() + kDamping * Eigen::MatrixXd::Identity(k, k);
    q -= J.transpose() * JJt.partialPivLu().solve(e);
  }
  const double residual = task_error(model, forward_kinematics(model, q).pose(), target).norm();
  if (residual < tolerance) return q;
  throw ConfigError("inverse kinematics did not converge (residual " + config::format_number(residual) + ")");
}

Eigen::Vector3d leg3_rest_pose() {
  const double a = std::acos(0.8);
  return {0.0, a, -2.0 * a};
}

Eigen::VectorXd arm6_home_pose() {
  Eigen::VectorXd q(6);
  q << 0.0, -0.4, 1.0, 0.0, 0.9, 0.0;
  return q;
}

namespace {

Scenario step_arm(bool shaping) {
  Scenario s;
  s.name = shaping ? "step_arm" : "step_arm_no_is";
  s.plant = builtin_model("arm6");
  s.q0 = arm6_home_pose();
  s.qd0 = Eigen::VectorXd::Zero(6);
  s.params = shaping ? ImpedanceParams::arm_with_shaping() : ImpedanceParams::arm_without_shaping();
  s.reference = ReferenceSignal::step(s.plant, forward_kinematics(s.plant, s.q0).pose(), 0, 0.4, 0.0);
  s.sim.duration = 2.0;
  return s;
}

Scenario cpg_leg() {
  Scenario s;
  s.name = "cpg_leg";
  s.plant = builtin_model("leg3");
  Pose rest = forward_kinematics(s.plant, leg3_rest_pose()).pose();
  const ReferenceSignal gait = ReferenceSignal::gait(s.plant, rest, 0.40, 0.7, 0.08);
  s.reference = gait.position_only();
  s.q0 = inverse_kinematics(s.plant, gait.evaluate(0.0).pose, leg3_rest_pose());
  s.qd0 = Eigen::VectorXd::Zero(3);
  s.params = ImpedanceParams::leg();
  s.sim.duration = 10.0;
  return s;
}

Scenario jump_leg() {
  Scenario s;
  s.name = "jump_leg";
  const RobotModel leg = builtin_model("leg3");
  s.plant = with_vertical_trunk(leg, 3.0, 0.02 * Eigen::Matrix3d::Identity());
  s.control_offset = 1;
  s.q0.resize(4);
  s.q0 << 0.5, leg3_rest_pose();
  s.qd0 = Eigen::VectorXd::Zero(4);
  s.params = ImpedanceParams::leg();
  const Pose rest = forward_kinematics(leg, leg3_rest_pose()).pose();
  s.reference = ReferenceSignal::jump_sequence(leg, rest, 1.0, 0.2, 1.5);
  s.sim.duration = 3.0;
  s.sim.contact = ContactParams{};
  s.sim.joint_limits = JointLimitParams{};
  return s;
}

Scenario step_gantry() {
  Scenario s;
  s.name = "step_gantry";
  s.plant = builtin_model("gantry3");
  s.q0 = Eigen::VectorXd::Zero(3);
  s.qd0 = Eigen::VectorXd::Zero(3);
  s.params.stiffness = Eigen::Vector3d::Constant(800.0);
  s.params.damping = Eigen::Vector3d::Constant(134.2);
  s.params.inertia = Eigen::Vector3d::Constant(10.0);
  s.reference = ReferenceSignal::step(s.plant, forward_kinematics(s.plant, s.q0).pose(), 0, 0.4, 0.0);
  s.sim.duration = 2.0;
  return s;
}

Scenario swing_planar2() {
  Scenario s;
  s.name = "swing_planar2";
  s.plant = builtin_model("planar2");
  s.q0 = Eigen::Vector2d(1.2, -0.7);
  s.qd0 = Eigen::Vector2d(0.5, 0.0);
  s.actuated = false;
  s.params.stiffness = Eigen::Vector2d::Ones();
  s.params.damping = Eigen::Vector2d::Ones();
  s.reference = ReferenceSignal::constant(s.plant, forward_kinematics(s.plant, s.q0).pose());
  s.sim.duration = 5.0;
  return s;
}

// ---------------------------------------------------------------------------
// Config file.

std::vector<double> scale_vector(const config::Table& t, std::string_view key, int n) {
  const config::Value& v = t.at(key);
  if (v.is_number()) return std::vector<double>(n, std::get<double>(v.data));
  const Eigen::VectorXd x = t.vector(key);
  return {x.data(), x.data() + x.size()};
}

ImpedanceParams parse_impedance(const config::Table& t) {
  t.require_known_keys({"stiffness", "damping", "inertia"});
  ImpedanceParams p;
  p.stiffness = t.vector("stiffness");
  p.damping = t.vector("damping");
  if (t.has("inertia")) p.inertia = t.vector("inertia");
  return p;
}

ReferenceSignal parse_reference(const config::Table& t, const RobotModel& controller, const Eigen::VectorXd& qc) {
  t.require_known_keys({"kind", "base_xyz_m", "base_rpy_rad", "position_only", "axis", "amplitude", "time_s",
                        "step_length_m", "period_s", "step_height_m", "forward_axis", "vertical_axis", "drop_m",
                        "return_delay_s", "start_s", "count", "repeat_period_s", "omega_rad_s", "phase_rad",
                        "velocity"});
  Pose base = forward_kinematics(controller, qc).pose();
  if (t.has("base_xyz_m")) base.position = t.vec3("base_xyz_m");
  if (t.has("base_rpy_rad")) base.rotation = rpy_to_rotation(t.vec3("base_rpy_rad"));
  const std::string kind = t.string("kind");
  const int k = controller.task_dim();
  ReferenceSignal r;
  if (kind == "constant") {
    r = ReferenceSignal::constant(controller, base);
  } else if (kind == "step") {
    r = ReferenceSignal::step(controller, base, t.integer("axis"), t.number("amplitude"), t.number_or("time_s", 0.0));
  } else if (kind == "gait") {
    r = ReferenceSignal::gait(controller, base, t.number("step_length_m"), t.number("period_s"),
                              t.number_or("step_height_m", 0.08), t.has("forward_axis") ? t.integer("forward_axis") : 0,
                              t.has("vertical_axis") ? t.integer("vertical_axis") : 2);
  } else if (kind == "jump_sequence") {
    r = ReferenceSignal::jump_sequence(controller, base, t.number("drop_m"), t.number("return_delay_s"),
                                       t.number_or("start_s", 0.0), t.has("count") ? t.integer("count") : 1,
                                       t.number_or("repeat_period_s", 0.0),
                                       t.has("vertical_axis") ? t.integer("vertical_axis") : 2);
  } else if (kind == "sinusoid") {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(k);
    r = ReferenceSignal::sinusoid(controller, base, t.vector("amplitude"), t.vector("omega_rad_s"),
                                  t.has("phase_rad") ? t.vector("phase_rad") : zero);
  } else if (kind == "ramp") {
    r = ReferenceSignal::ramp(controller, base, t.vector("velocity"));
  } else {
    throw ConfigError("unknown reference kind '" + kind + "'");
  }
  return t.boolean_or("position_only", false) ? r.position_only() : r;
}

ExternalWrench parse_external_wrench(const config::Table& t, int k) {
  t.require_known_keys({"offset", "amplitude", "omega_rad_s", "phase_rad"});
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(k);
  const Eigen::VectorXd offset = t.has("offset") ? t.vector("offset") : zero;
  const Eigen::VectorXd amp = t.has("amplitude") ? t.vector("amplitude") : zero;
  const Eigen::VectorXd omega = t.has("omega_rad_s") ? t.vector("omega_rad_s") : zero;
  const Eigen::VectorXd phase = t.has("phase_rad") ? t.vector("phase_rad") : zero;
  for (const Eigen::VectorXd* v : {&offset, &amp, &omega, &phase}) {
    if (v->size() != k) throw ConfigError("external_wrench vectors need " + std::to_string(k) + " entries");
  }
  return [=](double time) -> Eigen::VectorXd {
    Eigen::VectorXd f = offset;
    for (int i = 0; i < k; ++i) f[i] += amp[i] * std::sin(omega[i] * time + phase[i]);
    return f;
  };
}

RobotModel load_model(const config::Table& t, const std::filesystem::path& base_dir) {
  if (t.has("builtin") == t.has("file")) throw ConfigError("[model] needs exactly one of 'builtin' or 'file'");
  if (t.has("builtin")) return builtin_model(t.string("builtin"));
  std::filesystem::path path = t.string("file");
  if (path.is_relative()) path = base_dir / path;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace

std::vector<std::string> scenario_preset_names() {
  return {"step_arm", "step_arm_no_is", "cpg_leg", "jump_leg", "step_gantry", "swing_planar2"};
}

Scenario scenario_preset(std::string_view name) {
  if (name == "step_arm") return step_arm(true);
  if (name == "step_arm_no_is") return step_arm(false);
  if (name == "cpg_leg") return cpg_leg();
  if (name == "jump_leg") return jump_leg();
  if (name == "step_gantry") return step_gantry();
  if (name == "swing_planar2") return swing_planar2();
  throw ConfigError("unknown scenario preset '" + std::string(name) + "'");
}

ScenarioConfig parse_scenario_config(std::string_view text, const std::filesystem::path& base_dir) {
  const config::Document doc = config::parse(text);
  if (!doc.root().entries().empty()) throw ConfigError("scenario config keys must live inside tables");
  for (const std::string& name : doc.table_names()) {
    static const std::vector<std::string> known = {"scenario", "model",   "impedance",    "reference",
                                                   "sim",      "contact", "joint_limits", "external_wrench"};
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError("unknown table [" + name + "]");
    }
  }

  ScenarioConfig cfg;
  Scenario& s = cfg.scenario;
  const config::Table* scen = doc.find("scenario");
  if (scen) {
    scen->require_known_keys({"preset", "name", "output", "rms_window_s", "actuated"});
    if (scen->has("preset")) s = scenario_preset(scen->string("preset"));
  }
  if (s.name.empty()) s.name = "custom";

  if (const config::Table* t = doc.find("model")) {
    t->require_known_keys({"builtin", "file", "trunk_mass_kg", "trunk_inertia_kg_m2", "initial_q", "initial_qd"});
    const bool preset_model = !t->has("builtin") && !t->has("file");
    if (!preset_model) {
      s.plant = load_model(*t, base_dir);
      s.control_offset = 0;
      if (t->has("trunk_mass_kg")) {
        const Eigen::Matrix3d inertia =
            t->has("trunk_inertia_kg_m2") ? t->mat3("trunk_inertia_kg_m2") : Eigen::Matrix3d::Zero();
        s.plant = with_vertical_trunk(s.plant, t->number("trunk_mass_kg"), inertia);
        s.control_offset = 1;
      }
      s.q0 = Eigen::VectorXd::Zero(s.plant.dof());
      s.qd0 = Eigen::VectorXd::Zero(s.plant.dof());
    } else if (t->has("trunk_mass_kg") || t->has("trunk_inertia_kg_m2")) {
      throw ConfigError("trunk keys need 'builtin' or 'file' in [model]");
    }
    if (t->has("initial_q")) s.q0 = t->vector("initial_q");
    if (t->has("initial_qd")) s.qd0 = t->vector("initial_qd");
  } else if (s.plant.joints.empty()) {
    throw ConfigError("config needs a [model] table or a scenario preset");
  }
  if (s.q0.size() != s.plant.dof() || s.qd0.size() != s.plant.dof()) {
    throw ConfigError("initial state needs " + std::to_string(s.plant.dof()) + " joint values");
  }

  if (const config::Table* t = doc.find("sim")) {
    t->require_known_keys({"duration_s", "control_dt_s", "physics_substeps", "singular_threshold", "model_error_scale",
                           "divergence_limit"});
    s.sim.duration = t->number_or("duration_s", s.sim.duration);
    s.sim.control_dt = t->number_or("control_dt_s", s.sim.control_dt);
    if (t->has("physics_substeps")) s.sim.physics_substeps = t->integer("physics_substeps");
    s.task_space.singular_threshold = t->number_or("singular_threshold", s.task_space.singular_threshold);
    s.sim.divergence_limit = t->number_or("divergence_limit", s.sim.divergence_limit);
    if (t->has("model_error_scale")) {
      s.sim.model_error_scale = scale_vector(*t, "model_error_scale", s.plant.dof());
      if (static_cast<int>(s.sim.model_error_scale.size()) != s.plant.dof()) {
        throw ConfigError("model_error_scale needs one factor per link (" + std::to_string(s.plant.dof()) + ")");
      }
    }
  }

  if (const config::Table* t = doc.find("contact")) {
    t->require_known_keys({"enabled", "ground_height_m", "normal_stiffness", "normal_damping", "tangential_viscous"});
    if (t->boolean_or("enabled", true)) {
      ContactParams c = s.sim.contact.value_or(ContactParams{});
      c.ground_height = t->number_or("ground_height_m", c.ground_height);
      c.normal_stiffness = t->number_or("normal_stiffness", c.normal_stiffness);
      c.normal_damping = t->number_or("normal_damping", c.normal_damping);
      c.tangential_viscous = t->number_or("tangential_viscous", c.tangential_viscous);
      s.sim.contact = c;
    } else {
      s.sim.contact.reset();
    }
  }
  if (const config::Table* t = doc.find("joint_limits")) {
    t->require_known_keys({"enabled", "stiffness", "damping"});
    if (t->boolean_or("enabled", true)) {
      JointLimitParams j = s.sim.joint_limits.value_or(JointLimitParams{});
      j.stiffness = t->number_or("stiffness", j.stiffness);
      j.damping = t->number_or("damping", j.damping);
      s.sim.joint_limits = j;
    } else {
      s.sim.joint_limits.reset();
    }
  }

  // The controller model depends on the sim table (mass scaling), so the
  // task-space parts come last.
  const RobotModel controller = s.controller_model();
  const Eigen::VectorXd qc = s.q0.segment(s.control_offset, controller.dof());
  if (const config::Table* t = doc.find("impedance")) {
    s.params = parse_impedance(*t);
  } else if (s.params.stiffness.size() == 0) {
    throw ConfigError("config needs an [impedance] table or a scenario preset");
  }
  if (const config::Table* t = doc.find("reference")) {
    s.reference = parse_reference(*t, controller, qc);
  } else if (s.reference.task_dim() == 0) {
    throw ConfigError("config needs a [reference] table or a scenario preset");
  }
  if (const config::Table* t = doc.find("external_wrench")) {
    s.external_wrench = parse_external_wrench(*t, controller.task_dim());
  }

  if (scen) {
    if (scen->has("name")) s.name = scen->string("name");
    s.actuated = scen->boolean_or("actuated", s.actuated);
    if (scen->has("output")) {
      cfg.output = scen->string("output");
      if (cfg.output.is_relative() && !base_dir.empty()) cfg.output = base_dir / cfg.output;
    }
    if (scen->has("rms_window_s")) {
      const Eigen::VectorXd w = scen->vector("rms_window_s");
      if (w.size() != 2 || !(w[1] > w[0])) throw ConfigError("rms_window_s must be [t0, t1] with t1 > t0");
      cfg.window_t0 = w[0];
      cfg.window_t1 = w[1];
    }
  }
  s.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_config(ss.str(), path.parent_path());
}

}  // namespace phbench
