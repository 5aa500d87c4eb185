#pragma once

// Named benchmark scenarios and the scenario config file.

#include "phbench/simulator.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace phbench {

/// Damped least squares on the task error. Throws ConfigError when the
/// residual does not drop below `tolerance`.
Eigen::VectorXd inverse_kinematics(const RobotModel& model, const Pose& target, const Eigen::VectorXd& q_guess,
                                   double tolerance = 1e-12, int max_iterations = 500);

/// step_arm, step_arm_no_is, cpg_leg, jump_leg, step_gantry, swing_planar2.
std::vector<std::string> scenario_preset_names();
Scenario scenario_preset(std::string_view name);

/// Leg joint angles that put the foot 0.5 m straight below the hip roll axis.
Eigen::Vector3d leg3_rest_pose();
/// arm6 configuration the step scenarios start from.
Eigen::VectorXd arm6_home_pose();

struct ScenarioConfig {
  Scenario scenario;
  std::filesystem::path output;  // empty when the config names none
  double window_t0 = 0.0;
  double window_t1 = 0.25;
};

/// Parses a scenario config. Relative model paths resolve against `base_dir`.
/// Throws ParseError on malformed text and ConfigError on invalid content.
ScenarioConfig parse_scenario_config(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

}  // namespace phbench
