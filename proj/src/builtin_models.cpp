#include "phbench/errors.hpp"
#include "phbench/model.hpp"

#include <array>

namespace phbench {

namespace {

// Two-link planar arm in the x-y plane: unit links, unit point masses at the link tips.
constexpr const char* kPlanar2 = R"(# two-link planar arm, unit lengths, unit point masses at the tips
[robot]
name = "planar2"
gravity_m_s2 = [0.0, -9.81, 0.0]
end_effector_link = 1
end_effector_offset_m = [1.0, 0.0, 0.0]
task_rows = [0, 1]

[[joint]]
kind = "revolute"
axis = [0.0, 0.0, 1.0]

[[joint]]
kind = "revolute"
axis = [0.0, 0.0, 1.0]
origin_xyz_m = [1.0, 0.0, 0.0]

[[link]]
mass_kg = 1.0
com_m = [1.0, 0.0, 0.0]

[[link]]
mass_kg = 1.0
com_m = [1.0, 0.0, 0.0]
)";

// Cartesian gantry. Only the last carriage carries mass (the first two are
// near-massless) so the joint-space mass matrix is 10 kg on every axis.
constexpr const char* kGantry3 = R"(# three orthogonal prismatic axes, 10 kg payload on the last carriage
[robot]
name = "gantry3"
gravity_m_s2 = [0.0, 0.0, -9.81]
end_effector_link = 2
task_rows = [0, 1, 2]

[[joint]]
kind = "prismatic"
axis = [1.0, 0.0, 0.0]

[[joint]]
kind = "prismatic"
axis = [0.0, 1.0, 0.0]

[[joint]]
kind = "prismatic"
axis = [0.0, 0.0, 1.0]

[[link]]
mass_kg = 1e-9

[[link]]
mass_kg = 1e-9

[[link]]
mass_kg = 10.0
inertia_kg_m2 = [[0.1, 0.0, 0.0], [0.0, 0.1, 0.0], [0.0, 0.0, 0.1]]
)";

// 6R arm: yaw, shoulder pitch, elbow pitch, then a roll-pitch-roll wrist.
// Link lengths 0.3 / 0.3 / 0.25 / 0.1 / 0.1 / 0.05 m, 20 kg in total.
constexpr const char* kArm6 = R"(# six-DoF revolute arm, anthropomorphic proportions, 20 kg
[robot]
name = "arm6"
gravity_m_s2 = [0.0, 0.0, -9.81]
end_effector_link = 5
end_effector_offset_m = [0.05, 0.0, 0.0]
task_rows = [0, 1, 2, 3, 4, 5]

[[joint]]
kind = "revolute"
axis = [0.0, 0.0, 1.0]
limits_rad = [-3.0, 3.0]

[[joint]]
kind = "revolute"
axis = [0.0, 1.0, 0.0]
origin_xyz_m = [0.0, 0.0, 0.3]
limits_rad = [-2.0, 2.0]

[[joint]]
kind = "revolute"
axis = [0.0, 1.0, 0.0]
origin_xyz_m = [0.0, 0.0, 0.3]
limits_rad = [-2.5, 2.5]

[[joint]]
kind = "revolute"
axis = [1.0, 0.0, 0.0]
origin_xyz_m = [0.25, 0.0, 0.0]
limits_rad = [-3.0, 3.0]

[[joint]]
kind = "revolute"
axis = [0.0, 1.0, 0.0]
origin_xyz_m = [0.1, 0.0, 0.0]
limits_rad = [-2.0, 2.0]

[[joint]]
kind = "revolute"
axis = [1.0, 0.0, 0.0]
origin_xyz_m = [0.1, 0.0, 0.0]
limits_rad = [-3.0, 3.0]

[[link]]
mass_kg = 2.0
com_m = [0.0, 0.0, 0.15]
inertia_kg_m2 = [[0.024, 0.0, 0.0], [0.0, 0.024, 0.0], [0.0, 0.0, 0.012]]

[[link]]
mass_kg = 3.0
com_m = [0.0, 0.0, 0.15]
inertia_kg_m2 = [[0.03, 0.0, 0.0], [0.0, 0.03, 0.0], [0.0, 0.0, 0.009]]

[[link]]
mass_kg = 5.0
com_m = [0.125, 0.0, 0.0]
inertia_kg_m2 = [[0.015, 0.0, 0.0], [0.0, 0.0375, 0.0], [0.0, 0.0, 0.0375]]

[[link]]
mass_kg = 4.0
com_m = [0.05, 0.0, 0.0]
inertia_kg_m2 = [[0.064, 0.0, 0.0], [0.0, 0.064, 0.0], [0.0, 0.0, 0.064]]

[[link]]
mass_kg = 3.0
com_m = [0.05, 0.0, 0.0]
inertia_kg_m2 = [[0.06, 0.0, 0.0], [0.0, 0.06, 0.0], [0.0, 0.0, 0.06]]

[[link]]
mass_kg = 3.0
com_m = [0.025, 0.0, 0.0]
inertia_kg_m2 = [[0.16, 0.0, 0.0], [0.0, 0.16, 0.0], [0.0, 0.0, 0.16]]
)";

// Leg hanging from a fixed hip: hip roll (x), hip pitch (y), knee (y).
// Hip-to-knee and knee-to-foot are 0.25 m; the hip-pitch axis sits 0.1 m below
// the mounting point. The knee range keeps the leg from reaching full extension.
constexpr const char* kLeg3 = R"(# three-DoF leg: hip roll, hip pitch, knee
[robot]
name = "leg3"
gravity_m_s2 = [0.0, 0.0, -9.81]
end_effector_link = 2
end_effector_offset_m = [0.0, 0.0, -0.25]
task_rows = [0, 1, 2]

[[joint]]
kind = "revolute"
axis = [1.0, 0.0, 0.0]
limits_rad = [-0.8, 0.8]

[[joint]]
kind = "revolute"
axis = [0.0, 1.0, 0.0]
origin_xyz_m = [0.0, 0.0, -0.1]
limits_rad = [-1.6, 1.6]

[[joint]]
kind = "revolute"
axis = [0.0, 1.0, 0.0]
origin_xyz_m = [0.0, 0.0, -0.25]
limits_rad = [-2.6, -0.3]

[[link]]
mass_kg = 1.5
com_m = [0.0, 0.0, -0.05]
inertia_kg_m2 = [[0.002, 0.0, 0.0], [0.0, 0.002, 0.0], [0.0, 0.0, 0.0015]]

[[link]]
mass_kg = 2.5
com_m = [0.0, 0.0, -0.1]
inertia_kg_m2 = [[0.015, 0.0, 0.0], [0.0, 0.015, 0.0], [0.0, 0.0, 0.002]]

# the shank carries the foot module, so its centre of mass sits low
[[link]]
mass_kg = 3.5
com_m = [0.0, 0.0, -0.22]
inertia_kg_m2 = [[0.012, 0.0, 0.0], [0.0, 0.012, 0.0], [0.0, 0.0, 0.002]]
)";

struct Entry {
  const char* name;
  const char* text;
};

constexpr std::array<Entry, 4> kBuiltins{{
    {"planar2", kPlanar2},
    {"gantry3", kGantry3},
    {"arm6", kArm6},
    {"leg3", kLeg3},
}};

}  // namespace

std::string builtin_model_text(std::string_view name) {
  for (const Entry& e : kBuiltins) {
    if (name == e.name) return e.text;
  }
  throw ModelError("unknown built-in model \"" + std::string(name) + "\"");
}

RobotModel builtin_model(std::string_view name) { return parse_model(builtin_model_text(name)); }

std::vector<std::string> builtin_model_names() {
  std::vector<std::string> names;
  for (const Entry& e : kBuiltins) names.emplace_back(e.name);
  return names;
}

}  // namespace phbench
