#include "phbench/csv_log.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phbench/errors.hpp"
#include "phbench/scenario.hpp"

namespace phbench {
namespace {

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

GTEST_TEST(CsvLog, HeaderOrderAndUnits) {
  const Scenario s = scenario_preset("jump_leg");
  const CsvLayout layout = CsvLayout::for_models(s.plant, s.controller_model());
  const std::vector<std::string> h = layout.header();
  const std::vector<std::string> expected = {
      "t[s]",          "q_0[m]",        "q_1[rad]",       "q_2[rad]",       "q_3[rad]",     "qd_0[m/s]",
      "qd_1[rad/s]",   "qd_2[rad/s]",   "qd_3[rad/s]",    "tau_0[N]",       "tau_1[N*m]",   "tau_2[N*m]",
      "tau_3[N*m]",    "x_0[m]",        "x_1[m]",         "x_2[m]",         "xd_ref_0[m]",  "xd_ref_1[m]",
      "xd_ref_2[m]",   "fint_0[N]",     "fint_1[N]",      "fint_2[N]",      "H_q[J]",       "H_Omega[J]",
      "P_cmd[W]",      "int_P_cmd[J]",  "gap[J]",         "margin_qs[J]",   "margin_gen[J]", "P_x[W]",
      "P_step_ref[W]", "e_step[W]"};
  EXPECT_EQ(h, expected);
}

GTEST_TEST(CsvLog, RotationalRowsInRadians) {
  const RobotModel arm = builtin_model("arm6");
  const std::vector<std::string> h = CsvLayout::for_models(arm, arm).header();
  EXPECT_EQ(h[1 + 18 + 2], "x_2[m]");
  EXPECT_EQ(h[1 + 18 + 3], "x_3[rad]");
  EXPECT_EQ(h[1 + 18 + 6 + 6 + 5], "fint_5[N*m]");
}

GTEST_TEST(CsvLog, RoundTripIsExact) {
  Scenario s = scenario_preset("step_arm");
  s.sim.duration = 0.05;
  const SimTrajectory tr = run_scenario(s);
  std::stringstream buf;
  write_csv(buf, CsvLayout::for_models(s.plant, s.controller_model()), tr.log, tr.metrics);
  const std::string text = buf.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 52);

  const CsvLog back = read_csv(buf);
  ASSERT_EQ(back.log.size(), tr.log.size());
  EXPECT_EQ(back.layout.header(), CsvLayout::for_models(s.plant, s.controller_model()).header());
  for (std::size_t i = 0; i < tr.log.size(); ++i) {
    EXPECT_EQ(back.log[i].t, tr.log[i].t);
    EXPECT_EQ(back.log[i].q, tr.log[i].q);
    EXPECT_EQ(back.log[i].qd, tr.log[i].qd);
    EXPECT_EQ(back.log[i].tau, tr.log[i].tau);
    EXPECT_EQ(back.log[i].x, tr.log[i].x);
    EXPECT_EQ(back.log[i].xd_ref, tr.log[i].xd_ref);
    EXPECT_EQ(back.log[i].f_int, tr.log[i].f_int);
    EXPECT_EQ(back.metrics[i].H_Omega, tr.metrics[i].H_Omega);
    EXPECT_EQ(back.metrics[i].margin_qs, tr.metrics[i].margin_qs);
    EXPECT_EQ(back.metrics[i].e_step, tr.metrics[i].e_step);
  }
}

GTEST_TEST(CsvLog, NanCellsSurvive) {
  LogSample s;
  s.t = 0.0;
  s.q = s.qd = s.tau = Eigen::VectorXd::Zero(2);
  s.x = s.xd_ref = s.f_int = Eigen::VectorXd::Zero(2);
  MetricsSample m;
  m.margin_qs = std::nan("");
  const RobotModel p2 = builtin_model("planar2");
  std::stringstream buf;
  write_csv(buf, CsvLayout::for_models(p2, p2), {s}, {m});
  EXPECT_NE(buf.str().find(",nan,"), std::string::npos);
  const CsvLog back = read_csv(buf);
  EXPECT_TRUE(std::isnan(back.metrics[0].margin_qs));
}

GTEST_TEST(CsvLog, OptionalColumnGroups) {
  LogSample s;
  s.t = 0.5;
  s.q = s.qd = s.tau = Eigen::Vector3d(1, 2, 3);
  s.x = s.xd_ref = Eigen::Vector3d(0.1, 0.2, 0.3);
  const RobotModel g = builtin_model("gantry3");
  std::stringstream buf;
  write_csv(buf, CsvLayout::for_models(g, g), {s}, {});
  EXPECT_EQ(first_line(buf.str()),
            "t[s],q_0[m],q_1[m],q_2[m],qd_0[m/s],qd_1[m/s],qd_2[m/s],tau_0[N],tau_1[N],tau_2[N],x_0[m],x_1[m],x_2[m],"
            "xd_ref_0[m],xd_ref_1[m],xd_ref_2[m]");
  const CsvLog back = read_csv(buf);
  EXPECT_FALSE(back.layout.interaction);
  EXPECT_FALSE(back.layout.metrics);
  EXPECT_EQ(back.log[0].f_int.size(), 0);
  EXPECT_EQ(back.log[0].q, s.q);
}

GTEST_TEST(CsvLog, HeaderWithoutUnitsIsAccepted) {
  std::stringstream in("t,q_0,qd_0,tau_0,x_0,xd_ref_0\n0,1,2,3,4,5\n");
  const CsvLog log = read_csv(in);
  ASSERT_EQ(log.log.size(), 1u);
  EXPECT_EQ(log.log[0].x[0], 4.0);
}

GTEST_TEST(CsvLog, SchemaErrors) {
  const auto read = [](const std::string& text) {
    std::stringstream in(text);
    return read_csv(in);
  };
  EXPECT_THROW(read(""), SchemaError);
  EXPECT_THROW(read("time,q_0\n"), SchemaError);
  EXPECT_THROW(read("t[s],q_0[rad],q_1[rad],qd_0[rad/s]\n"), SchemaError);  // truncated
  EXPECT_THROW(read("t,q_0,qd_0,tau_0\n"), SchemaError);                     // no task columns
  EXPECT_THROW(read("t,q_0,qd_0,tau_0,x_0,x_1,xd_ref_0\n"), SchemaError);
  EXPECT_THROW(read("t,q_0,qd_0,tau_0,x_0,xd_ref_0,H_q\n"), SchemaError);  // partial metrics
  EXPECT_THROW(read("t,q_0,qd_0,tau_0,x_0,xd_ref_0\n0,1,2,3\n"), SchemaError);
  EXPECT_THROW(read("t,q_0,qd_0,tau_0,x_0,xd_ref_0\n0,1,2,3,4,five\n"), SchemaError);
  EXPECT_THROW(read("t[s,q_0\n"), SchemaError);
}

GTEST_TEST(CsvLog, WriterRejectsMismatchedSizes) {
  LogSample s;
  s.q = s.qd = s.tau = Eigen::Vector2d::Zero();
  s.x = s.xd_ref = s.f_int = Eigen::Vector2d::Zero();
  const RobotModel g = builtin_model("gantry3");
  std::stringstream buf;
  EXPECT_THROW(write_csv(buf, CsvLayout::for_models(g, g), {s}, {}), SchemaError);
  EXPECT_THROW(write_csv(buf, CsvLayout::for_models(g, g), {s}, {MetricsSample{}, MetricsSample{}}), SchemaError);
}

}  // namespace
}  // namespace phbench
