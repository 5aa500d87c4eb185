#pragma once

// Run log CSV. Column order: t, q_*, qd_*, tau_*, x_*, xd_ref_*, fint_*, then
// the metric columns H_q, H_Omega, P_cmd, int_P_cmd, gap, margin_qs,
// margin_gen, P_x, P_step_ref, e_step. Every header cell carries its unit in
// brackets, e.g. "q_0[rad]". Cells are shortest round-trip decimals; "nan"
// marks a metric that is undefined for the run.

#include "phbench/model.hpp"
#include "phbench/ph_metrics.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace phbench {

/// Names of the metric columns in file order.
const std::vector<std::string>& metric_column_names();

struct CsvLayout {
  std::vector<JointKind> joints;  // one per q column
  std::vector<int> task_rows;     // one per x column; 0-2 translational, 3-5 rotational
  bool interaction = true;        // fint_* columns present
  bool metrics = true;            // metric columns present

  static CsvLayout for_models(const RobotModel& robot, const RobotModel& task);
  int dof() const { return static_cast<int>(joints.size()); }
  int task_dim() const { return static_cast<int>(task_rows.size()); }

  /// Header cells with unit suffixes.
  std::vector<std::string> header() const;
};

struct CsvLog {
  CsvLayout layout;
  std::vector<LogSample> log;
  MetricsSeries metrics;  // empty unless layout.metrics
};

/// Writes the header and one row per sample. `metrics` must be empty or the
/// same length as `log`; empty drops the metric columns. Samples with an
/// empty f_int drop the interaction columns (all or none).
void write_csv(std::ostream& out, CsvLayout layout, const std::vector<LogSample>& log, const MetricsSeries& metrics);

/// Throws SchemaError on a header that does not follow the column order or a
/// row that does not match the header.
CsvLog read_csv(std::istream& in);

}  // namespace phbench
