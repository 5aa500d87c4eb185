#include "phbench/csv_log.hpp"

#include "phbench/config_text.hpp"
#include "phbench/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace phbench {

const std::vector<std::string>& metric_column_names() {
  static const std::vector<std::string> names = {"H_q",       "H_Omega",    "P_cmd", "int_P_cmd", "gap",
                                                 "margin_qs", "margin_gen", "P_x",   "P_step_ref", "e_step"};
  return names;
}

namespace {

const char* kMetricUnits[] = {"J", "J", "W", "J", "J", "J", "J", "W", "W", "W"};

struct Column {
  std::string name;
  std::string unit;
};

std::vector<Column> columns(const CsvLayout& layout) {
  std::vector<Column> out;
  out.push_back({"t", "s"});
  const auto joint = [&](const char* prefix, const char* rev, const char* pri) {
    for (int i = 0; i < layout.dof(); ++i) {
      out.push_back({prefix + std::to_string(i), layout.joints[i] == JointKind::revolute ? rev : pri});
    }
  };
  const auto task = [&](const char* prefix, const char* lin, const char* ang) {
    for (int j = 0; j < layout.task_dim(); ++j) {
      out.push_back({prefix + std::to_string(j), layout.task_rows[j] < 3 ? lin : ang});
    }
  };
  joint("q_", "rad", "m");
  joint("qd_", "rad/s", "m/s");
  joint("tau_", "N*m", "N");
  task("x_", "m", "rad");
  task("xd_ref_", "m", "rad");
  if (layout.interaction) task("fint_", "N", "N*m");
  if (layout.metrics) {
    for (std::size_t i = 0; i < metric_column_names().size(); ++i) {
      out.push_back({metric_column_names()[i], kMetricUnits[i]});
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string strip_unit(const std::string& cell) {
  const std::size_t open = cell.find('[');
  if (open == std::string::npos) return cell;
  if (cell.back() != ']') throw SchemaError("malformed unit suffix in column '" + cell + "'");
  return cell.substr(0, open);
}

double parse_cell(const std::string& cell, int line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (cell == "nan" || cell == "-nan") return std::numeric_limits<double>::quiet_NaN();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw SchemaError("line " + std::to_string(line) + ": '" + cell + "' is not a number");
  }
  return v;
}

int count_prefix(const std::vector<std::string>& names, std::size_t from, const std::string& prefix) {
  int n = 0;
  while (from + n < names.size() && names[from + n] == prefix + std::to_string(n)) ++n;
  return n;
}

}  // namespace

CsvLayout CsvLayout::for_models(const RobotModel& robot, const RobotModel& task) {
  CsvLayout layout;
  for (const JointSpec& j : robot.joints) layout.joints.push_back(j.kind);
  layout.task_rows = task.task_rows;
  return layout;
}

std::vector<std::string> CsvLayout::header() const {
  std::vector<std::string> out;
  for (const Column& c : columns(*this)) out.push_back(c.name + "[" + c.unit + "]");
  return out;
}

void write_csv(std::ostream& out, CsvLayout layout, const std::vector<LogSample>& log, const MetricsSeries& metrics) {
  if (!metrics.empty() && metrics.size() != log.size()) throw SchemaError("metrics and log lengths differ");
  layout.metrics = !metrics.empty();
  layout.interaction = log.empty() || log.front().f_int.size() > 0;
  const int n = layout.dof(), k = layout.task_dim();

  const std::vector<std::string> head = layout.header();
  for (std::size_t i = 0; i < head.size(); ++i) out << (i ? "," : "") << head[i];
  out << '\n';

  std::string row;
  const auto cell = [&row](double v) {
    row += ',';
    row += config::format_number(v);
  };
  const auto vec = [&](const Eigen::VectorXd& v, int size, const char* what) {
    if (v.size() != size) throw SchemaError(std::string(what) + " has the wrong size for the CSV layout");
    for (int i = 0; i < size; ++i) cell(v[i]);
  };
  for (std::size_t r = 0; r < log.size(); ++r) {
    const LogSample& s = log[r];
    row = config::format_number(s.t);
    vec(s.q, n, "q");
    vec(s.qd, n, "qd");
    vec(s.tau, n, "tau");
    vec(s.x, k, "x");
    vec(s.xd_ref, k, "xd_ref");
    if (layout.interaction) vec(s.f_int, k, "f_int");
    if (layout.metrics) {
      const MetricsSample& m = metrics[r];
      for (double v : {m.H_q, m.H_Omega, m.P_cmd, m.int_P_cmd, m.gap, m.margin_qs, m.margin_gen, m.P_x, m.P_step_ref,
                       m.e_step}) {
        cell(v);
      }
    }
    out << row << '\n';
  }
}

CsvLog read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> names;
  for (const std::string& c : split(line)) names.push_back(strip_unit(c));

  CsvLog result;
  CsvLayout& layout = result.layout;
  if (names.empty() || names[0] != "t") throw SchemaError("first column must be t");
  const int n = count_prefix(names, 1, "q_");
  if (n == 0) throw SchemaError("no q_ columns");
  std::size_t pos = 1 + n;
  for (const char* prefix : {"qd_", "tau_"}) {
    if (count_prefix(names, pos, prefix) != n) throw SchemaError(std::string("expected ") + std::to_string(n) + " " + prefix + " columns");
    pos += n;
  }
  const int k = count_prefix(names, pos, "x_");
  if (k == 0) throw SchemaError("no x_ columns");
  pos += k;
  if (count_prefix(names, pos, "xd_ref_") != k) throw SchemaError("expected " + std::to_string(k) + " xd_ref_ columns");
  pos += k;
  const int nf = count_prefix(names, pos, "fint_");
  if (nf != 0 && nf != k) throw SchemaError("expected " + std::to_string(k) + " fint_ columns");
  layout.interaction = nf == k;
  pos += nf;
  const std::vector<std::string>& mnames = metric_column_names();
  layout.metrics = pos < names.size();
  if (layout.metrics) {
    if (names.size() - pos != mnames.size()) throw SchemaError("metric columns are incomplete");
    for (std::size_t i = 0; i < mnames.size(); ++i) {
      if (names[pos + i] != mnames[i]) throw SchemaError("expected column " + mnames[i] + ", found " + names[pos + i]);
    }
  }

  // Units identify prismatic joints and rotational task rows.
  const std::vector<std::string> raw = split(line);
  for (int i = 0; i < n; ++i) {
    layout.joints.push_back(raw[1 + i].ends_with("[m]") ? JointKind::prismatic : JointKind::revolute);
  }
  int linear = 0, angular = 0;
  for (int j = 0; j < k; ++j) {
    layout.task_rows.push_back(raw[1 + 3 * n + j].ends_with("[rad]") ? 3 + angular++ : linear++);
  }

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != names.size()) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + std::to_string(cells.size()) + " cells, header has " +
                        std::to_string(names.size()));
    }
    std::size_t c = 0;
    const auto next = [&]() { return parse_cell(cells[c++], line_no); };
    const auto vec = [&](int size) {
      Eigen::VectorXd v(size);
      for (int i = 0; i < size; ++i) v[i] = next();
      return v;
    };
    LogSample s;
    s.t = next();
    s.q = vec(n);
    s.qd = vec(n);
    s.tau = vec(n);
    s.x = vec(k);
    s.xd_ref = vec(k);
    if (layout.interaction) s.f_int = vec(k);
    result.log.push_back(std::move(s));
    if (layout.metrics) {
      MetricsSample m;
      m.t = result.log.back().t;
      for (double* field : {&m.H_q, &m.H_Omega, &m.P_cmd, &m.int_P_cmd, &m.gap, &m.margin_qs, &m.margin_gen, &m.P_x,
                            &m.P_step_ref, &m.e_step}) {
        *field = next();
      }
      result.metrics.push_back(m);
    }
  }
  return result;
}

}  // namespace phbench
