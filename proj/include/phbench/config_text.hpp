#pragma once

// Reader/writer for the structured-text format shared by model files and
// scenario configs: a small TOML subset with `[table]`, `[[array-of-tables]]`,
// `key = value`, numbers, booleans, double-quoted strings, (nested) arrays and
// `#` comments.

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace phbench::config {

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<double, bool, std::string, Array> data;
  int line = 0;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
};

class Table {
 public:
  Table() = default;
  Table(std::string name, int line) : name_(std::move(name)), line_(line) {}

  const std::string& name() const { return name_; }
  int line() const { return line_; }
  const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

  bool has(std::string_view key) const;
  const Value& at(std::string_view key) const;

  double number(std::string_view key) const;
  double number_or(std::string_view key, double fallback) const;
  int integer(std::string_view key) const;
  bool boolean(std::string_view key) const;
  bool boolean_or(std::string_view key, bool fallback) const;
  std::string string(std::string_view key) const;
  std::string string_or(std::string_view key, std::string fallback) const;
  Eigen::Vector3d vec3(std::string_view key) const;
  Eigen::VectorXd vector(std::string_view key) const;
  std::vector<int> integers(std::string_view key) const;
  Eigen::Matrix3d mat3(std::string_view key) const;

  /// Throws ParseError naming the first key not listed in `allowed`.
  void require_known_keys(const std::vector<std::string_view>& allowed) const;

  void insert(std::string key, Value value, int line);

 private:
  std::string name_;
  int line_ = 0;
  std::vector<std::pair<std::string, Value>> entries_;
};

class Document {
 public:
  Document();

  const Table& root() const { return tables_.front().table; }
  /// A `[name]` table, or nullptr when absent.
  const Table* find(std::string_view name) const;
  /// All `[[name]]` tables in file order.
  std::vector<const Table*> array(std::string_view name) const;
  /// Names of every table header in file order (with duplicates for arrays).
  std::vector<std::string> table_names() const;

  Table& open_table(std::string name, int line, bool array_element);
  Table& current() { return tables_.back().table; }

 private:
  struct Entry {
    Table table;
    bool array_element;
  };
  std::vector<Entry> tables_;
};

Document parse(std::string_view text);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// Incremental writer producing text that `parse` accepts.
class Writer {
 public:
  void comment(std::string_view text);
  void table(std::string_view name);
  void array_table(std::string_view name);
  void key(std::string_view name, double v);
  void key(std::string_view name, bool v);
  void key(std::string_view name, std::string_view v);
  void key(std::string_view name, const char* v) { key(name, std::string_view(v)); }
  void key(std::string_view name, const Eigen::Ref<const Eigen::VectorXd>& v);
  void key(std::string_view name, const std::vector<int>& v);
  void matrix_key(std::string_view name, const Eigen::Matrix3d& m);
  void blank();

  std::string str() const { return out_; }

 private:
  std::string out_;
};

}  // namespace phbench::config
