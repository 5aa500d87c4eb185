#include "phbench/config_text.hpp"

#include "phbench/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

namespace phbench::config {

namespace {

const char* type_name(const Value& v) {
  if (v.is_number()) return "number";
  if (v.is_bool()) return "boolean";
  if (v.is_string()) return "string";
  return "array";
}

bool is_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '-';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Document run() {
    Document doc;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      const char c = peek();
      if (c == '[') {
        parse_header(doc);
      } else if (is_key_char(c)) {
        parse_key_value(doc.current());
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
    }
    return doc;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }

  char get() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, message); }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') get();
    }
  }

  // Whitespace, comments and newlines; used inside arrays and between statements.
  void skip_blank_lines() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n') {
        get();
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_spaces();
    skip_comment();
    if (!eof() && peek() != '\n') fail(std::string("trailing characters after value: '") + peek() + "'");
  }

  std::string parse_key() {
    std::string key;
    while (!eof() && is_key_char(peek())) key.push_back(get());
    if (key.empty()) fail("expected a key");
    return key;
  }

  void parse_header(Document& doc) {
    const int header_line = line_;
    get();  // '['
    bool array_element = false;
    if (peek() == '[') {
      get();
      array_element = true;
    }
    skip_spaces();
    std::string name = parse_key();
    while (peek() == '.') {
      name.push_back(get());
      name += parse_key();
    }
    skip_spaces();
    if (peek() != ']') fail("expected ']' to close table header");
    get();
    if (array_element) {
      if (peek() != ']') fail("expected ']]' to close array-of-tables header");
      get();
    }
    if (!array_element && doc.find(name) != nullptr) fail("duplicate table [" + name + "]");
    doc.open_table(std::move(name), header_line, array_element);
    expect_line_end();
  }

  void parse_key_value(Table& table) {
    const int key_line = line_;
    std::string key = parse_key();
    skip_spaces();
    if (peek() != '=') fail("expected '=' after key '" + key + "'");
    get();
    skip_spaces();
    Value value = parse_value();
    if (table.has(key)) fail("duplicate key '" + key + "'");
    table.insert(std::move(key), std::move(value), key_line);
    expect_line_end();
  }

  Value parse_value() {
    Value v;
    v.line = line_;
    const char c = peek();
    if (c == '[') {
      v.data = parse_array();
    } else if (c == '"') {
      v.data = parse_string();
    } else if (text_.substr(pos_, 4) == "true" && !is_key_char(peek_at(4))) {
      pos_ += 4;
      v.data = true;
    } else if (text_.substr(pos_, 5) == "false" && !is_key_char(peek_at(5))) {
      pos_ += 5;
      v.data = false;
    } else {
      v.data = parse_number();
    }
    return v;
  }

  char peek_at(std::size_t offset) const {
    return pos_ + offset < text_.size() ? text_[pos_ + offset] : '\0';
  }

  Array parse_array() {
    get();  // '['
    Array items;
    skip_blank_lines();
    if (peek() == ']') {
      get();
      return items;
    }
    while (true) {
      skip_blank_lines();
      if (eof()) fail("unterminated array");
      items.push_back(parse_value());
      skip_blank_lines();
      if (peek() == ',') {
        get();
        skip_blank_lines();
        if (peek() == ']') {
          get();
          return items;
        }
        continue;
      }
      if (peek() == ']') {
        get();
        return items;
      }
      fail("expected ',' or ']' in array");
    }
  }

  std::string parse_string() {
    get();  // opening quote
    std::string s;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '"') return s;
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = get();
        switch (e) {
          case 'n': s.push_back('\n'); break;
          case 't': s.push_back('\t'); break;
          case '"': s.push_back('"'); break;
          case '\\': s.push_back('\\'); break;
          default: fail(std::string("unknown escape '\\") + e + "'");
        }
      } else {
        s.push_back(c);
      }
    }
  }

  double parse_number() {
    const std::size_t start = pos_;
    while (!eof()) {
      const char c = peek();
      if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e' || c == 'E' || c == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    token.erase(std::remove(token.begin(), token.end(), '_'), token.end());
    if (token.empty()) fail("expected a value");
    const char* first = token.data();
    if (*first == '+') ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) fail("malformed number '" + token + "'");
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

double as_number(const Value& v, std::string_view key) {
  if (!v.is_number()) {
    throw ParseError(v.line, "'" + std::string(key) + "' must be a number, got " + type_name(v));
  }
  return std::get<double>(v.data);
}

const Array& as_array(const Value& v, std::string_view key) {
  if (!v.is_array()) {
    throw ParseError(v.line, "'" + std::string(key) + "' must be an array, got " + type_name(v));
  }
  return std::get<Array>(v.data);
}

}  // namespace

bool Table::has(std::string_view key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

const Value& Table::at(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.first == key) return e.second;
  }
  const std::string where = name_.empty() ? "top level" : "[" + name_ + "]";
  throw ParseError(line_, "missing key '" + std::string(key) + "' in " + where);
}

double Table::number(std::string_view key) const { return as_number(at(key), key); }

double Table::number_or(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int Table::integer(std::string_view key) const {
  const Value& v = at(key);
  const double d = as_number(v, key);
  if (std::floor(d) != d || std::abs(d) > 1e9) {
    throw ParseError(v.line, "'" + std::string(key) + "' must be an integer");
  }
  return static_cast<int>(d);
}

bool Table::boolean(std::string_view key) const {
  const Value& v = at(key);
  if (!v.is_bool()) throw ParseError(v.line, "'" + std::string(key) + "' must be true or false");
  return std::get<bool>(v.data);
}

bool Table::boolean_or(std::string_view key, bool fallback) const {
  return has(key) ? boolean(key) : fallback;
}

std::string Table::string(std::string_view key) const {
  const Value& v = at(key);
  if (!v.is_string()) throw ParseError(v.line, "'" + std::string(key) + "' must be a string");
  return std::get<std::string>(v.data);
}

std::string Table::string_or(std::string_view key, std::string fallback) const {
  return has(key) ? string(key) : fallback;
}

Eigen::VectorXd Table::vector(std::string_view key) const {
  const Array& items = as_array(at(key), key);
  Eigen::VectorXd out(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) out[static_cast<Eigen::Index>(i)] = as_number(items[i], key);
  return out;
}

std::vector<int> Table::integers(std::string_view key) const {
  const Value& v = at(key);
  const Array& items = as_array(v, key);
  std::vector<int> out;
  for (const Value& item : items) {
    const double d = as_number(item, key);
    if (std::floor(d) != d) throw ParseError(item.line, "'" + std::string(key) + "' must hold integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

Eigen::Vector3d Table::vec3(std::string_view key) const {
  const Eigen::VectorXd v = vector(key);
  if (v.size() != 3) throw ParseError(at(key).line, "'" + std::string(key) + "' must have 3 entries");
  return v;
}

Eigen::Matrix3d Table::mat3(std::string_view key) const {
  const Value& v = at(key);
  const Array& rows = as_array(v, key);
  if (rows.size() != 3) throw ParseError(v.line, "'" + std::string(key) + "' must be a 3x3 array");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    const Array& cols = as_array(rows[static_cast<std::size_t>(r)], key);
    if (cols.size() != 3) throw ParseError(v.line, "'" + std::string(key) + "' must be a 3x3 array");
    for (int c = 0; c < 3; ++c) m(r, c) = as_number(cols[static_cast<std::size_t>(c)], key);
  }
  return m;
}

void Table::require_known_keys(const std::vector<std::string_view>& allowed) const {
  for (const auto& [key, value] : entries_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      const std::string where = name_.empty() ? "top level" : "[" + name_ + "]";
      throw ParseError(value.line, "unknown key '" + key + "' in " + where);
    }
  }
}

void Table::insert(std::string key, Value value, int line) {
  value.line = line;
  entries_.emplace_back(std::move(key), std::move(value));
}

Document::Document() { tables_.push_back({Table("", 1), false}); }

const Table* Document::find(std::string_view name) const {
  for (const auto& e : tables_) {
    if (!e.array_element && e.table.name() == name && !name.empty()) return &e.table;
  }
  return nullptr;
}

std::vector<const Table*> Document::array(std::string_view name) const {
  std::vector<const Table*> out;
  for (const auto& e : tables_) {
    if (e.array_element && e.table.name() == name) out.push_back(&e.table);
  }
  return out;
}

std::vector<std::string> Document::table_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < tables_.size(); ++i) out.push_back(tables_[i].table.name());
  return out;
}

Table& Document::open_table(std::string name, int line, bool array_element) {
  tables_.push_back({Table(std::move(name), line), array_element});
  return tables_.back().table;
}

Document parse(std::string_view text) { return Parser(text).run(); }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), ptr);
  // Keep integral values recognisable as floating point in the files.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void Writer::comment(std::string_view text) {
  out_ += "# ";
  out_ += text;
  out_ += '\n';
}

void Writer::table(std::string_view name) {
  out_ += "[";
  out_ += name;
  out_ += "]\n";
}

void Writer::array_table(std::string_view name) {
  out_ += "[[";
  out_ += name;
  out_ += "]]\n";
}

void Writer::key(std::string_view name, double v) {
  out_ += std::string(name) + " = " + format_number(v) + "\n";
}

void Writer::key(std::string_view name, bool v) {
  out_ += std::string(name) + " = " + (v ? "true" : "false") + "\n";
}

void Writer::key(std::string_view name, std::string_view v) {
  std::string escaped;
  for (const char c : v) {
    if (c == '"' || c == '\\') escaped.push_back('\\');
    if (c == '\n') {
      escaped += "\\n";
      continue;
    }
    escaped.push_back(c);
  }
  out_ += std::string(name) + " = \"" + escaped + "\"\n";
}

void Writer::key(std::string_view name, const Eigen::Ref<const Eigen::VectorXd>& v) {
  out_ += std::string(name) + " = [";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out_ += ", ";
    out_ += format_number(v[i]);
  }
  out_ += "]\n";
}

void Writer::key(std::string_view name, const std::vector<int>& v) {
  out_ += std::string(name) + " = [";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out_ += ", ";
    out_ += std::to_string(v[i]);
  }
  out_ += "]\n";
}

void Writer::matrix_key(std::string_view name, const Eigen::Matrix3d& m) {
  out_ += std::string(name) + " = [";
  for (int r = 0; r < 3; ++r) {
    if (r > 0) out_ += ", ";
    out_ += "[";
    for (int c = 0; c < 3; ++c) {
      if (c > 0) out_ += ", ";
      out_ += format_number(m(r, c));
    }
    out_ += "]";
  }
  out_ += "]\n";
}

void Writer::blank() { out_ += '\n'; }

}  // namespace phbench::config
