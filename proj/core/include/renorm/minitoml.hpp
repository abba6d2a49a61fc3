#pragma once

// Reader for the TOML subset used by the config files in this project:
//   - '#' comments, blank lines
//   - [section] and [dotted.section] headers
//   - key = value with bare keys
//   - values: "basic strings" (\\ \" \n \t escapes), integers, floats,
//     booleans, and flat arrays [v1, v2, ...]
// Inline tables, multiline strings, dates, and arrays of tables are not
// accepted. No TOML package ships in this toolchain, hence this subset.

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace renorm::toml {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value>;

class Value {
 public:
  Value() : v_(std::int64_t{0}) {}
  explicit Value(std::string s) : v_(std::move(s)) {}
  explicit Value(double d) : v_(d) {}
  explicit Value(std::int64_t i) : v_(i) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(Array a) : v_(std::move(a)) {}
  explicit Value(Table t) : v_(std::move(t)) {}

  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_number() const {
    return std::holds_alternative<double>(v_) || std::holds_alternative<std::int64_t>(v_);
  }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_array() const { return std::holds_alternative<Array>(v_); }
  bool is_table() const { return std::holds_alternative<Table>(v_); }

  const std::string& as_string() const { return get<std::string>("string"); }
  bool as_bool() const { return get<bool>("boolean"); }
  const Array& as_array() const { return get<Array>("array"); }
  const Table& as_table() const { return get<Table>("table"); }
  Table& as_table() { return std::get<Table>(v_); }

  double as_number() const {
    if (std::holds_alternative<double>(v_)) return std::get<double>(v_);
    if (std::holds_alternative<std::int64_t>(v_))
      return static_cast<double>(std::get<std::int64_t>(v_));
    throw ParseError("expected a number");
  }
  std::int64_t as_integer() const { return get<std::int64_t>("integer"); }

 private:
  template <class T>
  const T& get(const char* name) const {
    if (!std::holds_alternative<T>(v_)) throw ParseError(std::string("expected a ") + name);
    return std::get<T>(v_);
  }
  std::variant<std::string, double, std::int64_t, bool, Array, Table> v_;
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);

// Dotted lookup "section.key"; nullptr when absent.
const Value* find(const Table& t, const std::string& dotted);

// All dotted leaf keys, for strict unknown-key validation at config load.
std::vector<std::string> leaf_keys(const Table& t);

}  // namespace renorm::toml
