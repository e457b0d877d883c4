#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace caplab::cli::toml {

/// Subset of TOML: comments, bare or quoted keys, basic strings, integers,
/// floats (including inf and nan), booleans, (nested, multi-line) arrays,
/// [table] headers and [[array-of-tables]] headers.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<bool, std::int64_t, double, std::string, Array> data;
  int line = 0;

  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_number() const { return is_int() || std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  double as_number() const { return is_int() ? double(std::get<std::int64_t>(data)) : std::get<double>(data); }
  const std::string& as_string() const { return std::get<std::string>(data); }
  const Array& as_array() const { return std::get<Array>(data); }
  std::string type_name() const;
};

struct Table {
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, Value>> entries;

  const Value* find(std::string_view key) const;
};

struct Document {
  std::string source;
  Table root;
  std::vector<Table> tables;                                  // [name]
  std::vector<std::pair<std::string, std::vector<Table>>> arrays;  // [[name]]

  const Table* table(std::string_view name) const;
  const std::vector<Table>* array(std::string_view name) const;
};

Document parse(std::string_view text, const std::string& source = "<config>");
Document parse_file(const std::string& path);

}  // namespace caplab::cli::toml
