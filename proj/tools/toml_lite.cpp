#include "toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace caplab::cli::toml {

std::string Value::type_name() const {
  switch (data.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    default: return "array";
  }
}

const Value* Table::find(std::string_view key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

const Table* Document::table(std::string_view name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

const std::vector<Table>* Document::array(std::string_view name) const {
  for (const auto& [n, ts] : arrays)
    if (n == name) return &ts;
  return nullptr;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  Document run() {
    Document doc;
    doc.source = source_;
    Table* current = &doc.root;
    while (pos_ < text_.size()) {
      skip_blank();
      if (pos_ >= text_.size()) break;
      const char c = text_[pos_];
      if (c == '\n') {
        advance();
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        current = header(doc);
      } else {
        key_value(*current);
      }
      end_of_line();
    }
    return doc;
  }

 private:
  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  bool at(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

  void skip_blank() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }

  void skip_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  // Whitespace, newlines and comments (inside arrays).
  void skip_space() {
    for (;;) {
      skip_blank();
      if (at('#')) {
        skip_comment();
      } else if (at('\n')) {
        advance();
      } else {
        return;
      }
    }
  }

  void end_of_line() {
    skip_blank();
    if (at('#')) skip_comment();
    if (pos_ < text_.size()) {
      if (!at('\n')) fail("unexpected '" + std::string(1, text_[pos_]) + "' after value");
      advance();
    }
  }

  std::string key() {
    skip_blank();
    if (at('"')) return basic_string();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                                   text_[pos_] == '-'))
      ++pos_;
    if (pos_ == start) fail("expected a key");
    if (at('.')) fail("dotted keys are not supported");
    return std::string(text_.substr(start, pos_ - start));
  }

  Table* header(Document& doc) {
    advance();
    const bool array = at('[');
    if (array) advance();
    const int line = line_;
    const std::string name = key();
    skip_blank();
    if (!at(']')) fail("expected ']' to close table header");
    advance();
    if (array) {
      if (!at(']')) fail("expected ']]' to close array-of-tables header");
      advance();
      for (auto& [n, ts] : doc.arrays)
        if (n == name) {
          ts.push_back(Table{name, line, {}});
          return &ts.back();
        }
      if (doc.table(name)) fail("'" + name + "' is already a table");
      doc.arrays.push_back({name, {Table{name, line, {}}}});
      return &doc.arrays.back().second.back();
    }
    if (doc.table(name) || doc.array(name)) fail("table '" + name + "' defined twice");
    doc.tables.push_back(Table{name, line, {}});
    return &doc.tables.back();
  }

  void key_value(Table& t) {
    const int line = line_;
    const std::string k = key();
    skip_blank();
    if (!at('=')) fail("expected '=' after key '" + k + "'");
    advance();
    skip_blank();
    if (t.find(k)) fail("duplicate key '" + k + "'");
    Value v = value();
    v.line = line;
    t.entries.emplace_back(k, std::move(v));
  }

  Value value() {
    Value v;
    v.line = line_;
    if (pos_ >= text_.size() || at('\n')) fail("missing value");
    const char c = text_[pos_];
    if (c == '"') {
      v.data = basic_string();
    } else if (c == '[') {
      v.data = array();
    } else if (c == '{') {
      fail("inline tables are not supported");
    } else if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      v.data = true;
    } else if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      v.data = false;
    } else {
      v = number_value();
    }
    return v;
  }

  Value number_value() {
    Value v;
    v.line = line_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != ',' &&
           text_[pos_] != ']' && text_[pos_] != '#')
      ++pos_;
    std::string tok(text_.substr(start, pos_ - start));
    std::string clean;
    for (char ch : tok)
      if (ch != '_') clean += ch;
    if (clean.empty()) fail("expected a value");
    if (clean == "inf" || clean == "+inf" || clean == "-inf" || clean == "nan" || clean == "+nan" ||
        clean == "-nan") {
      const double inf = std::numeric_limits<double>::infinity();
      v.data = clean.find("nan") != std::string::npos ? std::numeric_limits<double>::quiet_NaN()
                                                       : (clean[0] == '-' ? -inf : inf);
      return v;
    }
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    const char* b = clean.data() + (clean[0] == '+' ? 1 : 0);
    const char* e = clean.data() + clean.size();
    if (is_float) {
      double d = 0.0;
      const auto r = std::from_chars(b, e, d);
      if (r.ec != std::errc() || r.ptr != e) fail("invalid number '" + tok + "'");
      v.data = d;
    } else {
      std::int64_t i = 0;
      const auto r = std::from_chars(b, e, i);
      if (r.ec != std::errc() || r.ptr != e) fail("invalid value '" + tok + "'");
      v.data = i;
    }
    return v;
  }

  std::string basic_string() {
    advance();
    std::string out;
    while (!at('"')) {
      if (pos_ >= text_.size() || at('\n')) fail("unterminated string");
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated string");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out += c;
    }
    advance();
    return out;
  }

  Array array() {
    advance();
    Array out;
    skip_space();
    while (!at(']')) {
      if (pos_ >= text_.size()) fail("unterminated array");
      out.push_back(value());
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated array");
      if (at(',')) {
        advance();
        skip_space();
      } else if (!at(']')) {
        fail("expected ',' or ']' in array");
      }
    }
    advance();
    return out;
  }
};

}  // namespace

Document parse(std::string_view text, const std::string& source) { return Parser(text, source).run(); }

Document parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

}  // namespace caplab::cli::toml
