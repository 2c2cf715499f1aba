#include "pickplace/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "pickplace/error.hpp"

namespace pickplace {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Json run() {
    Json root = Json::object();
    Json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        skip_ws();
        const std::vector<std::string> path = key_path();
        skip_ws();
        expect(']');
        table = &descend(root, path);
      } else {
        const std::vector<std::string> path = key_path();
        skip_ws();
        expect('=');
        skip_ws();
        Json value = parse_value();
        Json& parent = descend(*table, {path.begin(), path.end() - 1});
        if (parent.contains(path.back())) fail("duplicate key '" + path.back() + "'");
        parent[path.back()] = std::move(value);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::ParseError, "toml:" + std::to_string(line_) + ": " + msg);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  // Whitespace, comments and newlines; used between lines and inside arrays.
  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() != '\n') break;
      ++pos_;
      ++line_;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  std::string key() {
    if (peek() == '"') return basic_string();
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path{key()};
    while (true) {
      skip_ws();
      if (peek() != '.') break;
      ++pos_;
      skip_ws();
      path.push_back(key());
    }
    return path;
  }

  Json& descend(Json& from, const std::vector<std::string>& path) {
    Json* node = &from;
    for (const std::string& k : path) {
      Json& next = (*node)[k];
      if (next.is_null()) next = Json::object();
      if (!next.is_object()) fail("key '" + k + "' is not a table");
      node = &next;
    }
    return *node;
  }

  std::string basic_string() {
    expect('"');
    if (s_.substr(pos_, 2) == "\"\"") fail("multi-line strings are not supported");
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
    return out;
  }

  std::string literal_string() {
    expect('\'');
    const std::size_t end = s_.find('\'', pos_);
    if (end == std::string_view::npos || s_.substr(pos_, end - pos_).find('\n') != std::string_view::npos) {
      fail("unterminated string");
    }
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  Json parse_value() {
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  Json array() {
    expect('[');
    Json out = Json::array();
    while (true) {
      skip_blank_lines();
      if (peek() == ']') break;
      out.push_back(parse_value());
      skip_blank_lines();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() != ']') fail("expected ',' or ']' in array");
    }
    ++pos_;
    return out;
  }

  Json inline_table() {
    expect('{');
    Json out = Json::object();
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return out;
    }
    while (true) {
      skip_ws();
      const std::vector<std::string> path = key_path();
      skip_ws();
      expect('=');
      skip_ws();
      Json& parent = descend(out, {path.begin(), path.end() - 1});
      if (parent.contains(path.back())) fail("duplicate key '" + path.back() + "'");
      parent[path.back()] = parse_value();
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return out;
    }
  }

  Json number() {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_')) {
      ++pos_;
    }
    std::string tok;
    for (char c : s_.substr(start, pos_ - start)) {
      if (c != '_') tok += c;
    }
    if (tok.empty()) fail("expected a value");
    if (tok == "inf" || tok == "+inf" || tok == "-inf" || tok == "nan") fail("non-finite numbers are not supported");
    const char* b = tok.data() + (tok[0] == '+' ? 1 : 0);
    const char* e = tok.data() + tok.size();
    if (tok.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = 0;
      const auto [p, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && p == e) return v;
    } else {
      double v = 0.0;
      const auto [p, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && p == e) return v;
    }
    fail("invalid value '" + tok + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

Json parse_toml(std::string_view text) { return Parser(text).run(); }

}  // namespace pickplace
