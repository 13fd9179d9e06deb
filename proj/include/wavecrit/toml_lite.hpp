#pragma once

// Minimal TOML subset for scenario files: [section] and [a.b] tables,
// bare keys, strings, booleans, numbers and homogeneous arrays of numbers
// or strings. Keys are exposed flattened ("section.key").

#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wavecrit/util.hpp"

namespace wavecrit::toml {

struct Value {
  std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>> data;
  bool integral = false;  // numeric literal had no fractional part

  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_number_array() const { return std::holds_alternative<std::vector<double>>(data); }
  bool is_string_array() const { return std::holds_alternative<std::vector<std::string>>(data); }
};

class Table {
 public:
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<double> number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end() || !it->second.is_number()) return std::nullopt;
    return std::get<double>(it->second.data);
  }

  std::optional<std::string> string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end() || !it->second.is_string()) return std::nullopt;
    return std::get<std::string>(it->second.data);
  }

  std::optional<bool> boolean(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end() || !it->second.is_bool()) return std::nullopt;
    return std::get<bool>(it->second.data);
  }

  std::optional<std::vector<double>> numbers(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (it->second.is_number_array()) return std::get<std::vector<double>>(it->second.data);
    if (it->second.is_number()) return std::vector<double>{std::get<double>(it->second.data)};
    return std::nullopt;
  }

  double number_or(const std::string& key, double fallback) const {
    auto v = number(key);
    return v ? *v : fallback;
  }

  std::string string_or(const std::string& key, const std::string& fallback) const {
    auto v = string(key);
    return v ? *v : fallback;
  }

  void set(const std::string& key, Value v) { values_[key] = std::move(v); }
  void set_number(const std::string& key, double x, bool integral = false) {
    Value v;
    v.data = x;
    v.integral = integral;
    values_[key] = std::move(v);
  }
  void set_string(const std::string& key, std::string s) {
    Value v;
    v.data = std::move(s);
    values_[key] = std::move(v);
  }

  const std::map<std::string, Value>& items() const { return values_; }
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (k.rfind(prefix, 0) == 0) out.push_back(k);
    return out;
  }

 private:
  std::map<std::string, Value> values_;
};

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Removes a trailing comment that is not inside a quoted string.
inline std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

inline bool parse_number(const std::string& text, double& out, bool& integral) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) return false;
  integral = text.find_first_of(".eE") == std::string::npos;
  return true;
}

inline Value parse_value(const std::string& raw, int line_no) {
  const std::string text = strip(raw);
  Value v;
  if (text.empty()) throw validation_error("toml: empty value at line " + std::to_string(line_no));
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"')
      throw validation_error("toml: unterminated string at line " + std::to_string(line_no));
    v.data = text.substr(1, text.size() - 2);
    return v;
  }
  if (text == "true" || text == "false") {
    v.data = (text == "true");
    return v;
  }
  if (text.front() == '[') {
    if (text.back() != ']')
      throw validation_error("toml: unterminated array at line " + std::to_string(line_no));
    const std::string body = strip(text.substr(1, text.size() - 2));
    std::vector<std::string> parts;
    std::string cur;
    bool in_string = false;
    for (char c : body) {
      if (c == '"') in_string = !in_string;
      if (c == ',' && !in_string) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!strip(cur).empty()) parts.push_back(cur);
    std::vector<double> nums;
    std::vector<std::string> strs;
    for (auto& part : parts) {
      const std::string item = strip(part);
      if (item.empty()) continue;
      if (item.front() == '"') {
        if (item.size() < 2 || item.back() != '"')
          throw validation_error("toml: bad string element at line " + std::to_string(line_no));
        strs.push_back(item.substr(1, item.size() - 2));
      } else {
        double x;
        bool ig;
        if (!parse_number(item, x, ig))
          throw validation_error("toml: bad array element '" + item + "' at line " +
                                 std::to_string(line_no));
        nums.push_back(x);
      }
    }
    if (!strs.empty() && !nums.empty())
      throw validation_error("toml: mixed array types at line " + std::to_string(line_no));
    if (!strs.empty())
      v.data = std::move(strs);
    else
      v.data = std::move(nums);
    return v;
  }
  double x;
  bool integral;
  if (!parse_number(text, x, integral))
    throw validation_error("toml: cannot parse value '" + text + "' at line " +
                           std::to_string(line_no));
  v.data = x;
  v.integral = integral;
  return v;
}

}  // namespace detail

inline Table parse(const std::string& text) {
  Table table;
  std::string section;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string raw =
        text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::string line = detail::strip(detail::strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw validation_error("toml: bad section header at line " + std::to_string(line_no));
      section = detail::strip(line.substr(1, line.size() - 2));
      if (section.empty())
        throw validation_error("toml: empty section name at line " + std::to_string(line_no));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("toml: expected key = value at line " + std::to_string(line_no));
    const std::string key = detail::strip(line.substr(0, eq));
    if (key.empty())
      throw validation_error("toml: empty key at line " + std::to_string(line_no));
    const std::string full = section.empty() ? key : section + "." + key;
    table.set(full, detail::parse_value(line.substr(eq + 1), line_no));
  }
  return table;
}

}  // namespace wavecrit::toml
