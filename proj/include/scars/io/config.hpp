#pragma once

// Plain-text run configuration: UTF-8 `key = value` lines, `#` comments.
// Every key must be declared with a default before parsing; unknown keys,
// duplicate keys and malformed values are validation errors.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scars/core/errors.hpp"

namespace scars::io {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

class Config {
 public:
  /// Declares a key with its default value (declaration order is kept for dumps).
  Config& declare(const std::string& key, const std::string& default_value) {
    if (values_.emplace(key, default_value).second) order_.push_back(key);
    return *this;
  }

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Overrides a declared key.
  void set(const std::string& key, const std::string& value) {
    require(has(key), "config: unknown key '" + key + "'");
    values_[key] = value;
  }

  /// `key=value` override as given on the command line.
  void set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    require(eq != std::string::npos, "config: override '" + assignment + "' is not of the form key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  }

  void parse(std::istream& in, const std::string& source = "config") {
    std::string line;
    int line_no = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      const std::string where = source + ":" + std::to_string(line_no);
      require(eq != std::string::npos, where + ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      require(!key.empty(), where + ": empty key");
      require(has(key), where + ": unknown key '" + key + "'");
      require(seen.emplace(key, line_no).second, where + ": duplicate key '" + key + "'");
      values_[key] = trim(line.substr(eq + 1));
    }
  }

  void parse_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "config: cannot open '" + path + "'");
    parse(in, path);
  }

  [[nodiscard]] const std::string& text(const std::string& key) const {
    const auto it = values_.find(key);
    require(it != values_.end(), "config: unknown key '" + key + "'");
    return it->second;
  }

  [[nodiscard]] double real(const std::string& key) const {
    const std::string& s = text(key);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    require(!s.empty() && end == s.c_str() + s.size() && errno == 0 && std::isfinite(v),
            "config: '" + key + "' must be a finite number, got '" + s + "'");
    return v;
  }

  [[nodiscard]] long long integer(const std::string& key) const {
    const std::string& s = text(key);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    require(!s.empty() && end == s.c_str() + s.size() && errno == 0,
            "config: '" + key + "' must be an integer, got '" + s + "'");
    return v;
  }

  [[nodiscard]] bool boolean(const std::string& key) const {
    const std::string& s = text(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw validation_error("config: '" + key + "' must be true or false, got '" + s + "'");
  }

  /// Comma-separated integers, e.g. "2,1,3,2".
  [[nodiscard]] std::vector<long long> integers(const std::string& key) const {
    std::vector<long long> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      errno = 0;
      char* end = nullptr;
      const long long v = std::strtoll(item.c_str(), &end, 10);
      require(!item.empty() && end == item.c_str() + item.size() && errno == 0,
              "config: '" + key + "' must be a comma-separated integer list");
      out.push_back(v);
    }
    return out;
  }

  /// Effective settings in declaration order.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : order_) out.emplace_back(k, values_.at(k));
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

}  // namespace scars::io
