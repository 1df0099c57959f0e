#pragma once

/**
 * @file config.hpp
 * @brief Flat key=value configuration files with section-prefixed keys
 *        (e.g. "particles.n = 10000").
 *
 * Format: one "key = value" pair per line; '#' starts a comment; blank
 * lines ignored. Strings are unquoted, booleans are true/false, numbers
 * are decimal. Duplicate keys, unknown keys and range violations are
 * reported with line numbers.
 */

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nemasoh {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
  }

  static Config parse_string(const std::string& text,
                             const std::string& origin = "<string>") {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string stripped = strip(line.substr(0, line.find('#')));
      if (stripped.empty()) continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
      const std::string key = strip(stripped.substr(0, eq));
      const std::string value = strip(stripped.substr(eq + 1));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      auto it = cfg.entries_.find(key);
      if (it != cfg.entries_.end())
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": duplicate key '" + key + "' (first at line " +
                          std::to_string(it->second.line) + ")");
      cfg.entries_.emplace(key, Entry{value, lineno, false});
    }
    return cfg;
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    return entry(key).value;
  }
  std::string get_string(const std::string& key, const std::string& dflt) const {
    return has(key) ? get_string(key) : dflt;
  }

  double get_double(const std::string& key) const {
    const Entry& e = entry(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(where(key) + ": '" + e.value + "' is not a number");
    }
  }
  double get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
  }

  std::int64_t get_int(const std::string& key) const {
    const Entry& e = entry(key);
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(where(key) + ": '" + e.value + "' is not an integer");
    }
  }
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const {
    return has(key) ? get_int(key) : dflt;
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t dflt) const {
    if (!has(key)) return dflt;
    const Entry& e = entry(key);
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(where(key) + ": '" + e.value +
                        "' is not an unsigned integer");
    }
  }

  bool get_bool(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    const Entry& e = entry(key);
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ConfigError(where(key) + ": expected true/false, got '" + e.value +
                      "'");
  }

  /// Range-violation error pointing at the offending line and the owning
  /// invariant.
  [[noreturn]] void fail_range(const std::string& key,
                               const std::string& invariant) const {
    throw ConfigError(where(key) + ": value '" + entry(key).value +
                      "' violates " + invariant);
  }

  /// Error out on any key that was never consumed by a getter.
  void reject_unknown_keys() const {
    for (const auto& [key, e] : entries_)
      if (!e.consumed)
        throw ConfigError(origin_ + ":" + std::to_string(e.line) +
                          ": unknown key '" + key + "'");
  }

  /// All (key, value) pairs in file order, for manifest echoing.
  std::vector<std::pair<std::string, std::string>> items() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, e] : entries_) out.emplace_back(key, e.value);
    return out;
  }

  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, Entry> entries_;
  std::string origin_;

  const Entry& entry(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw ConfigError(origin_ + ": missing required key '" + key + "'");
    it->second.consumed = true;
    return it->second;
  }

  std::string where(const std::string& key) const {
    auto it = entries_.find(key);
    return origin_ + ":" +
           (it == entries_.end() ? "?" : std::to_string(it->second.line)) +
           ": key '" + key + "'";
  }

  static std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
};

}  // namespace nemasoh
