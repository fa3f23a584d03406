#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadnav {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

// Plain-text `key = value` configuration. Lines starting with '#' and blank
// lines are ignored. Consumers declare the keys they understand; anything
// else is an error so typos cannot silently fall back to defaults.
class KvConfig {
 public:
  KvConfig() = default;

  static KvConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
  }

  static KvConfig parse_text(const std::string& text, const std::string& origin = "<text>") {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config: " + origin + ":" + std::to_string(lineno) +
                                 ": expected 'key = value'");
      const std::string key = detail::trim(t.substr(0, eq));
      const std::string value = detail::trim(t.substr(eq + 1));
      if (key.empty())
        throw std::runtime_error("config: " + origin + ":" + std::to_string(lineno) + ": empty key");
      if (cfg.values_.count(key))
        throw std::runtime_error("config: " + origin + ": duplicate key '" + key + "'");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config: missing required key '" + key + "'");
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key) const { return to_double(key, get(key)); }
  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  long get_int(const std::string& key) const { return to_int(key, get(key)); }
  long get_int_or(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
  }

  bool get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error("config: key '" + key + "' is not a boolean: '" + v + "'");
  }

  std::vector<int> get_int_list_or(const std::string& key, std::vector<int> fallback) const {
    if (!has(key)) return fallback;
    std::vector<int> out;
    std::istringstream ss(get(key));
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(static_cast<int>(to_int(key, detail::trim(tok))));
    if (out.empty()) throw std::runtime_error("config: key '" + key + "' is an empty list");
    return out;
  }

  // Rejects any key outside `allowed`; prefixes in `allowed_prefixes` admit
  // whole key families (e.g. "imu.col.").
  void require_known_keys(const std::set<std::string>& allowed,
                          const std::vector<std::string>& allowed_prefixes = {}) const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
      if (allowed.count(key)) continue;
      bool ok = false;
      for (const auto& p : allowed_prefixes)
        if (key.rfind(p, 0) == 0) { ok = true; break; }
      if (!ok) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) throw std::runtime_error("config: unknown key(s): " + unknown);
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static double to_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return d;
    } catch (const std::exception&) {
      throw std::runtime_error("config: key '" + key + "' is not a number: '" + v + "'");
    }
  }

  static long to_int(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const long d = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return d;
    } catch (const std::exception&) {
      throw std::runtime_error("config: key '" + key + "' is not an integer: '" + v + "'");
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace quadnav
