#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "stpm/device.hpp"
#include "stpm/error.hpp"

namespace stpm {

// Flat key=value document. '#' starts a comment; blank lines are ignored.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text) {
    KeyValueConfig cfg;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string_view body = trim(line);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
      }
      const std::string key(trim(body.substr(0, eq)));
      const std::string value(trim(body.substr(eq + 1)));
      if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      if (!cfg.values_.emplace(key, value).second) {
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      }
    }
    return cfg;
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double out = 0.0;
    const std::string& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ConfigError("key '" + key + "': '" + s + "' is not a number");
    }
    return out;
  }

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  static std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  }

  std::map<std::string, std::string> values_;
};

// Keys: vth.{vth0l,lvt,hvt,vth0h}, read.{vr0l,vrl,vrh,vr0h},
// current.{on,off,sense_threshold}, memory_window. Missing keys keep their
// defaults; the result is validated.
inline DeviceParams device_params_from(const KeyValueConfig& cfg) {
  DeviceParams p;
  constexpr const char* kVth[] = {"vth.vth0l", "vth.lvt", "vth.hvt", "vth.vth0h"};
  constexpr const char* kRead[] = {"read.vr0l", "read.vrl", "read.vrh", "read.vr0h"};
  for (std::size_t i = 0; i < 4; ++i) {
    p.vth[i] = cfg.get_double(kVth[i], p.vth[i]);
    p.read[i] = cfg.get_double(kRead[i], p.read[i]);
  }
  p.on_current = cfg.get_double("current.on", p.on_current);
  p.off_current = cfg.get_double("current.off", p.off_current);
  p.sense_threshold = cfg.get_double("current.sense_threshold", p.sense_threshold);
  p.memory_window = cfg.get_double("memory_window", p.memory_window);
  p.validate();
  return p;
}

inline DeviceParams load_device_params(const std::string& path) {
  return device_params_from(KeyValueConfig::load(path));
}

}  // namespace stpm
