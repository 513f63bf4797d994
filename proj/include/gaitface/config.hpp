#pragma once

#include <map>
#include <string>
#include <vector>

namespace gaitface {

// INI-style configuration: [section] headers, key = value lines, '#' or ';'
// comments. Keys are addressed as "section.key". Values keep their raw text;
// typed getters parse on access.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  // "section.key=value" override, as accepted by the CLI --set flag.
  void set_override(const std::string& assignment);
  void set(const std::string& dotted_key, const std::string& value);

  bool has(const std::string& dotted_key) const;

  std::string get_string(const std::string& dotted_key, const std::string& fallback) const;
  std::string require_string(const std::string& dotted_key) const;
  long get_int(const std::string& dotted_key, long fallback) const;
  double get_double(const std::string& dotted_key, double fallback) const;
  bool get_bool(const std::string& dotted_key, bool fallback) const;
  // Comma-separated integer list, e.g. "16,32".
  std::vector<int> get_int_list(const std::string& dotted_key,
                                const std::vector<int>& fallback) const;

  // Serialized back to INI text with sorted sections/keys (config snapshots).
  std::string to_ini() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> raw value
};

}  // namespace gaitface
