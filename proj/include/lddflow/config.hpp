#ifndef LDDFLOW_CONFIG_HPP
#define LDDFLOW_CONFIG_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lddflow {

/// Flat INI-style configuration: [section] headers, key = value lines,
/// '#' or ';' comments. Values are scalars or comma-separated lists.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::string require_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  double require_double(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  // key "section.name" -> value
  std::map<std::string, std::string> values_;
};

/// Error in the configuration file or in parameter validation; maps to exit
/// code 2 in the CLI.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lddflow

#endif
