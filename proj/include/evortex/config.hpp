// config.hpp - sectioned key/value run configuration
#ifndef EVORTEX_CONFIG_HPP
#define EVORTEX_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace evortex::cfg {

/// Structured-text configuration: "[section]" headers, "key = value" lines,
/// '#' comments. Keys are addressed as "section.key". Every lookup records
/// the effective value (default or explicit), so serialize_resolved() echoes
/// the complete configuration a run actually used.
class Config {
public:
  static Config parse_file(const std::filesystem::path& path);
  static Config parse_string(const std::string& text);

  void set(const std::string& dotted_key, const std::string& value);
  bool has(const std::string& dotted_key) const;

  std::string get_str(const std::string& dotted_key, const std::string& def) const;
  double get_double(const std::string& dotted_key, double def) const;
  int get_int(const std::string& dotted_key, int def) const;
  bool get_bool(const std::string& dotted_key, bool def) const;
  std::vector<int> get_int_list(const std::string& dotted_key,
                                const std::vector<int>& def) const;

  /// Required variants: throw validation_error when the key is absent.
  std::string require_str(const std::string& dotted_key) const;
  double require_double(const std::string& dotted_key) const;

  /// Deterministic serialization (sections and keys sorted) of the values
  /// recorded by lookups since construction.
  std::string serialize_resolved() const;

private:
  static std::pair<std::string, std::string> split_key(const std::string& dotted);
  const std::string* find(const std::string& dotted) const;
  void record(const std::string& dotted, const std::string& value) const;

  std::map<std::string, std::map<std::string, std::string>> sections_;
  mutable std::map<std::string, std::map<std::string, std::string>> resolved_;
};

} // namespace evortex::cfg

#endif
