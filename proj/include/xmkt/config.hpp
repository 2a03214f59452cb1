#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "xmkt/engine.hpp"

namespace xmkt {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& field_path, const std::string& msg)
      : std::runtime_error(field_path + ": " + msg), field(field_path) {}
  std::string field;
};

// Minimal INI reader: [section] headers, key = value pairs, '#' comments,
// repeated keys allowed (used by the per-stock lines).
struct IniFile {
  struct Entry {
    std::string section, key, value;
    std::size_t line = 0;
  };
  std::vector<Entry> entries;

  static IniFile parse_file(const std::string& path);
  static IniFile parse_string(const std::string& text, const std::string& origin = "<string>");

  const Entry* find(const std::string& section, const std::string& key) const;
  std::vector<const Entry*> find_all(const std::string& section, const std::string& key) const;
};

// Loads and validates a simulation config; throws ConfigError with a
// section.key field path on any problem.
SimConfig load_config(const std::string& path);
SimConfig config_from_ini(const IniFile& ini);

// Full validation of a programmatically built config.
void validate_config(const SimConfig& cfg);

// Resolved-config echo, written next to the run logs.
std::string config_echo(const SimConfig& cfg);

}  // namespace xmkt
