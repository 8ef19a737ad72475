#pragma once

// Flat `key = value` configuration files. Every key carries its unit in the
// name; a file must set every key exactly once, so the shipped default file
// is the single source of default values. `--set key=value` style overrides
// replace existing keys only.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pemwe/model.hpp"

namespace pemwe {

struct ConfigEntry {
  std::string value;
  int line = 0;  // 0 for overrides
};

using ConfigEntries = std::map<std::string, ConfigEntry, std::less<>>;

// Parses lines of `key = value`; '#' starts a comment. Throws ConfigError on
// syntax errors or duplicate keys.
ConfigEntries parse_entries(std::string_view text);

// Applies "key=value" strings. Unknown keys throw ConfigError.
void apply_overrides(ConfigEntries& entries, const std::vector<std::string>& overrides);

std::string read_text_file(const std::filesystem::path& path);

// Typed access that records which keys were consumed. Missing keys and
// malformed values throw ConfigError naming the key.
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigEntries& entries) : entries_(entries) {}

  double number(std::string_view key);
  long integer(std::string_view key);
  const std::string& text(std::string_view key);
  // Throws ConfigError for the first key that was never read.
  void finish() const;

 private:
  const ConfigEntry& find(std::string_view key);
  const ConfigEntries& entries_;
  std::vector<std::string> used_;
};

struct SimulationSetup {
  PhysicalConstants constants;
  ModelParameters params;  // eta_np derived from ecsa0 and the loading
  OperationProfile profile;
  MultiscaleConfig multiscale;
  double ecsa0 = 0.0;           // m^2
  double ir_loading = 0.0;      // mg/cm^2
  double n_ir0 = 0.0;           // mol, derived
  long reference_stride = 0;    // fast steps per stored FRP sample, 0 = one per period

  // Recomputes n_ir0 and eta_np from ecsa0, the loading and the geometry.
  void derive();
  // Throws DomainError on any invalid field.
  void validate() const;
};

SimulationSetup parse_setup(std::string_view text, const std::vector<std::string>& overrides = {});
SimulationSetup load_setup(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {});
// Complete key = value text; parse_setup(canonical_setup(s)) reproduces s.
std::string canonical_setup(const SimulationSetup& setup);

std::uint64_t fnv1a64(std::string_view text);
std::string hash_hex(std::uint64_t hash);

}  // namespace pemwe
