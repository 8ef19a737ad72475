#include "pemwe/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "pemwe/errors.hpp"

namespace pemwe {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_';
  });
}

}  // namespace

ConfigEntries parse_entries(std::string_view text) {
  ConfigEntries entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no), "", line_no);
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      throw ConfigError(fmt::format("line {}: invalid key '{}'", line_no, key), std::string(key),
                        line_no);
    }
    if (value.empty()) {
      throw ConfigError(fmt::format("line {}: key '{}' has no value", line_no, key),
                        std::string(key), line_no);
    }
    if (entries.count(key) != 0) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, key),
                        std::string(key), line_no);
    }
    entries.emplace(std::string(key), ConfigEntry{std::string(value), line_no});
  }
  return entries;
}

void apply_overrides(ConfigEntries& entries, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("override '{}' is not key=value", item), item);
    }
    const std::string key(trim(std::string_view(item).substr(0, eq)));
    const std::string value(trim(std::string_view(item).substr(eq + 1)));
    const auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError(fmt::format("unknown key '{}'", key), key);
    if (value.empty()) throw ConfigError(fmt::format("key '{}' has no value", key), key);
    it->second = ConfigEntry{value, 0};
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()), "");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const ConfigEntry& ConfigReader::find(std::string_view key) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(fmt::format("missing key '{}'", key), std::string(key));
  }
  used_.emplace_back(key);
  return it->second;
}

double ConfigReader::number(std::string_view key) {
  const ConfigEntry& e = find(key);
  double value = 0.0;
  const char* end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("key '{}': '{}' is not a number", key, e.value),
                      std::string(key), e.line);
  }
  return value;
}

long ConfigReader::integer(std::string_view key) {
  const ConfigEntry& e = find(key);
  long value = 0;
  const char* end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("key '{}': '{}' is not an integer", key, e.value),
                      std::string(key), e.line);
  }
  return value;
}

const std::string& ConfigReader::text(std::string_view key) { return find(key).value; }

void ConfigReader::finish() const {
  for (const auto& [key, entry] : entries_) {
    if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", entry.line, key), key,
                        entry.line);
    }
  }
}

namespace {

// Order here is the canonical order of dumped configs.
struct NumberField {
  const char* key;
  double& (*ref)(SimulationSetup&);
};

#define PEMWE_FIELD(name, expr) \
  NumberField { name, [](SimulationSetup& s) -> double& { return expr; } }

const NumberField kNumberFields[] = {
    PEMWE_FIELD("temperature_K", s.constants.temperature),
    PEMWE_FIELD("gas_constant_J_per_mol_K", s.constants.gas_constant),
    PEMWE_FIELD("atmospheric_pressure_Pa", s.constants.atmospheric_pressure),
    PEMWE_FIELD("site_density_mol_per_m2", s.constants.site_density),
    PEMWE_FIELD("ir_molar_mass_g_per_mol", s.constants.ir_molar_mass),
    PEMWE_FIELD("ir_density_g_per_m3", s.constants.ir_density),
    PEMWE_FIELD("k_r_per_Pa_s", s.params.k_r),
    PEMWE_FIELD("k_diss1", s.params.k_diss1),
    PEMWE_FIELD("k_diss2", s.params.k_diss2),
    PEMWE_FIELD("k_acl_mol_per_m2_s_Pa", s.params.k_acl),
    PEMWE_FIELD("k_mem_per_m", s.params.k_mem),
    PEMWE_FIELD("d_eff_m2_per_s", s.params.d_eff),
    PEMWE_FIELD("delta_mem_m", s.params.delta_mem),
    PEMWE_FIELD("k_l_m_per_s", s.params.k_l),
    PEMWE_FIELD("c_henry_mol_per_m3", s.params.c_henry),
    PEMWE_FIELD("a_geo_m2", s.params.a_geo),
    PEMWE_FIELD("delta_acl_m", s.params.delta_acl),
    PEMWE_FIELD("i0_A_per_m2", s.params.i0),
    PEMWE_FIELD("alpha", s.params.alpha),
    PEMWE_FIELD("e_rev_V", s.params.e_rev),
    PEMWE_FIELD("ecsa0_m2", s.ecsa0),
    PEMWE_FIELD("ir_loading_mg_per_cm2", s.ir_loading),
    PEMWE_FIELD("e_min_V", s.profile.e_min),
    PEMWE_FIELD("e_max_V", s.profile.e_max),
    PEMWE_FIELD("period_s", s.profile.period),
    PEMWE_FIELD("dk_s", s.multiscale.dk),
    PEMWE_FIELD("dK_s", s.multiscale.dK),
    PEMWE_FIELD("horizon_s", s.multiscale.horizon),
    PEMWE_FIELD("tolp", s.multiscale.tolp),
    PEMWE_FIELD("newton_tol", s.multiscale.newton_tol),
};

#undef PEMWE_FIELD

std::string_view policy_name(NonConvergencePolicy p) {
  return p == NonConvergencePolicy::abort ? "abort" : "accept";
}

// Validation failures are configuration problems from the caller's view.
template <class F>
void validate_as_config(F&& check) {
  try {
    check();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("invalid configuration: {}", e.what()), "");
  }
}

}  // namespace

void SimulationSetup::derive() {
  // mg/cm^2 * cm^2 -> mg -> g -> mol
  const double area_cm2 = params.a_geo * 1e4;
  n_ir0 = ir_loading * area_cm2 * 1e-3 / constants.ir_molar_mass;
  params.eta_np = derive_particle_count(ecsa0, n_ir0, constants);
}

void SimulationSetup::validate() const {
  constants.validate();
  params.validate();
  profile.validate();
  multiscale.validate_fast();
  if (!(multiscale.dK >= multiscale.period)) throw DomainError("dK_s must be >= period_s");
  multiscale.periods_per_macro_step();
  if (!(multiscale.horizon > 0.0)) throw DomainError("horizon_s must be > 0");
  if (std::abs(profile.period - multiscale.period) > 1e-12 * multiscale.period) {
    throw DomainError("profile and multiscale periods differ");
  }
  if (reference_stride < 0) throw DomainError("reference_stride_steps must be >= 0");
}

SimulationSetup parse_setup(std::string_view text, const std::vector<std::string>& overrides) {
  ConfigEntries entries = parse_entries(text);
  apply_overrides(entries, overrides);
  ConfigReader reader(entries);

  SimulationSetup s;
  for (const auto& field : kNumberFields) field.ref(s) = reader.number(field.key);
  s.multiscale.period = s.profile.period;

  const std::string& shape = reader.text("profile");
  try {
    s.profile.shape = parse_profile_shape(shape);
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("key 'profile': {}", e.what()), "profile");
  }
  const std::string& policy = reader.text("on_nonconvergence");
  if (policy == "accept") {
    s.multiscale.on_nonconvergence = NonConvergencePolicy::accept;
  } else if (policy == "abort") {
    s.multiscale.on_nonconvergence = NonConvergencePolicy::abort;
  } else {
    throw ConfigError(fmt::format("key 'on_nonconvergence': '{}' is not accept|abort", policy),
                      "on_nonconvergence");
  }
  auto bounded_int = [&reader](std::string_view key, long lo) {
    const long v = reader.integer(key);
    if (v < lo) {
      throw ConfigError(fmt::format("key '{}' must be >= {} (got {})", key, lo, v),
                        std::string(key));
    }
    return v;
  };
  s.multiscale.max_periods = static_cast<int>(bounded_int("max_periods", 1));
  s.multiscale.n_elements = static_cast<std::size_t>(bounded_int("n_elements", 1));
  s.multiscale.newton_max_iter = static_cast<int>(bounded_int("newton_max_iter", 1));
  s.reference_stride = bounded_int("reference_stride_steps", 0);
  reader.finish();

  validate_as_config([&] {
    s.constants.validate();
    if (!(s.ecsa0 > 0.0)) throw DomainError("ecsa0_m2 must be > 0");
    if (!(s.ir_loading > 0.0)) throw DomainError("ir_loading_mg_per_cm2 must be > 0");
    if (!(s.params.a_geo > 0.0)) throw DomainError("a_geo_m2 must be > 0");
    s.derive();
    s.validate();
  });
  return s;
}

SimulationSetup load_setup(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides) {
  return parse_setup(read_text_file(path), overrides);
}

std::string canonical_setup(const SimulationSetup& setup) {
  SimulationSetup copy = setup;
  std::string out;
  for (const auto& field : kNumberFields) {
    out += fmt::format("{} = {}\n", field.key, field.ref(copy));
  }
  out += fmt::format("profile = {}\n", to_string(setup.profile.shape));
  out += fmt::format("max_periods = {}\n", setup.multiscale.max_periods);
  out += fmt::format("n_elements = {}\n", setup.multiscale.n_elements);
  out += fmt::format("newton_max_iter = {}\n", setup.multiscale.newton_max_iter);
  out += fmt::format("on_nonconvergence = {}\n", policy_name(setup.multiscale.on_nonconvergence));
  out += fmt::format("reference_stride_steps = {}\n", setup.reference_stride);
  return out;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) { return fmt::format("{:016x}", hash); }

}  // namespace pemwe
