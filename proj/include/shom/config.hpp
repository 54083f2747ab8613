#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "constants.hpp"
#include "detector.hpp"
#include "error.hpp"
#include "format.hpp"
#include "retrieval.hpp"

namespace shom {

/// Everything one run of the pipeline needs. Each field is stored in the
/// unit of its config key (see the key table in config.hpp).
struct ExperimentConfig {
  double temperature_k = units::celsius_to_kelvin(188.0);
  double cell_length_m = 0.05;
  std::optional<double> optical_depth;  // unset: computed from temperature and length
  double resonance_nm = 795.0;
  double filter_center_nm = 796.7;
  double jsa_fwhm_nm = 10.0;
  double jsa_correlation = -0.9;
  double grid_start_nm = 790.0;
  double grid_stop_nm = 803.0;
  std::size_t grid_bins = 140;
  std::size_t oversample = 21;
  double visibility = 1.0;
  double residual_delay_fs = 0.0;
  bool apply_absorption = false;
  DetectionParams detection;
  std::uint64_t frames = 1000000;
  FitConfig fit;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  WavelengthGrid grid() const { return WavelengthGrid::spanning_nm(grid_start_nm, grid_stop_nm, grid_bins); }
  GaussianSource source() const {
    return {filter_center_nm * units::nm, jsa_fwhm_nm * units::nm, jsa_correlation};
  }
  double tau() const { return doppler_lifetime(temperature_k); }
  double od() const {
    return optical_depth ? *optical_depth : shom::optical_depth(VaporCell(temperature_k, cell_length_m));
  }
  DispersionModel dispersion() const { return {od(), tau(), resonance_nm * units::nm}; }
  Resonance resonance() const { return {tau(), resonance_nm * units::nm}; }
  InterferenceSettings interference() const { return {visibility, residual_delay_fs * units::fs}; }
};

namespace detail {

enum class Dim { none, temperature, length, time, frequency };

struct UnitDef {
  std::string_view name;
  Dim dim;
  double scale;   // to SI
  double offset;  // temperature only
};

inline constexpr UnitDef kUnits[] = {
    {"K", Dim::temperature, 1.0, 0.0},   {"C", Dim::temperature, 1.0, units::zero_celsius},
    {"m", Dim::length, 1.0, 0.0},        {"cm", Dim::length, 1e-2, 0.0},
    {"mm", Dim::length, 1e-3, 0.0},      {"um", Dim::length, 1e-6, 0.0},
    {"nm", Dim::length, 1e-9, 0.0},      {"s", Dim::time, 1.0, 0.0},
    {"ms", Dim::time, 1e-3, 0.0},        {"us", Dim::time, 1e-6, 0.0},
    {"ns", Dim::time, 1e-9, 0.0},        {"ps", Dim::time, 1e-12, 0.0},
    {"fs", Dim::time, 1e-15, 0.0},       {"Hz", Dim::frequency, 1.0, 0.0},
    {"kHz", Dim::frequency, 1e3, 0.0},   {"MHz", Dim::frequency, 1e6, 0.0},
    {"GHz", Dim::frequency, 1e9, 0.0},
};

inline const UnitDef* find_unit(std::string_view name) {
  for (const UnitDef& u : kUnits)
    if (u.name == name) return &u;
  return nullptr;
}

/// Parses "<number> [unit]" into the key's canonical unit. A value given in
/// the canonical unit is taken verbatim so written configs read back exactly.
inline double parse_quantity(std::string_view text, Dim dim, std::string_view canonical, int line) {
  text = trim(text);
  const auto space = text.find_first_of(" \t");
  const std::string_view number = text.substr(0, space);
  const std::string_view unit = space == std::string_view::npos ? std::string_view{} : trim(text.substr(space));
  const auto value = parse_double(number);
  if (!value || !std::isfinite(*value)) throw ConfigError("invalid number '" + std::string(number) + "'", line);
  if (dim == Dim::none) {
    if (!unit.empty()) throw ConfigError("unexpected unit '" + std::string(unit) + "'", line);
    return *value;
  }
  if (unit.empty()) throw ConfigError("missing unit (expected e.g. " + std::string(canonical) + ")", line);
  if (unit == canonical) return *value;
  const UnitDef* from = find_unit(unit);
  const UnitDef* to = find_unit(canonical);
  if (!from || from->dim != dim) throw ConfigError("unit '" + std::string(unit) + "' does not fit this key", line);
  const double si = *value * from->scale + from->offset;
  return (si - to->offset) / to->scale;
}

struct KeySpec {
  std::string_view key;
  std::function<void(ExperimentConfig&, std::string_view, int)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Field>
KeySpec quantity(std::string_view key, Dim dim, std::string_view unit, Field field) {
  return {key,
          [=](ExperimentConfig& c, std::string_view v, int line) { field(c) = parse_quantity(v, dim, unit, line); },
          [=](const ExperimentConfig& c) {
            const std::string num = format_double(field(const_cast<ExperimentConfig&>(c)));
            return unit.empty() ? num : num + " " + std::string(unit);
          }};
}

template <typename Int, typename Field>
KeySpec integer(std::string_view key, Field field) {
  return {key,
          [=](ExperimentConfig& c, std::string_view v, int line) {
            const auto parsed = parse_int<Int>(v);
            if (!parsed) throw ConfigError("invalid integer '" + std::string(trim(v)) + "'", line);
            field(c) = *parsed;
          },
          [=](const ExperimentConfig& c) { return std::to_string(field(const_cast<ExperimentConfig&>(c))); }};
}

template <typename Field>
KeySpec boolean(std::string_view key, Field field) {
  return {key,
          [=](ExperimentConfig& c, std::string_view v, int line) {
            v = trim(v);
            if (v == "true" || v == "yes" || v == "1") field(c) = true;
            else if (v == "false" || v == "no" || v == "0") field(c) = false;
            else throw ConfigError("invalid boolean '" + std::string(v) + "'", line);
          },
          [=](const ExperimentConfig& c) { return field(const_cast<ExperimentConfig&>(c)) ? "true" : "false"; }};
}

inline const std::vector<KeySpec>& key_table() {
  using C = ExperimentConfig;
  static const std::vector<KeySpec> table = {
      quantity("temperature", Dim::temperature, "K", [](C& c) -> double& { return c.temperature_k; }),
      quantity("cell_length", Dim::length, "m", [](C& c) -> double& { return c.cell_length_m; }),
      {"optical_depth",
       [](C& c, std::string_view v, int line) {
         if (trim(v) == "auto") c.optical_depth.reset();
         else c.optical_depth = parse_quantity(v, Dim::none, "", line);
       },
       [](const C& c) { return c.optical_depth ? format_double(*c.optical_depth) : std::string("auto"); }},
      quantity("resonance_wavelength", Dim::length, "nm", [](C& c) -> double& { return c.resonance_nm; }),
      quantity("filter_center", Dim::length, "nm", [](C& c) -> double& { return c.filter_center_nm; }),
      quantity("jsa_fwhm", Dim::length, "nm", [](C& c) -> double& { return c.jsa_fwhm_nm; }),
      quantity("jsa_correlation", Dim::none, "", [](C& c) -> double& { return c.jsa_correlation; }),
      quantity("grid_start", Dim::length, "nm", [](C& c) -> double& { return c.grid_start_nm; }),
      quantity("grid_stop", Dim::length, "nm", [](C& c) -> double& { return c.grid_stop_nm; }),
      integer<std::size_t>("grid_bins", [](C& c) -> std::size_t& { return c.grid_bins; }),
      integer<std::size_t>("oversample", [](C& c) -> std::size_t& { return c.oversample; }),
      quantity("visibility", Dim::none, "", [](C& c) -> double& { return c.visibility; }),
      quantity("residual_delay", Dim::time, "fs", [](C& c) -> double& { return c.residual_delay_fs; }),
      boolean("apply_absorption", [](C& c) -> bool& { return c.apply_absorption; }),
      quantity("chi", Dim::none, "", [](C& c) -> double& { return c.detection.chi; }),
      quantity("eta", Dim::none, "", [](C& c) -> double& { return c.detection.eta; }),
      quantity("f_rep", Dim::frequency, "Hz", [](C& c) -> double& { return c.detection.f_rep; }),
      quantity("t_exp", Dim::time, "s", [](C& c) -> double& { return c.detection.t_exp; }),
      quantity("dark_rate", Dim::none, "", [](C& c) -> double& { return c.detection.dark_rate; }),
      integer<std::uint64_t>("seed", [](C& c) -> std::uint64_t& { return c.detection.seed; }),
      integer<std::uint64_t>("frames", [](C& c) -> std::uint64_t& { return c.frames; }),
      quantity("fit_init_od", Dim::none, "", [](C& c) -> double& { return c.fit.init_od; }),
      quantity("fit_init_visibility", Dim::none, "", [](C& c) -> double& { return c.fit.init_visibility; }),
      quantity("fit_init_delay", Dim::time, "fs", [](C& c) -> double& { return c.fit.init_delay_fs; }),
      quantity("fit_od_min", Dim::none, "", [](C& c) -> double& { return c.fit.od.lo; }),
      quantity("fit_od_max", Dim::none, "", [](C& c) -> double& { return c.fit.od.hi; }),
      quantity("fit_visibility_min", Dim::none, "", [](C& c) -> double& { return c.fit.visibility.lo; }),
      quantity("fit_visibility_max", Dim::none, "", [](C& c) -> double& { return c.fit.visibility.hi; }),
      quantity("fit_delay_min", Dim::time, "fs", [](C& c) -> double& { return c.fit.delay_fs.lo; }),
      quantity("fit_delay_max", Dim::time, "fs", [](C& c) -> double& { return c.fit.delay_fs.hi; }),
      boolean("fit_visibility", [](C& c) -> bool& { return c.fit.fit_visibility; }),
      boolean("fit_delay", [](C& c) -> bool& { return c.fit.fit_delay; }),
      integer<int>("fit_max_iterations", [](C& c) -> int& { return c.fit.max_iterations; }),
      quantity("fit_tolerance", Dim::none, "", [](C& c) -> double& { return c.fit.tolerance; }),
      quantity("fit_gradient_tolerance", Dim::none, "", [](C& c) -> double& { return c.fit.gradient_tolerance; }),
      integer<std::size_t>("fit_mask_radius", [](C& c) -> std::size_t& { return c.fit.mask_radius; }),
      integer<std::size_t>("fit_kernel_width", [](C& c) -> std::size_t& { return c.fit.kernel_width; }),
      integer<std::size_t>("fit_starts", [](C& c) -> std::size_t& { return c.fit.n_starts; }),
      quantity("fit_ladder_min", Dim::none, "", [](C& c) -> double& { return c.fit.ladder_min; }),
      quantity("fit_ladder_max", Dim::none, "", [](C& c) -> double& { return c.fit.ladder_max; }),
      integer<std::size_t>("fit_scan_points", [](C& c) -> std::size_t& { return c.fit.scan_points; }),
      integer<std::size_t>("fit_scan_minima", [](C& c) -> std::size_t& { return c.fit.scan_minima; }),
      {"output_dir", [](C& c, std::string_view v, int) { c.output_dir = std::string(trim(v)); },
       [](const C& c) { return c.output_dir; }},
  };
  return table;
}

inline const KeySpec* find_key(std::string_view key) {
  for (const KeySpec& k : key_table())
    if (k.key == key) return &k;
  return nullptr;
}

}  // namespace detail

/// Range checks that the key parsers cannot do on their own.
inline void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.temperature_k > 0.0, "temperature must be above absolute zero");
  require(c.cell_length_m >= 0.0, "cell_length must be non-negative");
  require(!c.optical_depth || *c.optical_depth >= 0.0, "optical_depth must be non-negative");
  require(c.resonance_nm > 0.0 && c.filter_center_nm > 0.0, "wavelengths must be positive");
  require(c.jsa_fwhm_nm > 0.0, "jsa_fwhm must be positive");
  require(c.jsa_correlation > -1.0 && c.jsa_correlation < 1.0, "jsa_correlation must lie in (-1, 1)");
  require(c.grid_bins >= 2 && c.grid_bins <= 0xffff, "grid_bins must lie in [2, 65535]");
  require(c.grid_stop_nm > c.grid_start_nm && c.grid_start_nm > 0.0, "grid_stop must exceed grid_start > 0");
  require(c.oversample >= 1, "oversample must be >= 1");
  require(c.visibility >= 0.0 && c.visibility <= 1.0, "visibility must lie in [0, 1]");
  require(c.frames <= 0xffffffffULL, "frames must fit in 32 bits");
  require(c.fit.max_iterations > 0, "fit_max_iterations must be positive");
  require(c.fit.tolerance > 0.0, "fit_tolerance must be positive");
  require(c.fit.kernel_width % 2 == 1, "fit_kernel_width must be odd");
  require(c.fit.od.lo <= c.fit.od.hi && c.fit.visibility.lo <= c.fit.visibility.hi &&
              c.fit.delay_fs.lo <= c.fit.delay_fs.hi,
          "fit bounds are inverted");
  require(c.fit.ladder_min > 0.0 && c.fit.ladder_max >= c.fit.ladder_min, "fit ladder must be positive and ordered");
  try {
    c.detection.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

/// Applies one "key = value" assignment; line < 0 marks a command-line override.
inline void apply_setting(ExperimentConfig& config, std::string_view assignment, int line) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line);
  const std::string_view key = trim(assignment.substr(0, eq));
  const std::string_view value = trim(assignment.substr(eq + 1));
  const detail::KeySpec* spec = detail::find_key(key);
  if (!spec) throw ConfigError("unknown key '" + std::string(key) + "'", line);
  if (value.empty()) throw ConfigError("empty value for '" + std::string(key) + "'", line);
  spec->set(config, value, line);
}

/// Parses a config file on top of the defaults. '#' starts a comment; every
/// key may appear at most once.
inline ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig config;
  std::vector<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    const std::string key(trim(text.substr(0, eq == std::string_view::npos ? text.size() : eq)));
    for (const auto& k : seen)
      if (k == key) throw ConfigError("duplicate key '" + key + "'", line);
    apply_setting(config, text, line);
    seen.push_back(key);
  }
  validate(config);
  return config;
}

inline ExperimentConfig parse_config(std::string_view text) {
  std::istringstream is{std::string(text)};
  return parse_config(is);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  try {
    return parse_config(is);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Writes every key in its canonical unit; parse_config reads it back to an
/// identical config.
inline void write_config(std::ostream& os, const ExperimentConfig& config) {
  os << "# shom experiment config\n";
  for (const detail::KeySpec& k : detail::key_table()) os << k.key << " = " << k.get(config) << '\n';
}

inline std::string to_string(const ExperimentConfig& config) {
  std::ostringstream os;
  write_config(os, config);
  return os.str();
}

}  // namespace shom
