#pragma once

// JSON instrument configuration. Keys carry their units; unknown keys at any
// level are rejected.
//
//   {
//     "geometry":   {"fiber_length_m", "coil_radius_m", "wavelength_m"},
//     "source":     {"noon_order", "pair_rate_hz", "initial_noon_fraction",
//                    "dark_rate_hz"?},
//     "path":       {"fiber_loss_db_per_km", "lumped_loss_db"},
//     "detection":  {"jitter_s", "measurement_time_s", "window_mode"?},
//     "spectrum":   {"center_wavelength_m", "linewidth_m"},
//     "dispersion"?: {"chromatic_coeff_ps_per_km_nm"?, "pmd_coeff_ps_per_sqrt_km"?},
//     "pump"?:      {"drift_nm_per_degC"?, "stability_degC"?},
//     "base_coherence"?, "bias_phase_rad"?, "rotation_rad_per_s"?,
//     "reciprocal_delay_s"?
//   }
//
// `source.pair_rate_hz` is the N00N flux arriving at the detectors.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qfog/core_model.hpp"
#include "qfog/dispersion.hpp"

namespace qfog::cli {

/// Unreadable file or malformed JSON.
class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed JSON that does not describe a valid instrument.
class ConfigValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PumpDrift {
  double drift_nm_per_degC = 0.2;
  double stability_degC = 0.01;

  bool operator==(const PumpDrift&) const = default;
};

struct InstrumentConfig {
  GyroGeometry geometry;
  SourceSpec source;
  OpticalPath path;
  DetectionSpec detection;
  SpectralSpec spectrum;
  DispersionSpec dispersion;
  PumpDrift pump;
  double base_coherence = 1.0;
  double bias_phase_rad = 0.0;
  double rotation_rad_per_s = 0.0;
  double reciprocal_delay_s = 0.0;

  bool operator==(const InstrumentConfig&) const = default;
};

InstrumentConfig parse_config(std::string_view json_text);
InstrumentConfig load_config(const std::filesystem::path& file);
nlohmann::json to_json(const InstrumentConfig& cfg);

}  // namespace qfog::cli
