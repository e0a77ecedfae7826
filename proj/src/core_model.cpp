#include "qfog/core_model.hpp"

namespace qfog {

namespace {

std::string field_message(std::string_view type, std::string_view field,
                          std::string_view why) {
  std::string msg;
  msg.append(type).append(".").append(field).append(": ").append(why);
  return msg;
}

}  // namespace

InvalidField::InvalidField(std::string_view type, std::string_view field,
                           std::string_view why)
    : std::invalid_argument(field_message(type, field, why)),
      field_(std::string(type) + "." + std::string(field)) {}

namespace detail {

void require(bool ok, std::string_view type, std::string_view field,
             std::string_view why) {
  if (!ok) throw InvalidField(type, field, why);
}

}  // namespace detail

using detail::finite;
using detail::require;

GyroGeometry::GyroGeometry(double fiber_length_m, double coil_radius_m,
                           double wavelength_m)
    : fiber_length_m(fiber_length_m),
      coil_radius_m(coil_radius_m),
      wavelength_m(wavelength_m) {
  require(finite(fiber_length_m) && fiber_length_m > 0, "GyroGeometry",
          "fiber_length_m", "must be positive and finite");
  require(finite(coil_radius_m) && coil_radius_m > 0, "GyroGeometry",
          "coil_radius_m", "must be positive and finite");
  require(finite(wavelength_m) && wavelength_m > 100e-9 && wavelength_m < 10e-6,
          "GyroGeometry", "wavelength_m", "must lie in (100 nm, 10 um)");
}

SourceSpec::SourceSpec(int noon_order, double pair_rate_hz,
                       double initial_noon_fraction, double dark_rate_hz)
    : noon_order(noon_order),
      pair_rate_hz(pair_rate_hz),
      initial_noon_fraction(initial_noon_fraction),
      dark_rate_hz(dark_rate_hz) {
  require(noon_order >= 2, "SourceSpec", "noon_order", "must be >= 2");
  require(finite(pair_rate_hz) && pair_rate_hz >= 0, "SourceSpec",
          "pair_rate_hz", "must be non-negative and finite");
  require(finite(initial_noon_fraction) && initial_noon_fraction > 0 &&
              initial_noon_fraction <= 1,
          "SourceSpec", "initial_noon_fraction", "must lie in (0, 1]");
  require(finite(dark_rate_hz) && dark_rate_hz >= 0, "SourceSpec",
          "dark_rate_hz", "must be non-negative and finite");
}

OpticalPath::OpticalPath(double fiber_loss_db_per_km, double lumped_loss_db)
    : fiber_loss_db_per_km(fiber_loss_db_per_km),
      lumped_loss_db(lumped_loss_db) {
  require(finite(fiber_loss_db_per_km) && fiber_loss_db_per_km >= 0,
          "OpticalPath", "fiber_loss_db_per_km",
          "must be non-negative and finite");
  require(finite(lumped_loss_db) && lumped_loss_db >= 0, "OpticalPath",
          "lumped_loss_db", "must be non-negative and finite");
}

std::string_view to_string(WindowMode mode) {
  return mode == WindowMode::binned ? "binned" : "sliding";
}

WindowMode window_mode_from_string(std::string_view name) {
  if (name == "binned") return WindowMode::binned;
  if (name == "sliding") return WindowMode::sliding;
  throw InvalidField("DetectionSpec", "window_mode",
                     "must be \"binned\" or \"sliding\"");
}

DetectionSpec::DetectionSpec(double jitter_s, double measurement_time_s,
                             WindowMode window_mode)
    : jitter_s(jitter_s),
      measurement_time_s(measurement_time_s),
      window_mode(window_mode) {
  require(finite(jitter_s) && jitter_s > 0, "DetectionSpec", "jitter_s",
          "must be positive and finite");
  require(finite(measurement_time_s) && measurement_time_s > 0,
          "DetectionSpec", "measurement_time_s",
          "must be positive and finite");
  require(jitter_s < measurement_time_s, "DetectionSpec", "jitter_s",
          "must be smaller than measurement_time_s");
}

PhasePoint::PhasePoint(double sagnac_phase_rad, double bias_phase_rad)
    : sagnac_phase_rad(sagnac_phase_rad), bias_phase_rad(bias_phase_rad) {
  require(finite(sagnac_phase_rad), "PhasePoint", "sagnac_phase_rad",
          "must be finite");
  require(finite(bias_phase_rad), "PhasePoint", "bias_phase_rad",
          "must be finite");
}

double reduce_phase(double phase, int order) {
  if (order < 1) throw std::invalid_argument("reduce_phase: order must be >= 1");
  const double period = 2.0 * kPi / order;
  double r = std::fmod(phase, period);
  if (r < 0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

}  // namespace qfog
