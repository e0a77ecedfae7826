#pragma once

// Shared value types for the gyroscope noise model.
//
// Units are SI throughout (m, s, Hz, rad) except optical loss, which is
// carried in dB/km and dB. Photon populations are real-valued; nothing here
// rounds to integers.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qfog {

struct PhysConstants {
  static constexpr double c_m_per_s = 299792458.0;
};

inline constexpr double kSpeedOfLight = PhysConstants::c_m_per_s;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEarthRate_rad_per_s = 7.29e-5;

/// Thrown by constructors when a field violates its invariant. The message
/// names the offending field as `Type.field`.
class InvalidField : public std::invalid_argument {
 public:
  InvalidField(std::string_view type, std::string_view field,
               std::string_view why);

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct GyroGeometry {
  double fiber_length_m;
  double coil_radius_m;
  double wavelength_m;

  GyroGeometry(double fiber_length_m, double coil_radius_m,
               double wavelength_m);

  bool operator==(const GyroGeometry&) const = default;
};

struct SourceSpec {
  int noon_order;
  double pair_rate_hz;
  double initial_noon_fraction;
  double dark_rate_hz;

  SourceSpec(int noon_order, double pair_rate_hz, double initial_noon_fraction,
             double dark_rate_hz = 0.0);

  bool operator==(const SourceSpec&) const = default;
};

struct OpticalPath {
  double fiber_loss_db_per_km;
  double lumped_loss_db;

  OpticalPath(double fiber_loss_db_per_km, double lumped_loss_db);

  /// Total loss in dB over `length_m` of fiber plus the lumped elements.
  double total_loss_db(double length_m) const {
    return fiber_loss_db_per_km * (length_m * 1e-3) + lumped_loss_db;
  }

  bool operator==(const OpticalPath&) const = default;
};

enum class WindowMode { binned, sliding };

std::string_view to_string(WindowMode mode);
WindowMode window_mode_from_string(std::string_view name);

struct DetectionSpec {
  double jitter_s;
  double measurement_time_s;
  WindowMode window_mode;

  DetectionSpec(double jitter_s, double measurement_time_s,
                WindowMode window_mode = WindowMode::binned);

  bool operator==(const DetectionSpec&) const = default;
};

/// Sagnac phase plus applied bias. Interferometer formulas depend only on
/// the sum.
struct PhasePoint {
  double sagnac_phase_rad;
  double bias_phase_rad;

  PhasePoint(double sagnac_phase_rad, double bias_phase_rad);

  double total() const { return sagnac_phase_rad + bias_phase_rad; }
};

/// Reduce `phase` into [0, 2*pi/order).
double reduce_phase(double phase, int order);

namespace detail {

void require(bool ok, std::string_view type, std::string_view field,
             std::string_view why);

inline bool finite(double x) { return std::isfinite(x); }

}  // namespace detail

}  // namespace qfog
