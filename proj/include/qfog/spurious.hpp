#pragma once

// Spurious coincidences from uncorrelated photons and the Sagnac phase error
// they masquerade as.
//
// Notation used below: theta = N * phi_total is the fringe phase, and
// a = 2 * dP / M_N00N is the spurious count relative to the fringe
// half-amplitude. A spurious count dP is indistinguishable from a phase shift
// dphi satisfying
//
//   cos(theta + N*dphi) = cos(theta) + a,
//
// which has no real solution where cos(theta) > 1 - a. Those regions surround
// the coincidence maxima theta = 2*pi*k and are reported as undefined.

#include <optional>
#include <span>
#include <vector>

#include "qfog/core_model.hpp"

namespace qfog {

struct SpuriousCount {
  double delta_pcc;  ///< expected spurious coincidences over t_meas
  double rate_hz;    ///< delta_pcc / t_meas

  SpuriousCount(double delta_pcc, double measurement_time_s);
};

/// Accidental N-fold coincidences from `singles_total` uncorrelated photons
/// spread evenly over `order` detectors, plus `dark_rate_hz` per detector.
SpuriousCount spurious_coincidences(double singles_total, int order,
                                    const DetectionSpec& det,
                                    double dark_rate_hz = 0.0);

/// Generalized product form for unequal detectors:
/// prod_i(m_i) * (tau/t)^(n-1), with m_i the per-detector count over t_meas.
double spurious_coincidences_product(std::span<const double> per_detector_counts,
                                     const DetectionSpec& det);

/// Change in expected coincidences when the phase moves by `dphi`:
/// (M/2){cos(N phi)(cos(N dphi) - 1) - sin(N phi) sin(N dphi)}.
double coincidence_shift_forward(double pairs, double phase_total, int order,
                                 double dphi);

struct PhaseShiftSolution {
  double value_rad;  ///< NaN when undefined
  int branch_sign;   ///< +1 for the -acos branch, -1 for the +acos branch
  long branch_index; ///< n in the 2*pi*n/N offset
  bool defined;
};

/// Smallest-magnitude phase shift that reproduces `count` on top of the
/// fringe. Enumerates both acos branches and n within two periods of the
/// reduced phase, then polishes the winner with Newton steps on the forward
/// residual so small counts keep full relative precision.
PhaseShiftSolution phase_shift_spurious(double pairs, double phase_total,
                                        int order, const SpuriousCount& count);

/// Peak phase error at the cusps: (2/N) sqrt(dP / M_N00N).
double phase_shift_cusp(double pairs, int order, const SpuriousCount& count);

/// Exact half-width acos(1 - a)/N of the undefined interval around each
/// coincidence maximum. Returns pi/N once a >= 2 (undefined everywhere except
/// the minima).
double undefined_half_width(double pairs, int order, const SpuriousCount& count);

enum class ThresholdKind { shot_noise, tenth_shot_noise };

struct PhaseInterval {
  double lo;
  double hi;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct ShotNoiseCrossing {
  double phase_rad;
  double cusp_rad;     ///< nearest cusp n*pi/N
  double offset_rad;   ///< phase_rad - cusp_rad
  bool at_maximum;     ///< nearest cusp is a coincidence maximum
  double residual_rad; ///< | |dphi_P(phase)| - threshold |
};

struct ZoneScanOptions {
  double range_lo = 0.0;
  double range_hi = kPi;
  int points_per_pi = 4000;
  ThresholdKind threshold = ThresholdKind::shot_noise;
  unsigned workers = 1;
};

struct BiasZoneReport {
  double threshold_rad = 0.0;
  double undefined_half_width_rad = 0.0;
  double cusp_peak_rad = 0.0;
  std::vector<double> cusp_locations;
  std::vector<PhaseInterval> undefined_intervals;
  /// Where |dphi_P| >= threshold or no solution exists.
  std::vector<PhaseInterval> above_shot_noise_intervals;
  std::vector<PhaseInterval> safe_windows;
  std::vector<ShotNoiseCrossing> crossings;
  std::vector<double> optimal_bias_points;

  /// Mean |offset| of crossings next to maxima / minima, when any exist.
  std::optional<double> max_cusp_crossing_offset() const;
  std::optional<double> min_cusp_crossing_offset() const;
};

double threshold_value(ThresholdKind kind, double shot_noise_rad);

/// Classify the total-phase range into cusps, undefined intervals, intervals
/// above threshold and safe windows. Edges between a safe and an unsafe grid
/// cell are refined by bisection on |dphi_P| - threshold.
BiasZoneReport bias_zone_scan(double pairs, int order,
                              const SpuriousCount& count,
                              double shot_noise_rad,
                              const ZoneScanOptions& options = {});

/// Largest total singles rate keeping |dphi_P| at the optimal bias below
/// `safety_margin` times the shot noise (M = N * M_N00N).
double max_singles_flux(double pairs_rate_hz, int order,
                        const DetectionSpec& det, double safety_margin = 1.0,
                        double dark_rate_hz = 0.0);

}  // namespace qfog
