#pragma once

// Batch commands behind the `qfog` executable. Each command has a compute
// step returning plain data and a print step, so tests can check either.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfog/cli/config.hpp"
#include "qfog/dispersion.hpp"
#include "qfog/montecarlo.hpp"
#include "qfog/propagation.hpp"
#include "qfog/spurious.hpp"

namespace qfog::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfigParse = 2,
  kExitConfigValidate = 3,
  kExitComputation = 4,
  kExitOutput = 5,
};

/// Bad command-line arguments (as opposed to a bad config).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output file could not be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference figures quoted alongside computed values.
inline constexpr double kReferenceCrossingOffset_rad = 14e-3;
inline constexpr double kReferenceUndefinedHalfWidth_rad = 1e-3;

struct BudgetReport {
  double transmission;
  PhotonPopulations populations_at_detectors;  ///< per unit initial photon state
  double noon_ratio;
  double noon_rate_hz;
  double singles_rate_hz;
  double noon_pairs;      ///< M_N00N over t_meas
  double singles_count;   ///< M_1 over t_meas
  SpuriousCount spurious;
  SpuriousCount spurious_dark_free;
  double dark_contribution;  ///< spurious.delta_pcc - spurious_dark_free.delta_pcc
  double shot_noise_rad;
  double sagnac_phase_rad;
  double phase_total_rad;
  PhaseShiftSolution phase_shift_at_bias;
  bool sub_shot_noise_at_bias;
  double dphi_p0_rad;
  double dphi_p0_coherent_rad;  ///< with M_N00N -> C * M_N00N
  double undefined_half_width_rad;
  double omega_min_rad_per_s;
  CoherenceBreakdown coherence;
  PumpDriftError pump_drift;
  double max_singles_rate_hz;
};

BudgetReport compute_budget(const InstrumentConfig& cfg);
void print_budget(const BudgetReport& r, std::ostream& out);

struct SweepRow {
  double phase_total_rad;
  std::optional<double> abs_dphi_p_rad;  ///< empty where undefined
  double shot_noise_rad;
  double shot_noise_tenth_rad;
  double dphi_p0_rad;

  bool defined() const { return abs_dphi_p_rad.has_value(); }
};

std::vector<SweepRow> compute_sweep(const InstrumentConfig& cfg, double from_rad,
                                    double to_rad, int points,
                                    unsigned workers = 1);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

/// Scans total phase over [range_lo, range_hi]; [0, pi] by default.
BiasZoneReport compute_zones(const InstrumentConfig& cfg,
                             ThresholdKind threshold, unsigned workers = 1,
                             double range_lo = 0.0,
                             double range_hi = kPi);
void print_zones(const BiasZoneReport& r, std::ostream& out);

struct McReport {
  double scaled_measurement_time_s;
  McResult coincidences;
  ExperimentResult experiment;
};

McReport run_mc(const InstrumentConfig& cfg, int trials, std::uint64_t seed,
                double scale, unsigned workers = 1);
void print_mc(const McReport& r, std::ostream& out);

struct OmegaMinReport {
  double total_photons;
  double shot_noise_rad;
  double omega_min_rad_per_s;
  bool below_earth_rate;
};

OmegaMinReport compute_omega_min(const InstrumentConfig& cfg);
void print_omega_min(const OmegaMinReport& r, std::ostream& out);

/// Locale-independent scientific notation with 9 significant digits.
std::string format_sci(double value);

/// Entry point shared by the executable and the CLI tests.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace qfog::cli
