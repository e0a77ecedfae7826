#pragma once

// Coherence loss from finite linewidth and non-reciprocal arrival-time
// spreads, and the phase error from SPDC wavelength drift.

#include "qfog/core_model.hpp"

namespace qfog {

struct SpectralSpec {
  double center_wavelength_m;
  double linewidth_m;

  SpectralSpec(double center_wavelength_m, double linewidth_m);

  bool operator==(const SpectralSpec&) const = default;
};

struct DispersionSpec {
  double chromatic_coeff_ps_per_km_nm = 0.01;
  double pmd_coeff_ps_per_sqrt_km = 0.1;

  DispersionSpec() = default;
  DispersionSpec(double chromatic_coeff_ps_per_km_nm,
                 double pmd_coeff_ps_per_sqrt_km);

  bool operator==(const DispersionSpec&) const = default;
};

/// lambda^2 / (c * dlambda)
double coherence_time(const SpectralSpec& spec);

/// exp(-3.5 dt^2 / tau^2). The same constant is used for every delay source.
double coherence_factor(double delta_t_s, double tau_s);

/// Differential chromatic broadening between the PM fiber axes, in seconds.
double chromatic_delay(const DispersionSpec& disp, double length_m,
                       const SpectralSpec& spec);

/// PMD spread coeff * sqrt(L_km), in seconds.
double pmd_delay(const DispersionSpec& disp, double length_m);

struct CoherenceBreakdown {
  double coherence_time_s;
  double reciprocal_factor;
  double chromatic_delay_s;
  double chromatic_factor;
  double pmd_delay_s;
  double pmd_factor;
  double base_coherence;
  double total;  ///< product of all factors
};

/// Independent delay sources multiply their coherence factors.
CoherenceBreakdown coherence_budget(const DispersionSpec& disp,
                                    const SpectralSpec& spec, double length_m,
                                    double base_coherence = 1.0,
                                    double reciprocal_delay_s = 0.0);

struct PumpDriftError {
  double relative;      ///< fraction of the Sagnac phase
  double absolute_rad;
};

/// The Sagnac phase scales as 1/lambda, so a wavelength wander of
/// drift * stability shifts it by that fraction of lambda.
PumpDriftError pump_drift_phase_error(double drift_nm_per_degC,
                                      double stability_degC,
                                      const SpectralSpec& spec,
                                      double sagnac_phase_rad);

}  // namespace qfog
