#include "qfog/dispersion.hpp"

#include <cmath>
#include <stdexcept>

namespace qfog {

namespace {

constexpr double kPs = 1e-12;
constexpr double kCoherenceExponent = 3.5;

void require_length(double length_m, const char* who) {
  if (!(length_m >= 0) || !std::isfinite(length_m)) {
    throw std::invalid_argument(std::string(who) +
                                ": length must be non-negative and finite");
  }
}

}  // namespace

SpectralSpec::SpectralSpec(double center_wavelength_m, double linewidth_m)
    : center_wavelength_m(center_wavelength_m), linewidth_m(linewidth_m) {
  detail::require(std::isfinite(center_wavelength_m) && center_wavelength_m > 0,
                  "SpectralSpec", "center_wavelength_m",
                  "must be positive and finite");
  detail::require(std::isfinite(linewidth_m) && linewidth_m > 0, "SpectralSpec",
                  "linewidth_m", "must be positive and finite");
  detail::require(linewidth_m < center_wavelength_m, "SpectralSpec",
                  "linewidth_m", "must be smaller than center_wavelength_m");
}

DispersionSpec::DispersionSpec(double chromatic_coeff_ps_per_km_nm,
                               double pmd_coeff_ps_per_sqrt_km)
    : chromatic_coeff_ps_per_km_nm(chromatic_coeff_ps_per_km_nm),
      pmd_coeff_ps_per_sqrt_km(pmd_coeff_ps_per_sqrt_km) {
  detail::require(std::isfinite(chromatic_coeff_ps_per_km_nm) &&
                      chromatic_coeff_ps_per_km_nm >= 0,
                  "DispersionSpec", "chromatic_coeff_ps_per_km_nm",
                  "must be non-negative and finite");
  detail::require(
      std::isfinite(pmd_coeff_ps_per_sqrt_km) && pmd_coeff_ps_per_sqrt_km >= 0,
      "DispersionSpec", "pmd_coeff_ps_per_sqrt_km",
      "must be non-negative and finite");
}

double coherence_time(const SpectralSpec& spec) {
  const double lambda = spec.center_wavelength_m;
  return lambda * lambda / (kSpeedOfLight * spec.linewidth_m);
}

double coherence_factor(double delta_t_s, double tau_s) {
  if (!(tau_s > 0)) {
    throw std::invalid_argument("coherence_factor: tau must be positive");
  }
  const double r = delta_t_s / tau_s;
  return std::exp(-kCoherenceExponent * r * r);
}

double chromatic_delay(const DispersionSpec& disp, double length_m,
                       const SpectralSpec& spec) {
  require_length(length_m, "chromatic_delay");
  const double length_km = length_m * 1e-3;
  const double linewidth_nm = spec.linewidth_m * 1e9;
  return disp.chromatic_coeff_ps_per_km_nm * length_km * linewidth_nm * kPs;
}

double pmd_delay(const DispersionSpec& disp, double length_m) {
  require_length(length_m, "pmd_delay");
  return disp.pmd_coeff_ps_per_sqrt_km * std::sqrt(length_m * 1e-3) * kPs;
}

CoherenceBreakdown coherence_budget(const DispersionSpec& disp,
                                    const SpectralSpec& spec, double length_m,
                                    double base_coherence,
                                    double reciprocal_delay_s) {
  if (!(base_coherence > 0 && base_coherence <= 1)) {
    throw std::invalid_argument(
        "coherence_budget: base coherence must lie in (0, 1]");
  }
  CoherenceBreakdown b{};
  b.coherence_time_s = coherence_time(spec);
  b.reciprocal_factor = coherence_factor(reciprocal_delay_s, b.coherence_time_s);
  b.chromatic_delay_s = chromatic_delay(disp, length_m, spec);
  b.chromatic_factor = coherence_factor(b.chromatic_delay_s, b.coherence_time_s);
  b.pmd_delay_s = pmd_delay(disp, length_m);
  b.pmd_factor = coherence_factor(b.pmd_delay_s, b.coherence_time_s);
  b.base_coherence = base_coherence;
  b.total = base_coherence * b.reciprocal_factor * b.chromatic_factor *
            b.pmd_factor;
  return b;
}

PumpDriftError pump_drift_phase_error(double drift_nm_per_degC,
                                      double stability_degC,
                                      const SpectralSpec& spec,
                                      double sagnac_phase_rad) {
  if (!(drift_nm_per_degC >= 0) || !(stability_degC >= 0)) {
    throw std::invalid_argument(
        "pump_drift_phase_error: drift and stability must be non-negative");
  }
  const double wander_m = drift_nm_per_degC * stability_degC * 1e-9;
  const double relative = wander_m / spec.center_wavelength_m;
  return {relative, relative * std::abs(sagnac_phase_rad)};
}

}  // namespace qfog
