#include "qfog/sagnac.hpp"

#include <cmath>
#include <stdexcept>

namespace qfog {

RotationRate::RotationRate(double omega_rad_per_s)
    : omega_rad_per_s(omega_rad_per_s) {
  detail::require(std::isfinite(omega_rad_per_s), "RotationRate",
                  "omega_rad_per_s", "must be finite");
}

TotalPhotons total_photons(NoonPairs pairs, int order) {
  return TotalPhotons{pairs.value * order};
}

double sagnac_phase(RotationRate omega, const GyroGeometry& geom) {
  return 4.0 * kPi * omega.omega_rad_per_s * geom.fiber_length_m *
         geom.coil_radius_m / (geom.wavelength_m * kSpeedOfLight);
}

double coincidence_probability(double pairs, const PhasePoint& phase,
                               int order, double coherence) {
  if (!(pairs >= 0)) {
    throw std::invalid_argument("coincidence_probability: pairs must be >= 0");
  }
  if (!(coherence >= 0 && coherence <= 1)) {
    throw std::invalid_argument(
        "coincidence_probability: coherence must lie in [0, 1]");
  }
  return 0.5 * pairs * (1.0 + coherence * std::cos(order * phase.total()));
}

double shot_noise(int order, TotalPhotons photons) {
  if (order < 1) throw std::invalid_argument("shot_noise: order must be >= 1");
  if (!(photons.value > 0) || !std::isfinite(photons.value)) {
    throw std::invalid_argument(
        "shot_noise: photon number must be positive and finite");
  }
  return 1.0 / std::sqrt(static_cast<double>(order) * photons.value);
}

double shot_noise(int order, NoonPairs pairs) {
  return shot_noise(order, total_photons(pairs, order));
}

RotationRate omega_min(const GyroGeometry& geom, int order,
                       TotalPhotons photons) {
  const double dphi = shot_noise(order, photons);
  return RotationRate{dphi * geom.wavelength_m * kSpeedOfLight /
                      (4.0 * kPi * geom.fiber_length_m * geom.coil_radius_m)};
}

RotationRate omega_min(const GyroGeometry& geom, int order, NoonPairs pairs) {
  return omega_min(geom, order, total_photons(pairs, order));
}

}  // namespace qfog
