#pragma once

// Ideal N00N interferometer: Sagnac phase, coincidence fringe, shot noise
// and the minimum detectable rotation rate.

#include "qfog/core_model.hpp"

namespace qfog {

struct RotationRate {
  double omega_rad_per_s;

  explicit RotationRate(double omega_rad_per_s);
};

/// Total detected photon number M.
struct TotalPhotons {
  double value;
};

/// Number of detected N00N states M_N00N. Each carries `order` photons, so
/// M = order * M_N00N.
struct NoonPairs {
  double value;
};

TotalPhotons total_photons(NoonPairs pairs, int order);

/// 4*pi*Omega*L*r / (lambda*c). Odd in Omega.
double sagnac_phase(RotationRate omega, const GyroGeometry& geom);

/// Expected coincidences (M/2)(1 + C cos(N*phi_total)) for `pairs` N00N
/// states with fringe visibility `coherence`.
double coincidence_probability(double pairs, const PhasePoint& phase,
                               int order, double coherence = 1.0);

/// Phase-estimation floor 1/sqrt(N*M).
double shot_noise(int order, TotalPhotons photons);
double shot_noise(int order, NoonPairs pairs);

/// Rotation rate whose Sagnac phase equals the shot-noise floor.
RotationRate omega_min(const GyroGeometry& geom, int order,
                       TotalPhotons photons);
RotationRate omega_min(const GyroGeometry& geom, int order, NoonPairs pairs);

}  // namespace qfog
