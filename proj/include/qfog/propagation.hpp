#pragma once

// Loss propagation of N00N states and uncorrelated single photons.
//
// A N00N state survives a transmission T with probability T^2; when exactly
// one photon is lost the survivor joins the single-photon population. The
// closed form for a total transmission T is
//
//   pairs'   = pairs * T^2
//   singles' = T * (singles + pairs * (1 - T))
//
// and composes exactly: propagate(propagate(p, T1), T2) == propagate(p, T1*T2).

#include <vector>

#include "qfog/core_model.hpp"

namespace qfog {

struct PhotonPopulations {
  double noon_pairs;
  double singles;  ///< total over all detectors

  PhotonPopulations(double noon_pairs, double singles);
};

/// 10^(-(alpha*L_km + lumped_db)/10). Throws if the result underflows to 0.
double fiber_transmission(const OpticalPath& path, double length_m);

PhotonPopulations propagate_populations(const PhotonPopulations& initial,
                                        double transmission);

/// M_N00N / (M_N00N + M_1). Throws std::domain_error when both are zero.
double noon_ratio(const PhotonPopulations& pop);

/// Uncorrelated flux accompanying `noon_rate_hz` at N00N fraction R.
double singles_rate_from_ratio(double noon_rate_hz, double ratio);

struct FiberSample {
  double length_m;
  PhotonPopulations populations;
};

/// Populations at `samples` evenly spaced positions along the coil. Interior
/// rows see fiber attenuation only; the last row is the full path including
/// lumped losses, i.e. what reaches the detectors.
std::vector<FiberSample> propagate_along_fiber(const PhotonPopulations& initial,
                                               const OpticalPath& path,
                                               double length_m, int samples);

}  // namespace qfog
