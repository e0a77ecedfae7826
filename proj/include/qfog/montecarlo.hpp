#pragma once

// Stochastic cross-check of the accidental-coincidence formula and of the
// phase bias that spurious counts induce in a fringe-inversion estimator.
//
// Each trial draws from its own generator seeded from (seed, trial index), so
// results are bit-identical for any number of workers.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qfog/core_model.hpp"
#include "qfog/spurious.hpp"

namespace qfog {

/// Upper bound on t_meas / tau. Arrival times are kept as (bin, offset)
/// pairs; the limit keeps bin indices and gap sums well inside exact range.
inline constexpr double kMaxCoincidenceWindows = 1e15;

struct McConfig {
  std::uint64_t seed;
  int trials;
  WindowMode window_mode;
  unsigned workers;

  McConfig(std::uint64_t seed, int trials,
           WindowMode window_mode = WindowMode::binned, unsigned workers = 1);
};

using RngStream = std::mt19937_64;

/// Deterministic generator for one trial; depends only on (seed, index).
RngStream rng_stream(std::uint64_t seed, std::uint64_t trial_index);

struct McResult {
  double mean_coincidences = 0.0;
  double variance = 0.0;  ///< unbiased sample variance over trials
  std::vector<std::uint64_t> per_trial;
  double analytic_prediction = 0.0;  ///< product formula (binned counting)
  double standard_error = 0.0;
  double z_score = 0.0;
};

/// Independent Poisson arrival streams, one per detector, over t_meas.
///
/// Binned mode partitions time into tau-wide bins and counts bins holding at
/// least one arrival on every detector; its mean matches the product formula
/// to O(rate * tau). Sliding mode counts N-tuples (one arrival per detector)
/// whose spread max - min is at most tau; for identical streams it is never
/// below the binned count, and its mean is about N times larger.
McResult simulate_uncorrelated(std::span<const double> rates_per_detector_hz,
                               const DetectionSpec& det, const McConfig& mc);

struct ExperimentResult {
  int trials = 0;
  int inversion_failures = 0;
  double failure_fraction = 0.0;
  double mean_bias_rad = 0.0;      ///< mean(phi_hat - phi_total) over successes
  double bias_standard_error = 0.0;
  double spread_rad = 0.0;         ///< sample std of phi_hat
  double predicted_bias_rad = 0.0; ///< phase_shift_spurious, NaN if undefined
  bool predicted_bias_defined = true;
  double predicted_spread_rad = 0.0; ///< shot noise / C at quadrature
  double bias_z_score = 0.0;
  std::vector<double> estimates;   ///< NaN for failed inversions
};

/// Per trial: k = Binomial(M_N00N, (1 + C cos N phi)/2) + Poisson(dP), then
/// invert the ideal fringe for phi_hat on the branch nearest the operating
/// point. Observed counts outside the fringe range are counted as failures.
ExperimentResult simulate_experiment(double pairs, const PhasePoint& phase,
                                     int order, double coherence,
                                     const SpuriousCount& count,
                                     const McConfig& mc);

}  // namespace qfog
