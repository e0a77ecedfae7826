#include "qfog/propagation.hpp"

#include <cmath>
#include <stdexcept>

namespace qfog {

PhotonPopulations::PhotonPopulations(double noon_pairs, double singles)
    : noon_pairs(noon_pairs), singles(singles) {
  detail::require(std::isfinite(noon_pairs) && noon_pairs >= 0,
                  "PhotonPopulations", "noon_pairs",
                  "must be non-negative and finite");
  detail::require(std::isfinite(singles) && singles >= 0, "PhotonPopulations",
                  "singles", "must be non-negative and finite");
}

double fiber_transmission(const OpticalPath& path, double length_m) {
  if (!(length_m >= 0) || !std::isfinite(length_m)) {
    throw std::invalid_argument(
        "fiber_transmission: length must be non-negative and finite");
  }
  const double t = std::pow(10.0, -path.total_loss_db(length_m) / 10.0);
  if (!(t > 0)) {
    throw std::domain_error("fiber_transmission: transmission underflows to 0");
  }
  return t;
}

PhotonPopulations propagate_populations(const PhotonPopulations& initial,
                                        double transmission) {
  if (!(transmission > 0 && transmission <= 1)) {
    throw std::invalid_argument(
        "propagate_populations: transmission must lie in (0, 1]");
  }
  const double t = transmission;
  return PhotonPopulations{
      initial.noon_pairs * t * t,
      t * (initial.singles + initial.noon_pairs * (1.0 - t))};
}

double noon_ratio(const PhotonPopulations& pop) {
  const double total = pop.noon_pairs + pop.singles;
  if (!(total > 0)) {
    throw std::domain_error("noon_ratio: both populations are zero");
  }
  return pop.noon_pairs / total;
}

double singles_rate_from_ratio(double noon_rate_hz, double ratio) {
  if (!(ratio > 0 && ratio <= 1)) {
    throw std::invalid_argument(
        "singles_rate_from_ratio: ratio must lie in (0, 1]");
  }
  if (!(noon_rate_hz >= 0)) {
    throw std::invalid_argument(
        "singles_rate_from_ratio: noon rate must be non-negative");
  }
  return noon_rate_hz * (1.0 - ratio) / ratio;
}

std::vector<FiberSample> propagate_along_fiber(const PhotonPopulations& initial,
                                               const OpticalPath& path,
                                               double length_m, int samples) {
  if (samples < 2) {
    throw std::invalid_argument("propagate_along_fiber: samples must be >= 2");
  }
  const OpticalPath fiber_only{path.fiber_loss_db_per_km, 0.0};
  std::vector<FiberSample> rows;
  rows.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const bool last = i == samples - 1;
    const double l =
        last ? length_m : length_m * static_cast<double>(i) / (samples - 1);
    const double t = fiber_transmission(last ? path : fiber_only, l);
    rows.push_back({l, propagate_populations(initial, t)});
  }
  return rows;
}

}  // namespace qfog
