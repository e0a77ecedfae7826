#include "qfog/spurious.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qfog/parallel.hpp"

namespace qfog {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_order(int order, const char* who) {
  if (order < 1) {
    throw std::invalid_argument(std::string(who) + ": order must be >= 1");
  }
}

void require_pairs(double pairs, const char* who) {
  if (!(pairs > 0) || !std::isfinite(pairs)) {
    throw std::invalid_argument(std::string(who) +
                                ": N00N pair count must be positive");
  }
}

// cos(theta)(cos(delta) - 1) - sin(theta) sin(delta) - a, with the
// cos(delta) - 1 term written as -2 sin^2(delta/2) to keep small shifts exact.
double residual(double cos_t, double sin_t, double delta, double a) {
  const double s = std::sin(0.5 * delta);
  return -2.0 * cos_t * s * s - sin_t * std::sin(delta) - a;
}

std::vector<PhaseInterval> merge_intervals(std::vector<PhaseInterval> v) {
  std::sort(v.begin(), v.end(),
            [](const PhaseInterval& l, const PhaseInterval& r) {
              return l.lo < r.lo;
            });
  std::vector<PhaseInterval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

}  // namespace

SpuriousCount::SpuriousCount(double delta_pcc, double measurement_time_s)
    : delta_pcc(delta_pcc), rate_hz(0.0) {
  detail::require(std::isfinite(delta_pcc) && delta_pcc >= 0, "SpuriousCount",
                  "delta_pcc", "must be non-negative and finite");
  detail::require(std::isfinite(measurement_time_s) && measurement_time_s > 0,
                  "SpuriousCount", "measurement_time_s",
                  "must be positive and finite");
  rate_hz = delta_pcc / measurement_time_s;
}

double spurious_coincidences_product(std::span<const double> per_detector_counts,
                                     const DetectionSpec& det) {
  if (per_detector_counts.size() < 2) {
    throw std::invalid_argument(
        "spurious_coincidences_product: need at least two detectors");
  }
  // prod(m_i) (tau/t)^(n-1) == (t/tau) prod(m_i tau/t); the second form
  // stays in range for large counts and high orders.
  const double window_fraction = det.jitter_s / det.measurement_time_s;
  double product = 1.0 / window_fraction;
  for (double m : per_detector_counts) {
    if (!(m >= 0) || !std::isfinite(m)) {
      throw std::invalid_argument(
          "spurious_coincidences_product: counts must be non-negative");
    }
    product *= m * window_fraction;
  }
  return product;
}

SpuriousCount spurious_coincidences(double singles_total, int order,
                                    const DetectionSpec& det,
                                    double dark_rate_hz) {
  if (order < 2) {
    throw std::invalid_argument("spurious_coincidences: order must be >= 2");
  }
  if (!(singles_total >= 0) || !std::isfinite(singles_total)) {
    throw std::invalid_argument(
        "spurious_coincidences: singles count must be non-negative");
  }
  if (!(dark_rate_hz >= 0) || !std::isfinite(dark_rate_hz)) {
    throw std::invalid_argument(
        "spurious_coincidences: dark rate must be non-negative");
  }
  const double per_detector =
      singles_total / order + dark_rate_hz * det.measurement_time_s;
  const std::vector<double> counts(static_cast<std::size_t>(order),
                                   per_detector);
  return SpuriousCount{spurious_coincidences_product(counts, det),
                       det.measurement_time_s};
}

double coincidence_shift_forward(double pairs, double phase_total, int order,
                                 double dphi) {
  const double theta = order * phase_total;
  return 0.5 * pairs *
         residual(std::cos(theta), std::sin(theta), order * dphi, 0.0);
}

PhaseShiftSolution phase_shift_spurious(double pairs, double phase_total,
                                        int order, const SpuriousCount& count) {
  require_order(order, "phase_shift_spurious");
  require_pairs(pairs, "phase_shift_spurious");

  const double two_pi = 2.0 * kPi;
  const double theta = order * phase_total;
  const long n0 = std::lround(theta / two_pi);
  const double theta_r = theta - two_pi * static_cast<double>(n0);

  if (count.delta_pcc == 0.0) {
    return {0.0, +1, n0, true};
  }

  const double a = 2.0 * count.delta_pcc / pairs;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double x = a + cos_t;
  if (x > 1.0) {
    return {kNaN, +1, n0, false};
  }
  const double ac = std::acos(std::max(-1.0, x));

  // delta = N * dphi = -/+ acos(x) + 2*pi*n - theta.
  double best = kNaN;
  int best_sign = +1;
  long best_n = n0;
  for (int sign : {+1, -1}) {
    for (long k = -2; k <= 2; ++k) {
      const double delta = -sign * ac + (two_pi * static_cast<double>(k) - theta_r);
      if (std::isnan(best) || std::abs(delta) < std::abs(best)) {
        best = delta;
        best_sign = sign;
        best_n = n0 + k;
      }
    }
  }

  double delta = best;
  double f = residual(cos_t, sin_t, delta, a);
  for (int it = 0; it < 6 && f != 0.0; ++it) {
    const double slope = -std::sin(theta + delta);
    if (slope == 0.0) break;
    const double trial = delta - f / slope;
    const double f_trial = residual(cos_t, sin_t, trial, a);
    if (!(std::abs(f_trial) < std::abs(f))) break;
    delta = trial;
    f = f_trial;
  }

  return {delta / order, best_sign, best_n, true};
}

double phase_shift_cusp(double pairs, int order, const SpuriousCount& count) {
  require_order(order, "phase_shift_cusp");
  require_pairs(pairs, "phase_shift_cusp");
  return (2.0 / order) * std::sqrt(count.delta_pcc / pairs);
}

double undefined_half_width(double pairs, int order,
                            const SpuriousCount& count) {
  require_order(order, "undefined_half_width");
  require_pairs(pairs, "undefined_half_width");
  const double a = 2.0 * count.delta_pcc / pairs;
  if (a >= 2.0) return kPi / order;
  // acos(1 - a) = 2 asin(sqrt(a/2)), which avoids cancellation for small a.
  return 2.0 * std::asin(std::sqrt(0.5 * a)) / order;
}

double threshold_value(ThresholdKind kind, double shot_noise_rad) {
  return kind == ThresholdKind::shot_noise ? shot_noise_rad
                                           : 0.1 * shot_noise_rad;
}

namespace {

std::optional<double> mean_abs_offset(const std::vector<ShotNoiseCrossing>& v,
                                      bool at_maximum) {
  double sum = 0.0;
  int n = 0;
  for (const auto& c : v) {
    if (c.at_maximum == at_maximum) {
      sum += std::abs(c.offset_rad);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

struct ScanSample {
  double phase;
  bool defined;
  double magnitude;
};

}  // namespace

std::optional<double> BiasZoneReport::max_cusp_crossing_offset() const {
  return mean_abs_offset(crossings, true);
}

std::optional<double> BiasZoneReport::min_cusp_crossing_offset() const {
  return mean_abs_offset(crossings, false);
}

BiasZoneReport bias_zone_scan(double pairs, int order,
                              const SpuriousCount& count,
                              double shot_noise_rad,
                              const ZoneScanOptions& options) {
  require_order(order, "bias_zone_scan");
  require_pairs(pairs, "bias_zone_scan");
  const double lo = options.range_lo;
  const double hi = options.range_hi;
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw std::invalid_argument("bias_zone_scan: range must satisfy lo < hi");
  }
  if (options.points_per_pi < 1000) {
    throw std::invalid_argument(
        "bias_zone_scan: resolution must be >= 1000 points per pi");
  }
  if (!(shot_noise_rad > 0) || !std::isfinite(shot_noise_rad)) {
    throw std::invalid_argument("bias_zone_scan: shot noise must be positive");
  }

  BiasZoneReport report;
  report.threshold_rad = threshold_value(options.threshold, shot_noise_rad);
  report.undefined_half_width_rad = undefined_half_width(pairs, order, count);
  report.cusp_peak_rad = phase_shift_cusp(pairs, order, count);
  const double thr = report.threshold_rad;
  const double step_pi = kPi / order;

  for (long n = static_cast<long>(std::ceil(lo / step_pi));
       static_cast<double>(n) * step_pi <= hi; ++n) {
    report.cusp_locations.push_back(static_cast<double>(n) * step_pi);
  }
  for (long n = static_cast<long>(std::ceil((lo - 0.5 * step_pi) / step_pi));
       0.5 * step_pi + static_cast<double>(n) * step_pi <= hi; ++n) {
    const double p = 0.5 * step_pi + static_cast<double>(n) * step_pi;
    if (p >= lo) report.optimal_bias_points.push_back(p);
  }

  const double h = report.undefined_half_width_rad;
  if (h > 0) {
    const double period = 2.0 * step_pi;
    std::vector<PhaseInterval> undefined;
    for (long k = static_cast<long>(std::floor((lo - h) / period));
         static_cast<double>(k) * period - h <= hi; ++k) {
      const double c = static_cast<double>(k) * period;
      const double a = std::max(lo, c - h);
      const double b = std::min(hi, c + h);
      if (b > a) undefined.push_back({a, b});
    }
    report.undefined_intervals = merge_intervals(std::move(undefined));
  }

  // Uniform grid plus the cusps themselves, so peaks narrower than one cell
  // are still seen.
  const auto cells = static_cast<std::size_t>(
      std::ceil((hi - lo) / kPi * options.points_per_pi));
  std::vector<double> grid;
  grid.reserve(cells + 1 + report.cusp_locations.size());
  for (std::size_t i = 0; i <= cells; ++i) {
    grid.push_back(i == cells ? hi
                              : lo + (hi - lo) * static_cast<double>(i) /
                                         static_cast<double>(cells));
  }
  grid.insert(grid.end(), report.cusp_locations.begin(),
              report.cusp_locations.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto evaluate = [&](double phase) {
    const auto sol = phase_shift_spurious(pairs, phase, order, count);
    return ScanSample{phase, sol.defined,
                      sol.defined ? std::abs(sol.value_rad) : kNaN};
  };
  auto unsafe = [&](const ScanSample& s) {
    return !s.defined || s.magnitude >= thr;
  };

  std::vector<ScanSample> samples(grid.size());
  parallel_for(grid.size(), options.workers,
               [&](std::size_t i) { samples[i] = evaluate(grid[i]); });

  // Bisect the safe/unsafe edge inside [a, b]; returns the edge and records a
  // threshold crossing when both sides of the edge are defined.
  auto refine_edge = [&](ScanSample a, ScanSample b) {
    const bool a_unsafe = unsafe(a);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a.phase + b.phase);
      if (mid <= a.phase || mid >= b.phase) break;
      const ScanSample m = evaluate(mid);
      if (unsafe(m) == a_unsafe) {
        a = m;
      } else {
        b = m;
      }
    }
    if (a.defined && b.defined) {
      const ScanSample& best =
          std::abs(a.magnitude - thr) <= std::abs(b.magnitude - thr) ? a : b;
      const long n = std::lround(best.phase / step_pi);
      const double cusp = static_cast<double>(n) * step_pi;
      report.crossings.push_back({best.phase, cusp, best.phase - cusp,
                                  n % 2 == 0, std::abs(best.magnitude - thr)});
      return best.phase;
    }
    return a_unsafe ? a.phase : b.phase;
  };

  bool in_unsafe = unsafe(samples.front());
  double open_start = lo;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const bool u1 = unsafe(samples[i + 1]);
    if (u1 == in_unsafe) continue;
    const double edge = refine_edge(samples[i], samples[i + 1]);
    if (u1) {
      open_start = edge;
    } else {
      report.above_shot_noise_intervals.push_back({open_start, edge});
    }
    in_unsafe = u1;
  }
  if (in_unsafe) report.above_shot_noise_intervals.push_back({open_start, hi});

  double cursor = lo;
  for (const auto& iv : report.above_shot_noise_intervals) {
    if (iv.lo > cursor) report.safe_windows.push_back({cursor, iv.lo});
    cursor = iv.hi;
  }
  if (cursor < hi) report.safe_windows.push_back({cursor, hi});

  return report;
}

double max_singles_flux(double pairs_rate_hz, int order,
                        const DetectionSpec& det, double safety_margin,
                        double dark_rate_hz) {
  if (order < 2) {
    throw std::invalid_argument("max_singles_flux: order must be >= 2");
  }
  if (!(pairs_rate_hz >= 0) || !(safety_margin > 0) || !(dark_rate_hz >= 0)) {
    throw std::invalid_argument(
        "max_singles_flux: rates must be non-negative and margin positive");
  }
  const double t = det.measurement_time_s;
  const double pairs = pairs_rate_hz * t;
  if (pairs == 0.0) return 0.0;

  // At the optimal bias sin(N phi) = 1 and the exact relation is
  // a = sin(N |dphi_P|), with a = 2 dP / M_N00N.
  const double shot = 1.0 / (order * std::sqrt(pairs));
  const double delta = std::min(order * safety_margin * shot, 0.5 * kPi);
  const double dp = 0.5 * pairs * std::sin(delta);

  // dP = m^N (tau/t)^(N-1)  =>  m = (dP (t/tau)^(N-1))^(1/N)
  const double log_m =
      (std::log(dp) + (order - 1) * std::log(t / det.jitter_s)) / order;
  const double per_detector_rate = std::exp(log_m) / t - dark_rate_hz;
  return order * std::max(0.0, per_detector_rate);
}

}  // namespace qfog
