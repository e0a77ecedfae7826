#include "qfog/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "qfog/parallel.hpp"
#include "qfog/sagnac.hpp"

namespace qfog {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Arrival time in units of tau: integer bin plus offset in [0, 1).
struct Arrival {
  std::uint64_t bin;
  double offset;

  auto operator<=>(const Arrival&) const = default;
};

// Poisson arrivals on one detector, generated in time order from exponential
// gaps measured in bins. Each detector owns its engine, so the streams do not
// depend on the order in which the counters consume them.
class ArrivalSource {
 public:
  ArrivalSource(std::uint64_t seed, double rate_per_bin, double windows)
      : rng_(seed_engine(seed)),
        gap_(rate_per_bin > 0 ? rate_per_bin : 1.0),
        full_bins_(static_cast<std::uint64_t>(std::floor(windows))),
        partial_(windows - std::floor(windows)),
        done_(!(rate_per_bin > 0)) {
    if (!done_) advance();
  }

  bool done() const { return done_; }
  const Arrival& current() const { return now_; }

  void advance() {
    now_.offset += gap_(rng_);
    if (now_.offset >= 1.0) {
      const double whole = std::floor(now_.offset);
      if (whole > static_cast<double>(full_bins_) + 1.0) {
        done_ = true;
        return;
      }
      now_.bin += static_cast<std::uint64_t>(whole);
      now_.offset -= whole;
    }
    if (now_.bin > full_bins_ || (now_.bin == full_bins_ && now_.offset >= partial_)) {
      done_ = true;
    }
  }

 private:
  static RngStream seed_engine(std::uint64_t seed) {
    std::array<std::uint32_t, 8> words{};
    for (std::size_t i = 0; i < words.size(); i += 2) {
      const std::uint64_t w = splitmix64(seed);
      words[i] = static_cast<std::uint32_t>(w);
      words[i + 1] = static_cast<std::uint32_t>(w >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return RngStream(seq);
  }

  RngStream rng_;
  std::exponential_distribution<double> gap_;
  std::uint64_t full_bins_;
  double partial_;
  bool done_;
  Arrival now_{0, 0.0};
};

std::uint64_t count_binned(std::vector<ArrivalSource>& sources) {
  std::uint64_t hits = 0;
  auto any_done = [&] {
    return std::any_of(sources.begin(), sources.end(),
                       [](const auto& s) { return s.done(); });
  };
  while (!any_done()) {
    std::uint64_t top = 0;
    for (const auto& s : sources) top = std::max(top, s.current().bin);
    const bool all = std::all_of(sources.begin(), sources.end(), [&](const auto& s) {
      return s.current().bin == top;
    });
    if (all) ++hits;
    for (auto& s : sources) {
      while (!s.done() && (s.current().bin < top || (all && s.current().bin == top))) {
        s.advance();
      }
    }
  }
  return hits;
}

// Counts tuples with one arrival per detector and max - min <= tau. Arrivals
// are merged in time order (equal times by detector index) and each tuple is
// counted once, at its latest member, against the recent history of the
// other detectors.
std::uint64_t count_sliding(std::vector<ArrivalSource>& sources) {
  const std::size_t n = sources.size();
  std::vector<std::deque<Arrival>> recent(n);
  std::uint64_t total = 0;
  while (true) {
    std::size_t next = n;
    for (std::size_t d = 0; d < n; ++d) {
      if (sources[d].done()) continue;
      if (next == n || sources[d].current() < sources[next].current()) next = d;
    }
    if (next == n) break;
    const Arrival e = sources[next].current();
    sources[next].advance();

    std::uint64_t product = 1;
    for (std::size_t j = 0; j < n; ++j) {
      auto& q = recent[j];
      if (e.bin > 0) {
        const Arrival oldest{e.bin - 1, e.offset};
        while (!q.empty() && q.front() < oldest) q.pop_front();
      }
      if (j != next) product *= q.size();
    }
    total += product;
    recent[next].push_back(e);
  }
  return total;
}

}  // namespace

McConfig::McConfig(std::uint64_t seed, int trials, WindowMode window_mode,
                   unsigned workers)
    : seed(seed), trials(trials), window_mode(window_mode), workers(workers) {
  detail::require(trials >= 1, "McConfig", "trials", "must be >= 1");
}

RngStream rng_stream(std::uint64_t seed, std::uint64_t trial_index) {
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ull * (trial_index + 1));
  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size(); i += 2) {
    const std::uint64_t w = splitmix64(state);
    words[i] = static_cast<std::uint32_t>(w);
    words[i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return RngStream(seq);
}

McResult simulate_uncorrelated(std::span<const double> rates_per_detector_hz,
                               const DetectionSpec& det, const McConfig& mc) {
  if (rates_per_detector_hz.size() < 2) {
    throw std::invalid_argument("simulate_uncorrelated: need >= 2 detectors");
  }
  for (double r : rates_per_detector_hz) {
    if (!(r >= 0) || !std::isfinite(r)) {
      throw std::invalid_argument(
          "simulate_uncorrelated: rates must be non-negative and finite");
    }
  }
  const double t = det.measurement_time_s;
  const double windows = t / det.jitter_s;
  if (windows > kMaxCoincidenceWindows) {
    throw std::invalid_argument(
        "simulate_uncorrelated: t_meas / tau exceeds the window limit");
  }

  McResult result;
  result.per_trial.assign(static_cast<std::size_t>(mc.trials), 0);
  parallel_for(result.per_trial.size(), mc.workers, [&](std::size_t i) {
    RngStream rng = rng_stream(mc.seed, i);
    std::vector<ArrivalSource> sources;
    sources.reserve(rates_per_detector_hz.size());
    for (double r : rates_per_detector_hz) {
      sources.emplace_back(rng(), r * det.jitter_s, windows);
    }
    result.per_trial[i] = mc.window_mode == WindowMode::binned
                              ? count_binned(sources)
                              : count_sliding(sources);
  });

  double sum = 0.0;
  for (auto c : result.per_trial) sum += static_cast<double>(c);
  const double n = static_cast<double>(mc.trials);
  result.mean_coincidences = sum / n;
  double ss = 0.0;
  for (auto c : result.per_trial) {
    const double d = static_cast<double>(c) - result.mean_coincidences;
    ss += d * d;
  }
  result.variance = mc.trials > 1 ? ss / (n - 1.0) : 0.0;

  std::vector<double> counts;
  for (double r : rates_per_detector_hz) counts.push_back(r * t);
  result.analytic_prediction = spurious_coincidences_product(counts, det);

  // Fall back to Poisson scatter about the prediction when the sample has no
  // spread (few trials, or counts identically zero).
  const double var = result.variance > 0 ? result.variance
                                         : result.analytic_prediction;
  result.standard_error = std::sqrt(var / n);
  const double diff = result.mean_coincidences - result.analytic_prediction;
  if (result.standard_error > 0) {
    result.z_score = diff / result.standard_error;
  } else {
    result.z_score = diff == 0.0 ? 0.0 : std::copysign(
                                             std::numeric_limits<double>::infinity(),
                                             diff);
  }
  return result;
}

ExperimentResult simulate_experiment(double pairs, const PhasePoint& phase,
                                     int order, double coherence,
                                     const SpuriousCount& count,
                                     const McConfig& mc) {
  if (!(pairs >= 1) || !std::isfinite(pairs)) {
    throw std::invalid_argument("simulate_experiment: need at least one pair");
  }
  if (order < 1) {
    throw std::invalid_argument("simulate_experiment: order must be >= 1");
  }
  if (!(coherence > 0 && coherence <= 1)) {
    throw std::invalid_argument(
        "simulate_experiment: coherence must lie in (0, 1]");
  }

  const auto n_pairs = static_cast<std::int64_t>(std::llround(pairs));
  const double m = static_cast<double>(n_pairs);
  const double phi = phase.total();
  const double theta = order * phi;
  const double p = std::clamp(0.5 * (1.0 + coherence * std::cos(theta)), 0.0, 1.0);
  const double two_pi = 2.0 * kPi;

  ExperimentResult out;
  out.trials = mc.trials;
  out.estimates.assign(static_cast<std::size_t>(mc.trials),
                       std::numeric_limits<double>::quiet_NaN());

  parallel_for(out.estimates.size(), mc.workers, [&](std::size_t i) {
    RngStream rng = rng_stream(mc.seed, i);
    std::binomial_distribution<std::int64_t> fringe(n_pairs, p);
    double k = static_cast<double>(fringe(rng));
    if (count.delta_pcc > 0) {
      std::poisson_distribution<std::int64_t> accidental(count.delta_pcc);
      k += static_cast<double>(accidental(rng));
    }
    const double x = (2.0 * k / m - 1.0) / coherence;
    if (!(x >= -1.0 && x <= 1.0)) return;
    const double ac = std::acos(x);
    // theta_hat = +/- ac + 2 pi n; take the branch nearest the operating point.
    double best = std::numeric_limits<double>::quiet_NaN();
    for (double s : {1.0, -1.0}) {
      const double base = s * ac;
      const double n = std::round((theta - base) / two_pi);
      const double cand = base + two_pi * n;
      if (std::isnan(best) || std::abs(cand - theta) < std::abs(best - theta)) {
        best = cand;
      }
    }
    out.estimates[i] = best / order;
  });

  double sum = 0.0;
  int ok = 0;
  for (double e : out.estimates) {
    if (std::isnan(e)) continue;
    sum += e - phi;
    ++ok;
  }
  out.inversion_failures = mc.trials - ok;
  out.failure_fraction = static_cast<double>(out.inversion_failures) / mc.trials;
  if (ok > 0) {
    out.mean_bias_rad = sum / ok;
    double ss = 0.0;
    for (double e : out.estimates) {
      if (std::isnan(e)) continue;
      const double d = (e - phi) - out.mean_bias_rad;
      ss += d * d;
    }
    out.spread_rad = ok > 1 ? std::sqrt(ss / (ok - 1)) : 0.0;
    out.bias_standard_error = out.spread_rad / std::sqrt(static_cast<double>(ok));
  } else {
    out.mean_bias_rad = std::numeric_limits<double>::quiet_NaN();
  }

  const auto predicted =
      phase_shift_spurious(coherence * pairs, phi, order, count);
  out.predicted_bias_defined = predicted.defined;
  out.predicted_bias_rad = predicted.value_rad;
  out.predicted_spread_rad = shot_noise(order, NoonPairs{pairs}) / coherence;
  if (out.bias_standard_error > 0 && predicted.defined) {
    out.bias_z_score =
        (out.mean_bias_rad - out.predicted_bias_rad) / out.bias_standard_error;
  }
  return out;
}

}  // namespace qfog
