#include "qfog/cli/commands.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "qfog/parallel.hpp"
#include "qfog/sagnac.hpp"

namespace qfog::cli {

std::string format_sci(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::scientific, 8);
  return std::string(buf.data(), res.ptr);
}

namespace {

struct Photons {
  double pairs;
  double singles_rate_hz;
  double singles;
};

double detector_ratio(const InstrumentConfig& cfg, double* transmission,
                      PhotonPopulations* at_detectors) {
  const double t = fiber_transmission(cfg.path, cfg.geometry.fiber_length_m);
  const double r0 = cfg.source.initial_noon_fraction;
  const auto pop = propagate_populations(PhotonPopulations{r0, 1.0 - r0}, t);
  if (transmission) *transmission = t;
  if (at_detectors) *at_detectors = pop;
  return noon_ratio(pop);
}

Photons photon_counts(const InstrumentConfig& cfg, double measurement_time_s) {
  const double ratio = detector_ratio(cfg, nullptr, nullptr);
  const double singles_rate = singles_rate_from_ratio(cfg.source.pair_rate_hz, ratio);
  return {cfg.source.pair_rate_hz * measurement_time_s, singles_rate,
          singles_rate * measurement_time_s};
}

double require_pairs(double pairs) {
  if (!(pairs > 0)) {
    throw std::domain_error("no N00N pairs detected: pair_rate_hz must be > 0");
  }
  return pairs;
}

void line(std::ostream& out, const char* key, double value, const char* unit = "") {
  out << key << " = " << format_sci(value);
  if (*unit) out << ' ' << unit;
  out << '\n';
}

void line(std::ostream& out, const char* key, const std::string& text) {
  out << key << " = " << text << '\n';
}

void print_intervals(std::ostream& out, const char* title,
                     const std::vector<PhaseInterval>& v) {
  out << title << " (" << v.size() << ")\n";
  for (const auto& iv : v) {
    out << "  [" << format_sci(iv.lo) << ", " << format_sci(iv.hi)
        << "]  width " << format_sci(iv.width()) << '\n';
  }
}

}  // namespace

BudgetReport compute_budget(const InstrumentConfig& cfg) {
  const int order = cfg.source.noon_order;
  const DetectionSpec& det = cfg.detection;
  const double t_meas = det.measurement_time_s;

  double transmission = 0.0;
  PhotonPopulations at_detectors{0.0, 0.0};
  const double ratio = detector_ratio(cfg, &transmission, &at_detectors);
  const Photons ph = photon_counts(cfg, t_meas);
  const double pairs = require_pairs(ph.pairs);

  const auto spurious =
      spurious_coincidences(ph.singles, order, det, cfg.source.dark_rate_hz);
  const auto dark_free = spurious_coincidences(ph.singles, order, det, 0.0);

  const double shot = shot_noise(order, NoonPairs{pairs});
  const double phi_sl = sagnac_phase(RotationRate{cfg.rotation_rad_per_s}, cfg.geometry);
  const double total = phi_sl + cfg.bias_phase_rad;
  const auto at_bias = phase_shift_spurious(pairs, total, order, spurious);

  const auto coherence =
      coherence_budget(cfg.dispersion, cfg.spectrum, cfg.geometry.fiber_length_m,
                       cfg.base_coherence, cfg.reciprocal_delay_s);

  return BudgetReport{
      .transmission = transmission,
      .populations_at_detectors = at_detectors,
      .noon_ratio = ratio,
      .noon_rate_hz = cfg.source.pair_rate_hz,
      .singles_rate_hz = ph.singles_rate_hz,
      .noon_pairs = pairs,
      .singles_count = ph.singles,
      .spurious = spurious,
      .spurious_dark_free = dark_free,
      .dark_contribution = spurious.delta_pcc - dark_free.delta_pcc,
      .shot_noise_rad = shot,
      .sagnac_phase_rad = phi_sl,
      .phase_total_rad = total,
      .phase_shift_at_bias = at_bias,
      .sub_shot_noise_at_bias = at_bias.defined && std::abs(at_bias.value_rad) < shot,
      .dphi_p0_rad = phase_shift_cusp(pairs, order, spurious),
      .dphi_p0_coherent_rad = phase_shift_cusp(coherence.total * pairs, order, spurious),
      .undefined_half_width_rad = undefined_half_width(pairs, order, spurious),
      .omega_min_rad_per_s = omega_min(cfg.geometry, order, NoonPairs{pairs}).omega_rad_per_s,
      .coherence = coherence,
      .pump_drift = pump_drift_phase_error(cfg.pump.drift_nm_per_degC,
                                           cfg.pump.stability_degC, cfg.spectrum,
                                           phi_sl),
      .max_singles_rate_hz = max_singles_flux(cfg.source.pair_rate_hz, order, det,
                                              1.0, cfg.source.dark_rate_hz),
  };
}

void print_budget(const BudgetReport& r, std::ostream& out) {
  out << "# noise budget\n";
  line(out, "transmission", r.transmission);
  line(out, "noon_pairs_at_detectors", r.populations_at_detectors.noon_pairs,
       "per initial state");
  line(out, "singles_at_detectors", r.populations_at_detectors.singles,
       "per initial state");
  line(out, "noon_ratio", r.noon_ratio);
  line(out, "noon_rate", r.noon_rate_hz, "Hz");
  line(out, "singles_rate", r.singles_rate_hz, "Hz");
  line(out, "noon_pairs", r.noon_pairs, "per t_meas");
  line(out, "singles_count", r.singles_count, "per t_meas");
  line(out, "spurious_rate", r.spurious.rate_hz, "Hz");
  line(out, "spurious_count", r.spurious.delta_pcc, "per t_meas");
  line(out, "spurious_count_dark_free", r.spurious_dark_free.delta_pcc, "per t_meas");
  line(out, "dark_count_contribution", r.dark_contribution, "per t_meas");
  line(out, "shot_noise", r.shot_noise_rad, "rad");
  line(out, "sagnac_phase", r.sagnac_phase_rad, "rad");
  line(out, "phase_total", r.phase_total_rad, "rad");
  if (r.phase_shift_at_bias.defined) {
    line(out, "dphi_p_at_bias", r.phase_shift_at_bias.value_rad, "rad");
  } else {
    line(out, "dphi_p_at_bias", std::string("undefined (coincidence maximum)"));
  }
  line(out, "sub_shot_noise_at_bias", std::string(r.sub_shot_noise_at_bias ? "yes" : "no"));
  line(out, "dphi_p0", r.dphi_p0_rad, "rad");
  line(out, "dphi_p0_coherent", r.dphi_p0_coherent_rad, "rad");
  line(out, "undefined_half_width", r.undefined_half_width_rad, "rad");
  line(out, "omega_min", r.omega_min_rad_per_s, "rad/s");
  line(out, "coherence_time", r.coherence.coherence_time_s, "s");
  line(out, "coherence_reciprocal", r.coherence.reciprocal_factor);
  line(out, "chromatic_delay", r.coherence.chromatic_delay_s, "s");
  line(out, "coherence_chromatic", r.coherence.chromatic_factor);
  line(out, "pmd_delay", r.coherence.pmd_delay_s, "s");
  line(out, "coherence_pmd", r.coherence.pmd_factor);
  line(out, "coherence_base", r.coherence.base_coherence);
  line(out, "coherence_total", r.coherence.total);
  line(out, "pump_drift_relative", r.pump_drift.relative);
  line(out, "pump_drift_absolute", r.pump_drift.absolute_rad, "rad");
  line(out, "max_singles_rate", r.max_singles_rate_hz, "Hz");
}

std::vector<SweepRow> compute_sweep(const InstrumentConfig& cfg, double from_rad,
                                    double to_rad, int points, unsigned workers) {
  if (points < 2) throw UsageError("sweep: --points must be >= 2");
  if (!(std::isfinite(from_rad) && std::isfinite(to_rad) && from_rad < to_rad)) {
    throw UsageError("sweep: require --from < --to");
  }
  const int order = cfg.source.noon_order;
  const Photons ph = photon_counts(cfg, cfg.detection.measurement_time_s);
  const double pairs = require_pairs(ph.pairs);
  const auto count =
      spurious_coincidences(ph.singles, order, cfg.detection, cfg.source.dark_rate_hz);
  const double shot = shot_noise(order, NoonPairs{pairs});
  const double peak = phase_shift_cusp(pairs, order, count);

  std::vector<SweepRow> rows(static_cast<std::size_t>(points));
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    const double phase =
        i + 1 == rows.size()
            ? to_rad
            : from_rad + (to_rad - from_rad) * static_cast<double>(i) / (points - 1);
    const auto sol = phase_shift_spurious(pairs, phase, order, count);
    rows[i] = SweepRow{phase,
                       sol.defined ? std::optional(std::abs(sol.value_rad))
                                   : std::nullopt,
                       shot, 0.1 * shot, peak};
  });
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "phase_total_rad,abs_dphi_p_rad,defined_flag,shot_noise_rad,"
         "shot_noise_tenth_rad,dphi_p0_rad\n";
  for (const auto& r : rows) {
    out << format_sci(r.phase_total_rad) << ','
        << (r.defined() ? format_sci(*r.abs_dphi_p_rad) : std::string()) << ','
        << (r.defined() ? '1' : '0') << ',' << format_sci(r.shot_noise_rad) << ','
        << format_sci(r.shot_noise_tenth_rad) << ',' << format_sci(r.dphi_p0_rad)
        << '\n';
  }
}

BiasZoneReport compute_zones(const InstrumentConfig& cfg, ThresholdKind threshold,
                             unsigned workers, double range_lo, double range_hi) {
  const int order = cfg.source.noon_order;
  const Photons ph = photon_counts(cfg, cfg.detection.measurement_time_s);
  const double pairs = require_pairs(ph.pairs);
  const auto count =
      spurious_coincidences(ph.singles, order, cfg.detection, cfg.source.dark_rate_hz);
  ZoneScanOptions opts;
  opts.range_lo = range_lo;
  opts.range_hi = range_hi;
  opts.threshold = threshold;
  opts.workers = workers;
  return bias_zone_scan(pairs, order, count, shot_noise(order, NoonPairs{pairs}), opts);
}

void print_zones(const BiasZoneReport& r, std::ostream& out) {
  out << "# bias zones\n";
  line(out, "threshold", r.threshold_rad, "rad");
  line(out, "cusp_peak_dphi_p0", r.cusp_peak_rad, "rad");
  line(out, "undefined_half_width", r.undefined_half_width_rad, "rad");
  line(out, "undefined_half_width_reference", kReferenceUndefinedHalfWidth_rad,
       "rad (quoted figure, not asserted)");
  const auto max_off = r.max_cusp_crossing_offset();
  const auto min_off = r.min_cusp_crossing_offset();
  if (max_off) line(out, "crossing_offset_at_maxima", *max_off, "rad");
  if (min_off) line(out, "crossing_offset_at_minima", *min_off, "rad");
  line(out, "crossing_offset_reference", kReferenceCrossingOffset_rad,
       "rad (quoted figure, not asserted)");

  out << "cusps (" << r.cusp_locations.size() << ")\n";
  for (double c : r.cusp_locations) out << "  " << format_sci(c) << '\n';
  print_intervals(out, "undefined_intervals", r.undefined_intervals);
  print_intervals(out, "above_threshold_intervals", r.above_shot_noise_intervals);
  print_intervals(out, "safe_windows", r.safe_windows);
  out << "crossings (" << r.crossings.size() << ")\n";
  for (const auto& c : r.crossings) {
    out << "  phase " << format_sci(c.phase_rad) << "  cusp " << format_sci(c.cusp_rad)
        << (c.at_maximum ? " (max)" : " (min)") << "  offset "
        << format_sci(c.offset_rad) << "  residual " << format_sci(c.residual_rad)
        << '\n';
  }
  out << "optimal_bias_points (" << r.optimal_bias_points.size() << ")\n";
  for (double p : r.optimal_bias_points) {
    bool safe = false;
    for (const auto& w : r.safe_windows) safe = safe || w.contains(p);
    out << "  " << format_sci(p) << (safe ? "  safe" : "  NOT safe") << '\n';
  }
}

McReport run_mc(const InstrumentConfig& cfg, int trials, std::uint64_t seed,
                double scale, unsigned workers) {
  if (trials < 1) throw UsageError("mc: --trials must be >= 1");
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw UsageError("mc: --scale must be positive");
  }
  const int order = cfg.source.noon_order;
  const double t_scaled = cfg.detection.measurement_time_s * scale;
  const DetectionSpec det{cfg.detection.jitter_s, t_scaled, cfg.detection.window_mode};
  const Photons ph = photon_counts(cfg, t_scaled);
  const double pairs = require_pairs(ph.pairs);

  const double per_detector = ph.singles_rate_hz / order + cfg.source.dark_rate_hz;
  const std::vector<double> rates(static_cast<std::size_t>(order), per_detector);
  const McConfig mc{seed, trials, det.window_mode, workers};

  const auto count =
      spurious_coincidences(ph.singles, order, det, cfg.source.dark_rate_hz);
  const double phi_sl = sagnac_phase(RotationRate{cfg.rotation_rad_per_s}, cfg.geometry);
  const auto coherence =
      coherence_budget(cfg.dispersion, cfg.spectrum, cfg.geometry.fiber_length_m,
                       cfg.base_coherence, cfg.reciprocal_delay_s);

  return McReport{
      t_scaled,
      simulate_uncorrelated(rates, det, mc),
      simulate_experiment(pairs, PhasePoint{phi_sl, cfg.bias_phase_rad}, order,
                          coherence.total, count, mc),
  };
}

void print_mc(const McReport& r, std::ostream& out) {
  const auto& c = r.coincidences;
  out << "# monte carlo: accidental coincidences\n";
  line(out, "measurement_time", r.scaled_measurement_time_s, "s");
  line(out, "trials", static_cast<double>(c.per_trial.size()));
  line(out, "mean", c.mean_coincidences);
  line(out, "sigma", std::sqrt(c.variance));
  line(out, "standard_error", c.standard_error);
  line(out, "analytic_prediction", c.analytic_prediction);
  line(out, "z_score", c.z_score);

  const auto& e = r.experiment;
  out << "# monte carlo: phase estimation\n";
  line(out, "inversion_failures", static_cast<double>(e.inversion_failures));
  line(out, "failure_fraction", e.failure_fraction);
  line(out, "mean_bias", e.mean_bias_rad, "rad");
  line(out, "bias_standard_error", e.bias_standard_error, "rad");
  if (e.predicted_bias_defined) {
    line(out, "predicted_bias", e.predicted_bias_rad, "rad");
    line(out, "bias_z_score", e.bias_z_score);
  } else {
    line(out, "predicted_bias", std::string("undefined (coincidence maximum)"));
  }
  line(out, "spread", e.spread_rad, "rad");
  line(out, "predicted_spread", e.predicted_spread_rad, "rad");
}

OmegaMinReport compute_omega_min(const InstrumentConfig& cfg) {
  const int order = cfg.source.noon_order;
  const double pairs = require_pairs(cfg.source.pair_rate_hz *
                                     cfg.detection.measurement_time_s);
  const TotalPhotons m = total_photons(NoonPairs{pairs}, order);
  const double omega = omega_min(cfg.geometry, order, m).omega_rad_per_s;
  return {m.value, shot_noise(order, m), omega, omega < kEarthRate_rad_per_s};
}

void print_omega_min(const OmegaMinReport& r, std::ostream& out) {
  out << "# minimum detectable rotation\n";
  line(out, "total_photons", r.total_photons);
  line(out, "shot_noise", r.shot_noise_rad, "rad");
  line(out, "omega_min", r.omega_min_rad_per_s, "rad/s");
  line(out, "earth_rate", kEarthRate_rad_per_s, "rad/s");
  line(out, "below_earth_rate", std::string(r.below_earth_rate ? "yes" : "no"));
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Noise budget and Monte Carlo validator for N00N-state fiber gyroscopes",
               "qfog"};
  app.require_subcommand(1);

  unsigned workers = 1;
  app.add_option("--workers", workers,
                 "Worker threads for sweeps and Monte Carlo (0 = all cores)");

  std::string config;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Instrument config (JSON)")->required();
  };

  auto* budget = app.add_subcommand("budget", "Full noise budget report");
  add_config(budget);

  double from = 0.0, to = kPi;
  int points = 1001;
  std::string out_csv;
  auto* sweep = app.add_subcommand("sweep", "Tabulate |dphi_P| over total phase as CSV");
  add_config(sweep);
  sweep->add_option("--from", from, "Start of total phase range (rad)");
  sweep->add_option("--to", to, "End of total phase range (rad)");
  sweep->add_option("--points", points, "Number of rows");
  sweep->add_option("--out", out_csv, "Output CSV path")->required();

  std::string threshold = "shot";
  auto* zones = app.add_subcommand("zones", "Safe and excluded phase-bias zones");
  add_config(zones);
  zones->add_option("--threshold", threshold, "shot | tenth")
      ->check(CLI::IsMember({"shot", "tenth"}));

  int trials = 200;
  std::uint64_t seed = 1;
  double scale = 1.0;
  auto* mc = app.add_subcommand("mc", "Monte Carlo check of spurious coincidences");
  add_config(mc);
  mc->add_option("--trials", trials, "Number of trials");
  mc->add_option("--seed", seed, "Base seed");
  mc->add_option("--scale", scale, "Factor applied to t_meas");

  auto* omega = app.add_subcommand("omega-min", "Minimum detectable rotation rate");
  add_config(omega);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const InstrumentConfig cfg = load_config(config);
    if (budget->parsed()) {
      print_budget(compute_budget(cfg), out);
    } else if (sweep->parsed()) {
      const auto rows = compute_sweep(cfg, from, to, points, workers);
      std::ofstream file(out_csv, std::ios::binary | std::ios::trunc);
      if (!file) throw OutputError("cannot open output file: " + out_csv);
      write_sweep_csv(rows, file);
      file.flush();
      if (!file) throw OutputError("failed writing output file: " + out_csv);
      const auto undefined = std::count_if(rows.begin(), rows.end(),
                                           [](const SweepRow& r) { return !r.defined(); });
      out << "wrote " << rows.size() << " rows (" << undefined
          << " undefined) to " << out_csv << '\n';
    } else if (zones->parsed()) {
      const auto kind = threshold == "tenth" ? ThresholdKind::tenth_shot_noise
                                             : ThresholdKind::shot_noise;
      print_zones(compute_zones(cfg, kind, workers), out);
    } else if (mc->parsed()) {
      print_mc(run_mc(cfg, trials, seed, scale, workers), out);
    } else if (omega->parsed()) {
      print_omega_min(compute_omega_min(cfg), out);
    }
  } catch (const ConfigParseError& e) {
    err << "config parse error: " << e.what() << '\n';
    return kExitConfigParse;
  } catch (const ConfigValidationError& e) {
    err << "config validation error: " << e.what() << '\n';
    return kExitConfigValidate;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const OutputError& e) {
    err << "output error: " << e.what() << '\n';
    return kExitOutput;
  } catch (const std::exception& e) {
    err << "computation error: " << e.what() << '\n';
    return kExitComputation;
  }
  return kExitOk;
}

}  // namespace qfog::cli
