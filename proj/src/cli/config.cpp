#include "qfog/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace qfog::cli {

namespace {

using nlohmann::json;

// Reads keys out of one JSON object and rejects anything left unread.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where)
      : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) {
      throw ConfigValidationError(where_ + ": expected a JSON object");
    }
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& object(const std::string& key) {
    if (!has(key)) fail(key, "missing required section");
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key) {
    if (!has(key)) fail(key, "missing required field");
    return as_number(key);
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? as_number(key) : fallback;
  }

  int integer(const std::string& key) {
    if (!has(key)) fail(key, "missing required field");
    seen_.insert(key);
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) fail(key, "must be an integer");
    return v.get<int>();
  }

  std::string string_or(const std::string& key, std::string fallback) {
    if (!has(key)) return fallback;
    seen_.insert(key);
    const json& v = obj_.at(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.contains(item.key())) fail(item.key(), "unknown key");
    }
  }

 private:
  double as_number(const std::string& key) {
    seen_.insert(key);
    const json& v = obj_.at(key);
    if (!v.is_number()) fail(key, "must be a number");
    return v.get<double>();
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigValidationError(where_ + "." + key + ": " + why);
  }

  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

InstrumentConfig build(const json& root) {
  ObjectReader top(root, "config");

  ObjectReader g(top.object("geometry"), "geometry");
  GyroGeometry geometry{g.number("fiber_length_m"), g.number("coil_radius_m"),
                        g.number("wavelength_m")};
  g.finish();

  ObjectReader s(top.object("source"), "source");
  SourceSpec source{s.integer("noon_order"), s.number("pair_rate_hz"),
                    s.number("initial_noon_fraction"),
                    s.number_or("dark_rate_hz", 0.0)};
  s.finish();

  ObjectReader p(top.object("path"), "path");
  OpticalPath path{p.number("fiber_loss_db_per_km"), p.number("lumped_loss_db")};
  p.finish();

  ObjectReader d(top.object("detection"), "detection");
  const double jitter = d.number("jitter_s");
  const double t_meas = d.number("measurement_time_s");
  const WindowMode mode = window_mode_from_string(d.string_or("window_mode", "binned"));
  DetectionSpec detection{jitter, t_meas, mode};
  d.finish();

  ObjectReader sp(top.object("spectrum"), "spectrum");
  SpectralSpec spectrum{sp.number("center_wavelength_m"), sp.number("linewidth_m")};
  sp.finish();

  DispersionSpec dispersion;
  if (top.has("dispersion")) {
    ObjectReader ds(top.object("dispersion"), "dispersion");
    dispersion = DispersionSpec{
        ds.number_or("chromatic_coeff_ps_per_km_nm",
                     dispersion.chromatic_coeff_ps_per_km_nm),
        ds.number_or("pmd_coeff_ps_per_sqrt_km",
                     dispersion.pmd_coeff_ps_per_sqrt_km)};
    ds.finish();
  }

  PumpDrift pump;
  if (top.has("pump")) {
    ObjectReader pd(top.object("pump"), "pump");
    pump.drift_nm_per_degC = pd.number_or("drift_nm_per_degC", pump.drift_nm_per_degC);
    pump.stability_degC = pd.number_or("stability_degC", pump.stability_degC);
    pd.finish();
    if (!(pump.drift_nm_per_degC >= 0) || !(pump.stability_degC >= 0)) {
      throw ConfigValidationError("pump: drift and stability must be non-negative");
    }
  }

  InstrumentConfig cfg{geometry, source, path, detection, spectrum,
                       dispersion, pump};
  cfg.base_coherence = top.number_or("base_coherence", 1.0);
  cfg.bias_phase_rad = top.number_or("bias_phase_rad", 0.0);
  cfg.rotation_rad_per_s = top.number_or("rotation_rad_per_s", 0.0);
  cfg.reciprocal_delay_s = top.number_or("reciprocal_delay_s", 0.0);
  top.finish();

  if (!(cfg.base_coherence > 0 && cfg.base_coherence <= 1)) {
    throw ConfigValidationError("config.base_coherence: must lie in (0, 1]");
  }
  if (!std::isfinite(cfg.bias_phase_rad)) {
    throw ConfigValidationError("config.bias_phase_rad: must be finite");
  }
  if (!std::isfinite(cfg.rotation_rad_per_s)) {
    throw ConfigValidationError("config.rotation_rad_per_s: must be finite");
  }
  if (!(cfg.reciprocal_delay_s >= 0) || !std::isfinite(cfg.reciprocal_delay_s)) {
    throw ConfigValidationError(
        "config.reciprocal_delay_s: must be non-negative and finite");
  }
  return cfg;
}

}  // namespace

InstrumentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return build(root);
  } catch (const InvalidField& e) {
    throw ConfigValidationError(e.what());
  } catch (const json::exception& e) {
    throw ConfigValidationError(e.what());
  }
}

InstrumentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw ConfigParseError("cannot read config file: " + file.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

nlohmann::json to_json(const InstrumentConfig& cfg) {
  json j;
  j["geometry"] = {{"fiber_length_m", cfg.geometry.fiber_length_m},
                   {"coil_radius_m", cfg.geometry.coil_radius_m},
                   {"wavelength_m", cfg.geometry.wavelength_m}};
  j["source"] = {{"noon_order", cfg.source.noon_order},
                 {"pair_rate_hz", cfg.source.pair_rate_hz},
                 {"initial_noon_fraction", cfg.source.initial_noon_fraction},
                 {"dark_rate_hz", cfg.source.dark_rate_hz}};
  j["path"] = {{"fiber_loss_db_per_km", cfg.path.fiber_loss_db_per_km},
               {"lumped_loss_db", cfg.path.lumped_loss_db}};
  j["detection"] = {{"jitter_s", cfg.detection.jitter_s},
                    {"measurement_time_s", cfg.detection.measurement_time_s},
                    {"window_mode", std::string(to_string(cfg.detection.window_mode))}};
  j["spectrum"] = {{"center_wavelength_m", cfg.spectrum.center_wavelength_m},
                   {"linewidth_m", cfg.spectrum.linewidth_m}};
  j["dispersion"] = {
      {"chromatic_coeff_ps_per_km_nm", cfg.dispersion.chromatic_coeff_ps_per_km_nm},
      {"pmd_coeff_ps_per_sqrt_km", cfg.dispersion.pmd_coeff_ps_per_sqrt_km}};
  j["pump"] = {{"drift_nm_per_degC", cfg.pump.drift_nm_per_degC},
               {"stability_degC", cfg.pump.stability_degC}};
  j["base_coherence"] = cfg.base_coherence;
  j["bias_phase_rad"] = cfg.bias_phase_rad;
  j["rotation_rad_per_s"] = cfg.rotation_rad_per_s;
  j["reciprocal_delay_s"] = cfg.reciprocal_delay_s;
  return j;
}

}  // namespace qfog::cli
