#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "photocount/asymptotics.hpp"
#include "photocount/count_density.hpp"
#include "photocount/exponent_fit.hpp"
#include "photocount/io.hpp"
#include "photocount/mode_ensemble.hpp"
#include "photocount/photon_stats.hpp"
#include "photocount/response_curve.hpp"

namespace photocount::app {

using nlohmann::json;
namespace fs = std::filesystem;

/// Resolved configuration of one run. Rates are in units of A unless the
/// configuration says otherwise.
struct ExperimentConfig
{
  std::string preset;
  LaserParams laser{1.0, 0.005, 0.7, 1.0};
  ModeEnsemble ensemble{1, 1, 0.02};
  int moment_order_r = 1;
  std::size_t mc_samples = 1'000'000;
  std::size_t bins = 400;
  std::size_t mu_grid_points = 2000;
  std::size_t curve_grid_points = 400;
  std::uint64_t seed = 20011;
  fs::path output_dir = "out";
  std::set<std::string> formats{"csv", "json"};
  /// Escape rate used by `pn`; defaults to the ensemble mean.
  std::optional<double> gamma;
  /// Upper end of the tabulated response curve.
  std::optional<double> gamma_max;

  double resolved_gamma() const { return gamma.value_or(ensemble.mean_gamma); }

  double resolved_gamma_max() const
  {
    return gamma_max.value_or(
        std::max(20.0 * ensemble.mean_gamma, 4.0 * std::max(laser.gain_A, laser.absorption_kappa)));
  }

  bool wants(const std::string& format) const { return formats.count(format) > 0; }

  void validate() const
  {
    laser.validate();
    ensemble.validate();
    photocount::detail::require(moment_order_r >= 1 && moment_order_r <= kMaxFactorialOrder, "moment_order_r out of range");
    photocount::detail::require(mc_samples == 0 || mc_samples >= 10'000, "mc_samples must be 0 (skip) or >= 1e4");
    photocount::detail::require(bins >= 2, "bins must be >= 2");
    photocount::detail::require(mu_grid_points >= 10, "mu_grid_points must be >= 10");
    photocount::detail::require(curve_grid_points >= 200, "grid_points must be >= 200");
    photocount::detail::require(!formats.empty(), "at least one output format is required");
    for (const auto& f : formats) {
      photocount::detail::require(f == "csv" || f == "json", "unknown format '" + f + "'");
    }
    if (gamma) {
      photocount::detail::require(*gamma >= 0.0, "gamma must be >= 0");
      photocount::detail::require(*gamma + laser.absorption_kappa > 0.0, "total loss C = gamma + kappa must be > 0");
    }
    if (gamma_max) {
      photocount::detail::require(*gamma_max > 0.0, "gamma_max must be > 0");
    }
  }
};

/// Resolved configuration as embedded in every artifact. The output
/// directory is left out so that runs into different directories compare
/// byte for byte.
inline json to_json(const ExperimentConfig& c)
{
  json doc = {{"preset", c.preset},
              {"laser",
               {{"gain_A", c.laser.gain_A},
                {"saturation_B", c.laser.saturation_B},
                {"absorption_kappa", c.laser.absorption_kappa},
                {"counting_time_t", c.laser.counting_time_t}}},
              {"ensemble",
               {{"beta", c.ensemble.beta}, {"channels_M", c.ensemble.channels_M}, {"mean_gamma", c.ensemble.mean_gamma}}},
              {"moment_order_r", c.moment_order_r},
              {"mc_samples", c.mc_samples},
              {"bins", c.bins},
              {"mu_grid_points", c.mu_grid_points},
              {"curve_grid_points", c.curve_grid_points},
              {"seed", c.seed},
              {"formats", c.formats},
              {"gamma", c.resolved_gamma()},
              {"gamma_max", c.resolved_gamma_max()}};
  return doc;
}

inline ExperimentConfig preset(const std::string& name);

/// Overlays the fields present in `doc` onto `c`. A non-empty "preset"
/// field first resets the physical parameters to that preset.
inline void apply_json(ExperimentConfig& c, const json& doc)
{
  if (!doc.is_object()) {
    throw std::invalid_argument("configuration must be a JSON object");
  }
  if (const auto name = doc.value("preset", std::string{}); !name.empty() && name != c.preset) {
    const auto base = preset(name);
    c.preset = base.preset;
    c.laser = base.laser;
    c.ensemble = base.ensemble;
  }
  if (doc.contains("laser")) {
    const auto& l = doc.at("laser");
    c.laser.gain_A = l.value("gain_A", c.laser.gain_A);
    c.laser.saturation_B = l.value("saturation_B", c.laser.saturation_B);
    c.laser.absorption_kappa = l.value("absorption_kappa", c.laser.absorption_kappa);
    c.laser.counting_time_t = l.value("counting_time_t", c.laser.counting_time_t);
  }
  if (doc.contains("ensemble")) {
    const auto& e = doc.at("ensemble");
    c.ensemble.beta = e.value("beta", c.ensemble.beta);
    c.ensemble.channels_M = e.value("channels_M", c.ensemble.channels_M);
    c.ensemble.mean_gamma = e.value("mean_gamma", c.ensemble.mean_gamma);
  }
  c.moment_order_r = doc.value("moment_order_r", c.moment_order_r);
  c.mc_samples = doc.value("mc_samples", c.mc_samples);
  c.bins = doc.value("bins", c.bins);
  c.mu_grid_points = doc.value("mu_grid_points", c.mu_grid_points);
  c.curve_grid_points = doc.value("curve_grid_points", c.curve_grid_points);
  c.seed = doc.value("seed", c.seed);
  if (doc.contains("output_dir")) {
    c.output_dir = doc.at("output_dir").get<std::string>();
  }
  if (doc.contains("formats")) {
    c.formats = doc.at("formats").get<std::set<std::string>>();
  }
  if (doc.contains("gamma") && !doc.at("gamma").is_null()) {
    c.gamma = doc.at("gamma").get<double>();
  }
  if (doc.contains("gamma_max") && !doc.at("gamma_max").is_null()) {
    c.gamma_max = doc.at("gamma_max").get<double>();
  }
}

inline ExperimentConfig load_config(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read configuration " + path.string());
  }
  ExperimentConfig c;
  apply_json(c, json::parse(in));
  return c;
}

/// Built-in parameter sets: A = 1, B = 0.005, beta M = 1.
inline const std::vector<std::string>& preset_names()
{
  static const std::vector<std::string> names{"fig2a-solid", "fig2a-dashed", "fig2b-solid", "fig2b-dashed"};
  return names;
}

inline ExperimentConfig preset(const std::string& name)
{
  static const std::map<std::string, std::pair<double, double>> table{
      {"fig2a-solid", {0.7, 0.02}},
      {"fig2a-dashed", {0.7, 0.2}},
      {"fig2b-solid", {2.0, 0.5}},
      {"fig2b-dashed", {2.0, 4.0}},
  };
  // inset aliases share the laser parameters of the solid curves
  std::string key = name;
  if (key == "fig2a" || key == "fig2b") {
    key += "-solid";
  }
  const auto it = table.find(key);
  if (it == table.end()) {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  ExperimentConfig c;
  c.preset = name;
  c.laser = {1.0, 0.005, it->second.first, 1.0};
  c.ensemble = {1, 1, it->second.second};
  return c;
}

struct Check
{
  std::string name;
  double value = 0.0;
  std::string requirement;
  bool pass = false;
};

inline json to_json(const Check& c)
{
  return {{"name", c.name}, {"value", c.value}, {"requirement", c.requirement}, {"pass", c.pass}};
}

struct CommandResult
{
  std::vector<fs::path> files;
  std::vector<Check> checks;
  json summary;

  bool ok() const
  {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

namespace detail {

inline json provenance(const ExperimentConfig& c, const std::string& artifact)
{
  return {{"artifact", artifact}, {"config", to_json(c)}, {"seed", c.seed}};
}

inline fs::path prepare_dir(const fs::path& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
  return dir;
}

inline json checks_json(const std::vector<Check>& checks)
{
  json out = json::array();
  for (const auto& c : checks) {
    out.push_back(to_json(c));
  }
  return out;
}

} // namespace detail

/// Nodes of the deterministic density inside the top `fraction` of the range
/// never increase towards mu_max.
inline bool decreases_toward_max(const CountDensity& d, double fraction = 0.01)
{
  std::optional<double> previous;
  bool any = false;
  for (std::size_t i = 0; i < d.mu_grid.size(); ++i) {
    if (d.mu_grid[i] < (1.0 - fraction) * d.mu_max || d.node_kind[i] != NodeKind::regular) {
      continue;
    }
    if (previous && d.density[i] > *previous * (1.0 + 1e-9)) {
      return false;
    }
    previous = d.density[i];
    any = true;
  }
  return any;
}

/// Interior local maxima of a deterministic density away from the endpoints,
/// reported as mu / mu_max.
inline std::vector<double> shoulder_locations(const CountDensity& d, double lo = 0.05, double hi = 0.98)
{
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < d.mu_grid.size(); ++i) {
    const double f = d.mu_grid[i] / d.mu_max;
    if (f < lo || f > hi) {
      continue;
    }
    if (d.density[i] > d.density[i - 1] && d.density[i] >= d.density[i + 1]) {
      out.push_back(f);
    }
  }
  return out;
}

/// Writes the photon distribution P_n at the configured escape rate and a
/// summary (mean, Fano factor, n_s, threshold class).
inline CommandResult cmd_pn(const ExperimentConfig& config)
{
  config.validate();
  const double gamma = config.resolved_gamma();
  const double total_loss = gamma + config.laser.absorption_kappa;
  photocount::detail::require(total_loss > 0.0, "total loss C = gamma + kappa must be > 0");

  const auto dist = compute_photon_distribution(config.laser, total_loss);
  const double mean = mean_photon_number(dist);
  const double fano = mean > 0.0 ? fano_factor(dist) : std::nan("");
  double sum = 0.0;
  for (double p : dist.probabilities()) {
    sum += p;
  }
  const auto cls = classify_threshold(config.laser);
  const bool lasing = total_loss < config.laser.gain_A;

  CommandResult result;
  result.checks.push_back({"normalization", std::abs(sum - 1.0), "|sum P_n - 1| <= 1e-10", std::abs(sum - 1.0) <= 1e-10});
  result.checks.push_back({"tail_mass", dist.tail_mass_estimate(), "< 1e-12", dist.tail_mass_estimate() < 1e-12});

  const fs::path dir = detail::prepare_dir(config.output_dir);
  const json prov = detail::provenance(config, "pn");
  if (config.wants("csv")) {
    io::CsvWriter csv(dir / "pn.csv", prov, {"n", "P_n", "log_P_n"});
    const auto probs = dist.probabilities();
    for (std::size_t i = 0; i < probs.size(); ++i) {
      csv.row(dist.first_n() + i, probs[i], std::log(probs[i]));
    }
    result.files.push_back(dir / "pn.csv");
  }
  if (config.wants("json")) {
    json rows = json::array();
    const auto probs = dist.probabilities();
    for (std::size_t i = 0; i < probs.size(); ++i) {
      rows.push_back({dist.first_n() + i, probs[i], std::log(probs[i])});
    }
    json table = prov;
    table["columns"] = {"n", "P_n", "log_P_n"};
    table["rows"] = rows;
    io::write_json(dir / "pn.json", table);
    result.files.push_back(dir / "pn.json");
  }

  result.summary = prov;
  result.summary["gamma"] = gamma;
  result.summary["total_loss_C"] = total_loss;
  result.summary["saturation_photons"] = config.laser.saturation_photons();
  result.summary["mean_photon_number"] = mean;
  result.summary["mean_photocount_mu1"] = gamma * config.laser.counting_time_t * mean;
  result.summary["fano_factor"] = fano;
  result.summary["n_min"] = dist.first_n();
  result.summary["n_max"] = dist.n_max();
  result.summary["log_norm"] = dist.log_norm();
  result.summary["tail_mass_estimate"] = dist.tail_mass_estimate();
  result.summary["ensemble_class"] = io::to_string(cls.cls);
  result.summary["critical"] = cls.critical;
  result.summary["mode_lasing"] = lasing;
  result.summary["checks"] = detail::checks_json(result.checks);
  io::write_json(dir / "pn_summary.json", result.summary);
  result.files.push_back(dir / "pn_summary.json");
  return result;
}

/// Writes mu_r(Gamma / A) with branch ids and the peak / monotone annotation.
inline CommandResult cmd_response(const ExperimentConfig& config, const std::string& stem = "response")
{
  config.validate();
  const auto curve = build_response_curve(config.laser, config.moment_order_r, config.resolved_gamma_max(),
                                          config.curve_grid_points);
  const auto cls = classify_threshold(config.laser);

  CommandResult result;
  result.checks.push_back({"single_maximum", static_cast<double>(curve.maxima.size()), "at most one interior maximum",
                           !curve.multiple_maxima});

  const fs::path dir = detail::prepare_dir(config.output_dir);
  const json prov = detail::provenance(config, stem);
  if (config.wants("csv")) {
    io::write_curve_csv(dir / (stem + ".csv"), curve, prov);
    result.files.push_back(dir / (stem + ".csv"));
  }
  if (config.wants("json")) {
    json table = prov;
    table["columns"] = {"gamma", "gamma_over_A", "mu_r", "branch_id"};
    json rows = json::array();
    for (std::size_t i = 0; i < curve.gamma_grid.size(); ++i) {
      rows.push_back({curve.gamma_grid[i], curve.gamma_grid[i] / config.laser.gain_A, curve.mu_values[i], curve.branch_of(i)});
    }
    table["rows"] = rows;
    io::write_json(dir / (stem + ".json"), table);
    result.files.push_back(dir / (stem + ".json"));
  }

  result.summary = prov;
  result.summary["curve"] = io::to_json(curve);
  result.summary["ensemble_class"] = io::to_string(cls.cls);
  result.summary["critical"] = cls.critical;
  // Gamma below which the mode lases: A - kappa
  result.summary["lasing_threshold_gamma"] =
      config.laser.gain_A > config.laser.absorption_kappa ? json(config.laser.gain_A - config.laser.absorption_kappa)
                                                          : json(nullptr);
  if (curve.peak) {
    result.summary["peak_gamma_over_A"] = curve.peak->gamma_star / config.laser.gain_A;
    if (config.laser.absorption_kappa > 0.0) {
      result.summary["gamma_star_analytic"] = gamma_star_analytic(config.laser.gain_A, config.laser.absorption_kappa);
    }
  }
  result.summary["monotone"] = !curve.peak.has_value();
  result.summary["checks"] = detail::checks_json(result.checks);
  io::write_json(dir / (stem + "_summary.json"), result.summary);
  result.files.push_back(dir / (stem + "_summary.json"));
  return result;
}

/// Deterministic and Monte Carlo densities of mu_r, their comparison and
/// the endpoint exponent fits.
inline CommandResult cmd_density(const ExperimentConfig& config)
{
  config.validate();
  const int r = config.moment_order_r;
  const auto curve = build_response_curve(config.laser, r, config.resolved_gamma_max(), config.curve_grid_points);
  DensityGridSpec grid;
  grid.uniform_points = config.mu_grid_points;
  const auto det = density_deterministic(curve, config.ensemble, grid);

  std::optional<CountDensity> mc;
  if (config.mc_samples > 0) {
    mc = density_monte_carlo(config.laser, config.ensemble, r, RngHandle{config.seed, 0}, config.mc_samples,
                             config.bins, curve);
  }

  CommandResult result;
  result.checks.push_back({"mass_check", det.mass_check, "in [0.98, 1.02]",
                           det.mass_check >= 0.98 && det.mass_check <= 1.02});

  json comparison = nullptr;
  if (mc) {
    const auto cmp = compare_densities(det, *mc);
    comparison = {{"total_variation", cmp.total_variation},
                  {"ks_statistic", cmp.ks_statistic},
                  {"bins_used", cmp.bins_used},
                  {"samples", config.mc_samples},
                  {"tolerance_total_variation", 0.02}};
    result.checks.push_back({"total_variation", cmp.total_variation, "< 0.02", cmp.total_variation < 0.02});
  }

  json fits = json::object();
  {
    const double target = small_count_exponent(config.ensemble.beta, config.ensemble.channels_M, r);
    const auto fit = fit_power_law(det, {1e-4 * det.mu_max, 1e-2 * det.mu_max});
    fits["small_count"] = io::to_json(fit, target, 0.05);
    result.checks.push_back({"small_count_exponent", fit.exponent, "target " + std::to_string(target) + " +- 0.05",
                             std::abs(fit.exponent - target) <= 0.05});
  }
  if (det.diverges_at_max()) {
    const auto fit = fit_singularity_at_max(det, det.mu_max);
    fits["at_max"] = io::to_json(fit, -0.5, 0.07);
    const auto wide = fit_singularity_at_max(det, det.mu_max, {0.90, 0.999});
    fits["at_max_wide_window"] = io::to_json(wide, -0.5, 0.07);
    fits["at_max_wide_window"]["informational"] = true;
    result.checks.push_back({"square_root_exponent", fit.exponent, "-0.5 +- 0.07", std::abs(fit.exponent + 0.5) <= 0.07});
  } else {
    const bool decreasing = decreases_toward_max(det);
    fits["at_max"] = {{"divergent", false}, {"decreasing_toward_max", decreasing}};
    result.checks.push_back({"decreasing_toward_max", decreasing ? 1.0 : 0.0, "density non-divergent and decreasing",
                             decreasing});
  }

  const fs::path dir = detail::prepare_dir(config.output_dir);
  const json prov = detail::provenance(config, "density");
  if (config.wants("csv")) {
    io::write_density_csv(dir / "density_deterministic.csv", det, prov);
    result.files.push_back(dir / "density_deterministic.csv");
    if (mc) {
      io::write_density_csv(dir / "density_monte_carlo.csv", *mc, prov);
      result.files.push_back(dir / "density_monte_carlo.csv");
    }
  }
  json det_doc = prov;
  det_doc["density"] = io::to_json(det, config.wants("json"));
  io::write_json(dir / "density_deterministic.json", det_doc);
  result.files.push_back(dir / "density_deterministic.json");
  if (mc) {
    json mc_doc = prov;
    mc_doc["density"] = io::to_json(*mc, config.wants("json"));
    io::write_json(dir / "density_monte_carlo.json", mc_doc);
    result.files.push_back(dir / "density_monte_carlo.json");
  }

  json fit_doc = prov;
  fit_doc["fits"] = fits;
  io::write_json(dir / "fits.json", fit_doc);
  result.files.push_back(dir / "fits.json");

  result.summary = prov;
  result.summary["curve"] = io::to_json(curve);
  result.summary["ensemble_class"] = io::to_string(classify_threshold(config.laser).cls);
  result.summary["mass_check"] = det.mass_check;
  result.summary["comparison"] = comparison;
  result.summary["fits"] = fits;
  result.summary["peak_near_max"] = has_peak_near_max(det);
  result.summary["shoulders_mu_over_mu_max"] = shoulder_locations(det);
  result.summary["checks"] = detail::checks_json(result.checks);
  io::write_json(dir / "comparison.json", result.summary);
  result.files.push_back(dir / "comparison.json");
  return result;
}

/// Four density presets plus the two insets, with a manifest listing every
/// artifact, its parameters and checks.
inline CommandResult cmd_fig2(const ExperimentConfig& base)
{
  base.validate();
  const fs::path root = detail::prepare_dir(base.output_dir);

  auto configure = [&](const std::string& name) {
    ExperimentConfig c = preset(name);
    c.laser.counting_time_t = base.laser.counting_time_t;
    c.moment_order_r = 1;
    c.mc_samples = base.mc_samples;
    c.bins = base.bins;
    c.mu_grid_points = base.mu_grid_points;
    c.curve_grid_points = base.curve_grid_points;
    c.seed = base.seed;
    c.formats = base.formats;
    return c;
  };

  CommandResult result;
  json entries = json::array();
  auto relative = [&](const fs::path& p) { return fs::relative(p, root).generic_string(); };

  for (const auto& name : preset_names()) {
    ExperimentConfig c = configure(name);
    c.output_dir = root / name;
    json entry = {{"preset", name}, {"kind", "density"}, {"config", to_json(c)}};
    try {
      const auto sub = cmd_density(c);
      json files = json::array();
      for (const auto& f : sub.files) {
        files.push_back(relative(f));
        result.files.push_back(f);
      }
      entry["files"] = files;
      entry["checks"] = detail::checks_json(sub.checks);
      entry["status"] = sub.ok() ? "ok" : "checks_failed";
      entry["shoulders_mu_over_mu_max"] = sub.summary["shoulders_mu_over_mu_max"];
      for (auto ch : sub.checks) {
        ch.name = name + ":" + ch.name;
        result.checks.push_back(ch);
      }
    } catch (const std::exception& e) {
      entry["status"] = "error";
      entry["error"] = e.what();
      result.checks.push_back({name + ":run", 0.0, "completes", false});
    }
    entries.push_back(entry);
  }

  for (const std::string inset : {"fig2a", "fig2b"}) {
    ExperimentConfig c = configure(inset);
    c.output_dir = root;
    json entry = {{"preset", inset}, {"kind", "inset"}, {"config", to_json(c)}};
    try {
      const auto sub = cmd_response(c, "inset_" + inset);
      json files = json::array();
      for (const auto& f : sub.files) {
        files.push_back(relative(f));
        result.files.push_back(f);
      }
      entry["files"] = files;
      entry["checks"] = detail::checks_json(sub.checks);
      entry["status"] = sub.ok() ? "ok" : "checks_failed";
      entry["monotone"] = sub.summary["monotone"];
      for (auto ch : sub.checks) {
        ch.name = inset + ":" + ch.name;
        result.checks.push_back(ch);
      }
    } catch (const std::exception& e) {
      entry["status"] = "error";
      entry["error"] = e.what();
      result.checks.push_back({inset + ":run", 0.0, "completes", false});
    }
    entries.push_back(entry);
  }

  result.summary = {{"artifact", "fig2_manifest"},
                    {"seed", base.seed},
                    {"beta_M", 1},
                    {"entries", entries},
                    {"all_checks_pass", result.ok()}};
  io::write_json(root / "manifest.json", result.summary);
  result.files.push_back(root / "manifest.json");
  return result;
}

/// Escape-rate samples with their moments and the Gaussian-limit prediction.
inline CommandResult cmd_sample_gamma(const ExperimentConfig& config)
{
  config.validate();
  const std::size_t count = config.mc_samples > 0 ? config.mc_samples : 10'000;
  const auto samples = sample_gamma(config.ensemble, RngHandle{config.seed, 0}, count);

  double mean = 0.0;
  for (double g : samples) {
    mean += g;
  }
  mean /= static_cast<double>(count);
  double m2 = 0.0;
  double m3 = 0.0;
  for (double g : samples) {
    const double d = g - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(count);
  m3 /= static_cast<double>(count);
  const double sd = std::sqrt(m2);
  const double skew = m3 / (sd * sd * sd);
  const auto [g_mean, g_sd] = gaussian_limit_stats(config.ensemble);

  CommandResult result;
  const fs::path dir = detail::prepare_dir(config.output_dir);
  const json prov = detail::provenance(config, "sample-gamma");
  if (config.wants("csv")) {
    io::CsvWriter csv(dir / "gamma_samples.csv", prov, {"index", "gamma"});
    for (std::size_t i = 0; i < samples.size(); ++i) {
      csv.row(i, samples[i]);
    }
    result.files.push_back(dir / "gamma_samples.csv");
  }
  if (config.wants("json")) {
    json doc = prov;
    doc["samples"] = samples;
    io::write_json(dir / "gamma_samples.json", doc);
    result.files.push_back(dir / "gamma_samples.json");
  }
  result.summary = prov;
  result.summary["count"] = count;
  result.summary["sample_mean"] = mean;
  result.summary["sample_std"] = sd;
  result.summary["sample_skewness"] = skew;
  result.summary["gaussian_limit_mean"] = g_mean;
  result.summary["gaussian_limit_std"] = g_sd;
  result.summary["chi2_skewness"] = std::sqrt(8.0 / config.ensemble.nu());
  io::write_json(dir / "gamma_summary.json", result.summary);
  result.files.push_back(dir / "gamma_summary.json");
  return result;
}

} // namespace photocount::app
