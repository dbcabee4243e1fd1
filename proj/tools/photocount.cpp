// Command-line front end: photon distributions, response curves, photocount
// densities and the four-preset figure reproduction.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "photocount/app.hpp"

namespace {

using photocount::app::CommandResult;
using photocount::app::ExperimentConfig;

struct Overrides
{
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::string out;
  std::vector<std::string> formats;
  std::optional<double> kappa;
  std::optional<double> mean_gamma;
  std::optional<double> gamma;
  std::optional<double> gamma_max;
  std::optional<int> beta;
  std::optional<int> channels;
  std::optional<int> order;
  std::optional<std::size_t> bins;
  std::optional<std::size_t> grid_points;
};

void add_common(CLI::App* cmd, Overrides& o)
{
  cmd->add_option("--config", o.config_path, "JSON configuration file");
  cmd->add_option("--preset", o.preset, "built-in parameter set (fig2a-solid, fig2a-dashed, fig2b-solid, fig2b-dashed)");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--samples", o.samples, "Monte Carlo sample count (0 skips Monte Carlo)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--format", o.formats, "table format(s): csv, json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--kappa", o.kappa, "absorption rate");
  cmd->add_option("--mean-gamma", o.mean_gamma, "ensemble mean escape rate");
  cmd->add_option("--gamma", o.gamma, "escape rate for the photon distribution");
  cmd->add_option("--gamma-max", o.gamma_max, "upper end of the response curve");
  cmd->add_option("--beta", o.beta, "symmetry index (1 or 2)");
  cmd->add_option("--channels", o.channels, "waveguide channel count M");
  cmd->add_option("--order", o.order, "factorial moment order r");
  cmd->add_option("--bins", o.bins, "histogram bins");
  cmd->add_option("--grid-points", o.grid_points, "response curve grid points");
}

ExperimentConfig resolve(const Overrides& o)
{
  ExperimentConfig c;
  if (!o.preset.empty()) {
    c = photocount::app::preset(o.preset);
  }
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) {
      throw std::invalid_argument("cannot read configuration " + o.config_path);
    }
    photocount::app::apply_json(c, nlohmann::json::parse(in));
  }
  if (o.seed) c.seed = *o.seed;
  if (o.samples) c.mc_samples = *o.samples;
  if (!o.out.empty()) c.output_dir = o.out;
  if (!o.formats.empty()) c.formats = {o.formats.begin(), o.formats.end()};
  if (o.kappa) c.laser.absorption_kappa = *o.kappa;
  if (o.mean_gamma) c.ensemble.mean_gamma = *o.mean_gamma;
  if (o.gamma) c.gamma = *o.gamma;
  if (o.gamma_max) c.gamma_max = *o.gamma_max;
  if (o.beta) c.ensemble.beta = *o.beta;
  if (o.channels) c.ensemble.channels_M = *o.channels;
  if (o.order) c.moment_order_r = *o.order;
  if (o.bins) c.bins = *o.bins;
  if (o.grid_points) c.curve_grid_points = *o.grid_points;
  return c;
}

int report(const CommandResult& result)
{
  for (const auto& f : result.files) {
    std::cout << "wrote " << f.string() << '\n';
  }
  for (const auto& c : result.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (" << c.requirement << ")\n";
  }
  return result.ok() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Photocount statistics of chaotic single-mode lasers"};
  app.require_subcommand(1);

  Overrides o;
  struct Sub
  {
    const char* name;
    const char* help;
    CommandResult (*run)(const ExperimentConfig&);
  };
  const std::vector<Sub> subs{
      {"pn", "stationary photon-number distribution", [](const ExperimentConfig& c) { return photocount::app::cmd_pn(c); }},
      {"response", "mean photocount versus escape rate",
       [](const ExperimentConfig& c) { return photocount::app::cmd_response(c); }},
      {"density", "ensemble density of the photocount moment",
       [](const ExperimentConfig& c) { return photocount::app::cmd_density(c); }},
      {"fig2", "all four presets plus both insets", [](const ExperimentConfig& c) { return photocount::app::cmd_fig2(c); }},
      {"sample-gamma", "draw escape rates from the mode ensemble",
       [](const ExperimentConfig& c) { return photocount::app::cmd_sample_gamma(c); }},
  };
  std::vector<CLI::App*> commands;
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, o);
    commands.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!commands[i]->parsed()) {
      continue;
    }
    ExperimentConfig config;
    try {
      config = resolve(o);
      config.validate();
    } catch (const std::exception& e) {
      std::cerr << "photocount: invalid configuration: " << e.what() << '\n';
      return 2;
    }
    try {
      return report(subs[i].run(config));
    } catch (const std::invalid_argument& e) {
      std::cerr << "photocount: invalid configuration: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "photocount: " << e.what() << '\n';
      return 3;
    }
  }
  return 0;
}
