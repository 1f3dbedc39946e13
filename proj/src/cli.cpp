#include "steerlab/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "steerlab/covariance.hpp"
#include "steerlab/error.hpp"
#include "steerlab/experiment.hpp"
#include "steerlab/figures.hpp"
#include "steerlab/io.hpp"
#include "steerlab/report.hpp"

#ifndef STEERLAB_CONFIG_DIR
#define STEERLAB_CONFIG_DIR "configs"
#endif

namespace steerlab {
namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out = ".";
  std::size_t jobs = 1;
};

// Accepts a path, a file name under the preset directory, or a preset name.
std::string resolve_config(const std::string& arg) {
  namespace fs = std::filesystem;
  for (const fs::path& p : {fs::path(arg), fs::path(default_config_dir()) / arg,
                            fs::path(default_config_dir()) / (arg + ".toml")})
    if (fs::is_regular_file(p)) return p.string();
  return arg;
}

ScenarioConfig load(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required for this command");
  ScenarioConfig cfg = load_config(resolve_config(c.config));
  if (c.seed) cfg.seed = *c.seed;
  if (c.trials) cfg.trials = *c.trials;
  validate_config(cfg);
  return cfg;
}

void print_stats(const ExperimentResult& r) {
  std::cout << std::left << std::setw(16) << "beamformer" << std::right << std::setw(10) << "median" << std::setw(10)
            << "iqr" << std::setw(10) << "rmse" << std::setw(10) << "std" << "\n"
            << std::fixed << std::setprecision(3);
  for (std::size_t i = 0; i < r.labels.size(); ++i)
    std::cout << std::left << std::setw(16) << r.labels[i] << std::right << std::setw(10) << r.stats[i].median
              << std::setw(10) << r.stats[i].iqr << std::setw(10) << r.stats[i].rmse << std::setw(10) << r.stats[i].std
              << "\n";
}

void cmd_reference(const Common& c) {
  const ScenarioConfig cfg = load(c);
  ensure_directory(c.out);
  const ReferenceResult ref = run_reference_phase(cfg);
  const std::string path = join_path(c.out, "sigma_s.json");
  write_json(matrix_to_json(ref.sigma_s.matrix()), path);
  std::cout << path << "\n";
}

void cmd_adapt(const Common& c, const std::string& variant, std::size_t draw) {
  ScenarioConfig cfg = load(c);
  const MapVariant v = parse_map_variant(variant);
  // Make sure the requested variant gets fitted.
  BeamformerSpec probe;
  probe.label = "__probe";
  probe.kind = BeamformerKind::kMVDR;
  probe.adapted = true;
  probe.variant = v;
  cfg.beamformers.push_back(probe);
  ensure_directory(c.out);
  const TrainedSystem system = train_system(cfg, run_reference_phase(cfg), draw, c.jobs);
  const std::string sa = join_path(c.out, "sigma_a.json");
  const std::string mp = join_path(c.out, "map.json");
  write_json(matrix_to_json(system.adaptation.sigma_a.matrix()), sa);
  write_json(map_to_json(system.map(v)), mp);
  std::cout << sa << "\n" << mp << "\n";
}

void cmd_estimate(const Common& c, const std::string& map_path, const std::string& snapshots_path, std::size_t trial,
                  std::optional<std::size_t> interferers) {
  const ScenarioConfig cfg = load(c);
  ensure_directory(c.out);
  std::optional<TrainedSystem> system;
  if (map_path.empty()) {
    system = train_system(cfg, run_reference_phase(cfg), 0, c.jobs);
  } else {
    const AdaptationMap map = map_from_json(read_json(map_path));
    ReferenceResult ref;
    ref.sigma_s = map.sigma_s();
    AdaptationResult ad;
    ad.sigma_a = map.sigma_a();
    ad.fixed_interferers = fixed_interferer_positions(cfg, 0);
    system = TrainedSystem{ref, ad, std::nullopt, std::nullopt, std::nullopt};
    switch (map.variant()) {
      case MapVariant::kCoral: system->coral = map; break;
      case MapVariant::kParallelTransport: system->parallel_transport = map; break;
      case MapVariant::kInverseDomainCoral: system->inverse_domain = map; break;
    }
    for (const auto& b : cfg.beamformers)
      if (b.adapted && b.variant != map.variant())
        throw ConfigError("beamformer " + b.label + " needs a " + std::string(to_string(b.variant)) +
                          " map but " + map_path + " holds a " + std::string(to_string(map.variant())) + " map");
  }

  SnapshotSet snaps;
  std::size_t active = interferers.value_or(cfg.interferers_operational);
  std::optional<double> truth;
  if (!snapshots_path.empty()) {
    snaps = read_snapshots_csv(snapshots_path);
    if (snaps.num_elements() != cfg.num_elements)
      throw InvalidInput(snapshots_path + ": snapshot dimension does not match the array");
  } else {
    const TrialScene ts = make_trial_scene(cfg, *system, trial);
    snaps = synthesize_snapshots(ts.scene, ts.signal_seed);
    active = ts.scene.interferers.size();
    truth = ts.true_theta;
  }
  const SteeringTable table(cfg.geometry(), cfg.grid);
  const auto outputs = evaluate_beamformers(cfg, *system, table, snaps, active);
  std::cout << std::fixed << std::setprecision(4);
  if (truth) std::cout << "true_theta " << *truth << "\n";
  for (const auto& o : outputs) {
    write_spectrum_csv(o.function.evaluate(table), join_path(c.out, "spectrum_" + o.label + ".csv"));
    std::cout << o.label << " " << o.estimate << "\n";
  }
}

void cmd_experiment(const Common& c) {
  const ScenarioConfig cfg = load(c);
  const ExperimentResult r = run_experiment(cfg, c.jobs);
  write_experiment_outputs(cfg, r, c.out);
  print_stats(r);
}

void cmd_figure(const Common& c, const std::string& name, const std::string& config_dir) {
  FigureOptions o;
  o.config_dir = config_dir;
  o.out_dir = c.out;
  o.seed = c.seed;
  o.trials = c.trials;
  o.jobs = c.jobs;
  for (const auto& f : run_figure(name, o)) std::cout << f << "\n";
}

}  // namespace

std::string default_config_dir() { return STEERLAB_CONFIG_DIR; }

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args);
}

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Narrowband array DoA estimation with domain-adapted correlation matrices", "steerlab"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--config", c.config, "Scenario TOML file or preset name");
  app.add_option("--seed", c.seed, "Master seed (overrides the config)");
  app.add_option("--trials", c.trials, "Operational trials per interferer draw (overrides the config)");
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--jobs", c.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  auto* reference = app.add_subcommand("reference", "Write sigma_s.json");
  std::string variant = "coral";
  std::size_t draw = 0;
  auto* adapt = app.add_subcommand("adapt", "Write sigma_a.json and map.json");
  adapt->add_option("--variant", variant, "coral, pt or inverse")->capture_default_str();
  adapt->add_option("--draw", draw, "Interferer draw")->capture_default_str();

  std::string map_path, snapshots_path;
  std::size_t trial = 0;
  std::optional<std::size_t> interferers;
  auto* estimate = app.add_subcommand("estimate", "Estimate the DoA of one scene and write spectra");
  estimate->add_option("--map", map_path, "map.json from `adapt` (default: adapt in-process)");
  estimate->add_option("--snapshots", snapshots_path, "Snapshot CSV (default: synthesize an operational trial)");
  estimate->add_option("--trial", trial, "Operational trial index to synthesize")->capture_default_str();
  estimate->add_option("--interferers", interferers, "Active interferers for baseline MUSIC with --snapshots");

  auto* experiment = app.add_subcommand("experiment", "Monte-Carlo run; writes stats.json and trials.csv");

  std::string figure_name, config_dir = default_config_dir();
  auto* figure = app.add_subcommand("figure", "Named reproduction (plot-ready CSV)");
  figure->add_option("name", figure_name, "One of: " + CLI::detail::join(figure_names(), ", "))->required();
  figure->add_option("--config-dir", config_dir, "Preset directory")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (reference->parsed()) cmd_reference(c);
    if (adapt->parsed()) cmd_adapt(c, variant, draw);
    if (estimate->parsed()) cmd_estimate(c, map_path, snapshots_path, trial, interferers);
    if (experiment->parsed()) cmd_experiment(c);
    if (figure->parsed()) cmd_figure(c, figure_name, config_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace steerlab
