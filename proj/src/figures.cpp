#include "steerlab/figures.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>

#include "steerlab/covariance.hpp"
#include "steerlab/error.hpp"
#include "steerlab/experiment.hpp"
#include "steerlab/io.hpp"
#include "steerlab/report.hpp"

namespace steerlab {
namespace {

using Files = std::vector<std::string>;

// Writes rows of numbers under a header line.
void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n" << std::setprecision(10);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
}

std::string out(const FigureOptions& o, const std::string& file) { return join_path(o.out_dir, file); }

// Spectra of every configured beamformer for one operational trial.
Files example_spectra(const FigureOptions& o, const std::string& prefix, const ScenarioConfig& cfg,
                      const TrainedSystem& system, std::size_t trial) {
  const ArrayGeometry geom = cfg.geometry();
  const SteeringTable table(geom, cfg.grid);
  const TrialScene ts = make_trial_scene(cfg, system, trial);
  const auto outputs =
      evaluate_beamformers(cfg, system, table, synthesize_snapshots(ts.scene, ts.signal_seed), ts.scene.interferers.size());
  Files files;
  nlohmann::json meta = {{"true_theta", ts.true_theta}, {"trial", trial}};
  meta["interferer_thetas"] = nlohmann::json::array();
  for (const auto& e : ts.scene.interferers) meta["interferer_thetas"].push_back(true_doa(geom, e.position));
  for (const auto& out_bf : outputs) {
    const std::string path = out(o, prefix + "_spectrum_" + out_bf.label + ".csv");
    write_spectrum_csv(out_bf.function.evaluate(table), path);
    meta["estimates"][out_bf.label] = out_bf.estimate;
    files.push_back(path);
  }
  const std::string mpath = out(o, prefix + "_markers.json");
  write_json(meta, mpath);
  files.push_back(mpath);
  return files;
}

// |d^H A d|^2 for E, Sigma_A^{-1/2} and Sigma_S^{1/2}.
Files quadratic_terms(const FigureOptions& o, const std::string& prefix, const ScenarioConfig& cfg,
                      const TrainedSystem& system) {
  const ArrayGeometry geom = cfg.geometry();
  const auto& map = system.map(MapVariant::kCoral);
  const std::vector<std::pair<std::string, CMatrix>> terms = {
      {"e", map.matrix()},
      {"sigma_a_invsqrt", matrix_inv_sqrt(regularize(system.adaptation.sigma_a, cfg.eps)).matrix()},
      {"sigma_s_sqrt", matrix_sqrt(system.reference.sigma_s).matrix()}};
  Files files;
  for (const auto& [name, a] : terms) {
    const std::string path = out(o, prefix + "_quadratic_" + name + ".csv");
    write_spectrum_csv(quadratic_term_spectrum(a, geom, cfg.grid), path);
    files.push_back(path);
  }
  nlohmann::json meta;
  meta["interferer_thetas"] = nlohmann::json::array();
  for (const auto& p : system.adaptation.fixed_interferers) meta["interferer_thetas"].push_back(true_doa(geom, p));
  const std::string mpath = out(o, prefix + "_quadratic_markers.json");
  write_json(meta, mpath);
  files.push_back(mpath);
  return files;
}

Files experiment_files(const FigureOptions& o, const std::string& prefix, const ScenarioConfig& cfg) {
  const ExperimentResult r = run_experiment(cfg, o.jobs);
  const std::string stats = out(o, prefix + "_stats.json");
  const std::string trials = out(o, prefix + "_trials.csv");
  write_json(experiment_stats_json(cfg, r), stats);
  write_trials_csv(r, trials);
  return {stats, trials};
}

// Median and IQR per beamformer for a list of presets.
Files summary_table(const FigureOptions& o, const std::string& file, const std::vector<std::string>& presets) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header{"sir_db"};
  for (const auto& name : presets) {
    const ScenarioConfig cfg = load_preset(o, name);
    const ExperimentResult r = run_experiment(cfg, o.jobs);
    if (header.size() == 1)
      for (const auto& l : r.labels) {
        header.push_back("median_" + l);
        header.push_back("iqr_" + l);
      }
    std::vector<double> row{cfg.sir_db};
    for (const auto& s : r.stats) {
      row.push_back(s.median);
      row.push_back(s.iqr);
    }
    rows.push_back(row);
  }
  const std::string path = out(o, file);
  write_table(path, header, rows);
  return {path};
}

Files fig1(const FigureOptions& o) {
  Files files;
  for (const auto& [file, angles] : std::vector<std::pair<std::string, std::vector<double>>>{
           {"fig1a_output_sir.csv", {30.0}}, {"fig1b_output_sir.csv", {30.0, 150.0}}}) {
    OutputSirSetup setup;
    setup.desired_angles = DirectionGrid{35.0, 145.0, 1.0};
    setup.interferer_angles = angles;
    if (o.seed) setup.seed = *o.seed;
    std::vector<std::vector<double>> rows;
    for (const auto& p : theoretic_output_sir(setup)) rows.push_back({p.theta_s, p.baseline_db, p.coral_db, p.pt_db});
    const std::string path = out(o, file);
    write_table(path, {"theta_s_deg", "baseline_db", "coral_db", "pt_db"}, rows);
    files.push_back(path);
  }
  return files;
}

Files fig3(const FigureOptions& o) {
  const ScenarioConfig cfg = load_preset(o, "acoustic_reverb");
  const TrainedSystem system = train_system(cfg, run_reference_phase(cfg), 0, o.jobs);
  Files files = example_spectra(o, "fig3", cfg, system, 0);
  const Files q = quadratic_terms(o, "fig3", cfg, system);
  files.insert(files.end(), q.begin(), q.end());
  return files;
}

Files fig4(const FigureOptions& o) {
  ScenarioConfig cfg = load_preset(o, "acoustic_reverb");
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header{"beta_s"};
  for (double beta : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    cfg.acoustic.room.reverberation_time = beta;
    const ExperimentResult r = run_experiment(cfg, o.jobs);
    if (header.size() == 1)
      for (const auto& l : r.labels) header.push_back("median_" + l);
    std::vector<double> row{beta};
    for (const auto& s : r.stats) row.push_back(s.median);
    rows.push_back(row);
  }
  const std::string path = out(o, "fig4_median_vs_beta.csv");
  write_table(path, header, rows);
  return {path};
}

Files fig9(const FigureOptions& o) {
  const ScenarioConfig cfg = load_preset(o, "rf_crb");
  std::size_t column = 0;
  for (std::size_t i = 0; i < cfg.beamformers.size(); ++i)
    if (cfg.beamformers[i].adapted && cfg.beamformers[i].kind == BeamformerKind::kDS) column = i;
  std::vector<std::vector<double>> rows;
  for (const auto& p : crb_study(cfg, {0.0, 10.0, 20.0, 30.0}, column, 20, 50, o.jobs))
    rows.push_back({p.snr_db, p.pooled_std, p.crb, p.median_error});
  const std::string path = out(o, "fig9_std_vs_crb.csv");
  write_table(path, {"snr_db", "std_deg", "crb_deg", "median_error_deg"}, rows);
  return {path};
}

Files fig11(const FigureOptions& o) {
  Files files;
  for (const char* name : {"rf_two_section", "rf_two_roi"}) {
    const ScenarioConfig cfg = load_preset(o, name);
    const TrainedSystem system = train_system(cfg, run_reference_phase(cfg), 0, o.jobs);
    const std::string prefix = std::string("fig11_") + name;
    const std::string path = out(o, prefix + "_induced.csv");
    write_spectrum_csv(induced_spectrum(system.map(MapVariant::kCoral), cfg.geometry(), cfg.grid), path);
    files.push_back(path);
    const Files ex = example_spectra(o, prefix, cfg, system, 0);
    files.insert(files.end(), ex.begin(), ex.end());
  }
  return files;
}

const std::map<std::string, std::function<Files(const FigureOptions&)>>& registry() {
  static const std::map<std::string, std::function<Files(const FigureOptions&)>> r = {
      {"fig1", fig1},
      {"fig3", fig3},
      {"fig4", fig4},
      {"fig5", [](const FigureOptions& o) { return experiment_files(o, "fig5", load_preset(o, "acoustic_sir-20")); }},
      {"fig6",
       [](const FigureOptions& o) {
         return experiment_files(o, "fig6", load_preset(o, "acoustic_interference_region"));
       }},
      {"fig7",
       [](const FigureOptions& o) {
         const ScenarioConfig cfg = load_preset(o, "rf_sir-20");
         return example_spectra(o, "fig7", cfg, train_system(cfg, run_reference_phase(cfg), 0, o.jobs), 0);
       }},
      {"fig8",
       [](const FigureOptions& o) {
         const ScenarioConfig cfg = load_preset(o, "rf_sir-20");
         return quadratic_terms(o, "fig8", cfg, train_system(cfg, run_reference_phase(cfg), 0, o.jobs));
       }},
      {"fig9", fig9},
      {"fig10", [](const FigureOptions& o) { return experiment_files(o, "fig10", load_preset(o, "rf_sir-20")); }},
      {"fig11", fig11},
      {"table1",
       [](const FigureOptions& o) {
         return summary_table(o, "table1_acoustic.csv", {"acoustic_sir-20", "acoustic_sir-10", "acoustic_sir0"});
       }},
      {"table2",
       [](const FigureOptions& o) { return summary_table(o, "table2_rf.csv", {"rf_sir-20", "rf_sir-10", "rf_sir0"}); }},
  };
  return r;
}

}  // namespace

std::vector<std::string> figure_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

ScenarioConfig load_preset(const FigureOptions& opts, const std::string& name) {
  ScenarioConfig cfg = load_config(join_path(opts.config_dir, name + ".toml"));
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.trials) cfg.trials = *opts.trials;
  validate_config(cfg);
  return cfg;
}

std::vector<std::string> run_figure(const std::string& name, const FigureOptions& opts) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) throw InvalidInput("unknown figure '" + name + "'");
  ensure_directory(opts.out_dir);
  return it->second(opts);
}

}  // namespace steerlab
