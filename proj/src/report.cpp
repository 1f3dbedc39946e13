#include "steerlab/report.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>

#include "steerlab/error.hpp"
#include "steerlab/io.hpp"

namespace steerlab {

nlohmann::json stats_to_json(const SummaryStats& s) {
  return {{"median", s.median}, {"iqr", s.iqr}, {"rmse", s.rmse}, {"std", s.std}, {"bias", s.bias}, {"count", s.count}};
}

nlohmann::json experiment_stats_json(const ScenarioConfig& cfg, const ExperimentResult& result) {
  nlohmann::json bf = nlohmann::json::object();
  for (std::size_t i = 0; i < result.labels.size(); ++i) bf[result.labels[i]] = stats_to_json(result.stats[i]);
  return {{"config", cfg.name},
          {"seed", cfg.seed},
          {"trials", result.trials.size()},
          {"interferer_draws", cfg.interferer_draws},
          {"beamformers", bf}};
}

void write_trials_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  os << "trial,draw,true_theta";
  for (const auto& l : result.labels) os << ",est_" << l;
  for (const auto& l : result.labels) os << ",err_" << l;
  os << "\n" << std::setprecision(10);
  for (const auto& t : result.trials) {
    os << t.index << "," << t.draw << "," << t.true_theta;
    for (double e : t.estimates) os << "," << e;
    for (double e : t.errors) os << "," << e;
    os << "\n";
  }
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void write_experiment_outputs(const ScenarioConfig& cfg, const ExperimentResult& result, const std::string& dir) {
  ensure_directory(dir);
  write_json(experiment_stats_json(cfg, result), join_path(dir, "stats.json"));
  write_trials_csv(result, join_path(dir, "trials.csv"));
}

}  // namespace steerlab
