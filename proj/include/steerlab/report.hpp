#pragma once

// Result files of an experiment run.
//
// trials.csv: trial,draw,true_theta,est_<label>...,err_<label>...
// stats.json: {"config": name, "trials": n, "beamformers": {label: {median, iqr, rmse, std, bias, count}}}

#include <string>

#include "json.hpp"

#include "steerlab/experiment.hpp"

namespace steerlab {

nlohmann::json stats_to_json(const SummaryStats& s);
nlohmann::json experiment_stats_json(const ScenarioConfig& cfg, const ExperimentResult& result);
void write_trials_csv(const ExperimentResult& result, const std::string& path);

/// Writes stats.json and trials.csv into dir (created when missing).
void write_experiment_outputs(const ScenarioConfig& cfg, const ExperimentResult& result, const std::string& dir);

/// Creates a directory and its parents; InvalidInput on failure.
void ensure_directory(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& file);

}  // namespace steerlab
