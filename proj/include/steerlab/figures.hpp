#pragma once

// Named reproductions that emit plot-ready CSV (and a small JSON of markers
// such as true directions) into an output directory.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "steerlab/config.hpp"

namespace steerlab {

struct FigureOptions {
  std::string config_dir;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::size_t jobs = 1;
};

std::vector<std::string> figure_names();

/// Loads <config_dir>/<name>.toml and applies the seed / trials overrides.
ScenarioConfig load_preset(const FigureOptions& opts, const std::string& name);

/// Returns the paths written. InvalidInput for an unknown name.
std::vector<std::string> run_figure(const std::string& name, const FigureOptions& opts);

}  // namespace steerlab
