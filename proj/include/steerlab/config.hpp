#pragma once

// Scenario configuration (TOML, schema = 1). See README.md for the schema.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "steerlab/adaptation.hpp"
#include "steerlab/beamforming.hpp"
#include "steerlab/geometry.hpp"
#include "steerlab/scene.hpp"

namespace steerlab {

enum class ChannelKind { kRfFreeSpace, kAcousticImageMethod };

/// kFixed: interferer positions are drawn once per interferer draw and stay
/// active through adaptation and operation. kPerTransmission: every
/// transmission draws fresh interferer positions.
enum class InterfererMode { kFixed, kPerTransmission };

struct BeamformerSpec {
  std::string label;
  BeamformerKind kind = BeamformerKind::kDS;
  bool adapted = false;
  MapVariant variant = MapVariant::kCoral;
  std::optional<std::size_t> signal_dim;  // MUSIC only
};

struct RfSpec {
  double frequency_hz = 2.4e9;
  double propagation_speed = 3e8;
  std::size_t snapshots = 100;
  double amplitude = 1.0;
};

struct ScenarioConfig {
  std::string name;
  ChannelKind channel = ChannelKind::kRfFreeSpace;

  std::size_t num_elements = 9;
  double spacing = 0.0625;
  Vec3 array_origin = Vec3::Zero();

  RfSpec rf;
  AcousticModel acoustic;

  Region roi = SectorRegion{Vec3::Zero(), {{30.0, 150.0}}, 100.0, 250.0};
  std::optional<Region> reference_region;     // defaults to roi
  std::optional<Region> interference_region;  // defaults to roi

  double snr_db = 20.0;
  double sir_db = 0.0;
  double eps = 1e-7;
  std::size_t n_s = 200;
  std::size_t n_a = 100;
  std::size_t trials = 300;
  std::size_t interferer_draws = 1;
  InterfererMode interferer_mode = InterfererMode::kFixed;
  std::size_t interferers_adaptation = 1;
  std::size_t interferers_operational = 1;
  bool desired_in_adaptation = true;

  DirectionGrid grid;
  bool refine = false;
  std::vector<BeamformerSpec> beamformers;
  std::uint64_t seed = 1;

  ArrayGeometry geometry() const;
  /// RF: c / f. Acoustic: c / bin frequency.
  double wavelength() const;
  ChannelModel channel_model() const;
  const Region& reference() const { return reference_region ? *reference_region : roi; }
  const Region& interference() const { return interference_region ? *interference_region : roi; }
  /// Transmitted interferer power relative to a unit-power desired source.
  double interferer_power() const;
  bool uses_variant(MapVariant v) const;
};

/// Three baselines followed by three adapted beamformers (coral map).
std::vector<BeamformerSpec> default_beamformers();

/// ConfigError with "<source>:<line>:<col>: <field>: <problem>" diagnostics.
ScenarioConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
ScenarioConfig load_config(const std::string& path);

/// Checks cross-field invariants; ConfigError on violation.
void validate_config(const ScenarioConfig& cfg);

}  // namespace steerlab
