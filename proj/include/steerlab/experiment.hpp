#pragma once

// Three-phase protocol: reference generation before deployment, adaptation
// after deployment, then operational Monte-Carlo trials.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "steerlab/adaptation.hpp"
#include "steerlab/beamforming.hpp"
#include "steerlab/config.hpp"
#include "steerlab/scene.hpp"

namespace steerlab {

/// Runs body(i) for i in [0, n) on `jobs` threads. body must write only to
/// slot i of its outputs. The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

struct ReferenceResult {
  HermitianMatrix sigma_s = HermitianMatrix::zero(1);
  /// Mean of the inverted reference correlations (inverse-domain map only).
  std::optional<HermitianMatrix> sigma_s_inverse_mean;
  std::vector<Vec3> positions;
};

/// Uses only simulated free-space steering vectors; depends on the seed, the
/// array, the reference region and eps, never on SNR, SIR or received data.
ReferenceResult run_reference_phase(const ScenarioConfig& cfg);

struct Transmission {
  std::optional<Vec3> desired;
  std::vector<Vec3> interferers;
};

struct AdaptationResult {
  HermitianMatrix sigma_a = HermitianMatrix::zero(1);
  std::optional<HermitianMatrix> sigma_a_inverse_mean;
  std::vector<Vec3> fixed_interferers;  // empty in per-transmission mode
  std::vector<Transmission> transmissions;
  std::vector<double> noise_powers;
};

/// Positions of the interferers that stay active through a whole draw.
std::vector<Vec3> fixed_interferer_positions(const ScenarioConfig& cfg, std::size_t draw);

AdaptationResult run_adaptation_phase(const ScenarioConfig& cfg, std::size_t draw, std::size_t jobs = 1);

/// (1/N_A) sum_j [P_d h_j h_j^H + sum_i P_i g_ij g_ij^H + sigma_v,j^2 I] for
/// the transmissions recorded in an adaptation run, over free-space
/// narrowband channels. Scaled by the per-snapshot signal power, so it is the
/// expected value of sigma_a.
HermitianMatrix population_adaptation_correlation(const ScenarioConfig& cfg, const AdaptationResult& adaptation);

/// Everything the operational phase needs for one interferer draw.
struct TrainedSystem {
  ReferenceResult reference;
  AdaptationResult adaptation;
  std::optional<AdaptationMap> coral;
  std::optional<AdaptationMap> parallel_transport;
  std::optional<AdaptationMap> inverse_domain;

  const AdaptationMap& map(MapVariant v) const;
};

/// Fits the maps needed by the configured beamformers (coral is always fitted).
TrainedSystem train_system(const ScenarioConfig& cfg, const ReferenceResult& reference, std::size_t draw,
                           std::size_t jobs = 1);

struct BeamformerOutput {
  std::string label;
  SpectrumFunction function;
  double estimate;
};

/// Evaluates every configured beamformer on one snapshot set.
/// `active_interferers` sets the baseline MUSIC signal dimension (1 + count).
std::vector<BeamformerOutput> evaluate_beamformers(const ScenarioConfig& cfg, const TrainedSystem& system,
                                                   const SteeringTable& table, const SnapshotSet& snapshots,
                                                   std::size_t active_interferers);

/// The operational scene of one trial.
struct TrialScene {
  Scene scene;
  std::uint64_t signal_seed = 0;
  double true_theta = 0.0;
};
TrialScene make_trial_scene(const ScenarioConfig& cfg, const TrainedSystem& system, std::size_t global_index);

struct TrialResult {
  std::size_t index = 0;
  std::size_t draw = 0;
  double true_theta = 0.0;
  std::vector<double> estimates;  // one per configured beamformer, in config order
  std::vector<double> errors;     // |estimate - true_theta|
};

TrialResult run_trial(const ScenarioConfig& cfg, const TrainedSystem& system, const SteeringTable& table,
                      std::size_t global_index);

/// Trials [first, first + count) of one draw, in index order.
std::vector<TrialResult> run_operational_trials(const ScenarioConfig& cfg, const TrainedSystem& system,
                                                std::size_t first, std::size_t count, std::size_t jobs = 1);

struct SummaryStats {
  double median = 0.0;  // of |error|
  double iqr = 0.0;     // of |error|
  double rmse = 0.0;
  double std = 0.0;     // population std of the signed errors
  double bias = 0.0;    // mean signed error
  std::size_t count = 0;
};

/// InvalidInput on an empty list.
SummaryStats summarize_errors(const std::vector<double>& signed_errors);
/// Statistics of beamformer `column` (config order). InvalidInput on an empty list.
SummaryStats summarize(const std::vector<TrialResult>& results, std::size_t column);

/// Linear-interpolation percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

struct ExperimentResult {
  std::vector<std::string> labels;
  std::vector<TrialResult> trials;  // all draws, ordered by index
  std::vector<SummaryStats> stats;  // one per label
  ReferenceResult reference;
};

/// interferer_draws x trials operational trials, draw d covering global
/// indices [d * trials, (d + 1) * trials).
ExperimentResult run_experiment(const ScenarioConfig& cfg, std::size_t jobs = 1);

/// Single far-field source, deterministic CRB std in degrees for an x-axis
/// linear array: var = (lambda / 2 pi)^2 / (2 L snr sin^2(theta) sum (x - mean x)^2)
/// with theta measured from the array axis. Infinite at endfire.
double crb_single_source(const ArrayGeometry& geom, double snr_db, std::size_t snapshots, double theta_deg);

/// Theoretic output SIR of the adapted DS beamformer for equal-power,
/// anechoic, far-field desired and interfering sources.
struct OutputSirSetup {
  std::size_t num_elements = 9;
  DirectionGrid desired_angles{40.0, 140.0, 10.0};
  std::vector<double> interferer_angles{30.0};
  std::vector<AngleInterval> roi{{30.0, 150.0}};
  std::size_t n_s = 100;
  std::size_t n_a = 100;
  double snr_db = 20.0;
  double eps = 1e-7;
  std::uint64_t seed = 1;
};

struct OutputSirPoint {
  double theta_s = 0.0;
  double baseline_db = 0.0;
  double coral_db = 0.0;
  double pt_db = 0.0;
};

/// SIR = P(theta_s) / max_i P(theta_i) for Sigma = d_S d_S^H + sum_i d_i d_i^H + sigma_v^2 I.
std::vector<OutputSirPoint> theoretic_output_sir(const OutputSirSetup& setup);

/// Noise study for the CRB comparison. The map is fitted once at the config
/// SNR. Source positions and waveforms are fixed per position (the bound
/// treats them as deterministic) and only the noise is redrawn; the std is
/// pooled within positions.
struct CrbStudyPoint {
  double snr_db = 0.0;
  double pooled_std = 0.0;  // degrees
  double crb = 0.0;         // RMS of the bound over the positions, degrees
  double median_error = 0.0;
};
std::vector<CrbStudyPoint> crb_study(const ScenarioConfig& cfg, const std::vector<double>& snrs_db, std::size_t column,
                                     std::size_t positions, std::size_t realizations, std::size_t jobs = 1);

}  // namespace steerlab
