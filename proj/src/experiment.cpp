#include "steerlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "steerlab/covariance.hpp"
#include "steerlab/error.hpp"
#include "steerlab/rng.hpp"

namespace steerlab {
namespace {

// Stream ids. Trial seeds are master ^ index, so every stream derived from a
// trial seed uses ids that no phase-level stream uses.
constexpr std::uint64_t kReferenceStream = 0x52ef0001;
constexpr std::uint64_t kDrawStreamBase = 0x44520000;
constexpr std::uint64_t kFixedInterfererStream = 1;
constexpr std::uint64_t kTransmissionStreamBase = 1000;
constexpr std::uint64_t kPositionStream = 0x7a000001;
constexpr std::uint64_t kSignalStream = 0x7a000002;
constexpr std::uint64_t kCrbPositionStream = 0x43520001;
constexpr std::uint64_t kCrbNoiseStream = 0x43520002;

std::uint64_t draw_seed(const ScenarioConfig& cfg, std::size_t draw) {
  return derive_seed(cfg.seed, kDrawStreamBase + draw);
}

Vec3 sample_one(const Region& region, std::mt19937_64& rng) { return sample_positions(region, 1, rng).front(); }

std::vector<Vec3> sample_some(const Region& region, std::size_t n, std::mt19937_64& rng) {
  if (n == 0) return {};
  return sample_positions(region, n, rng);
}

Scene make_scene(const ScenarioConfig& cfg, const ArrayGeometry& geom, const std::optional<Vec3>& desired,
                 const std::vector<Vec3>& interferers) {
  Scene s{geom, cfg.channel_model(), {}, {}, cfg.snr_db, true, std::nullopt, std::nullopt};
  if (desired) s.desired.push_back(Emitter{*desired, 1.0, std::nullopt});
  const double pi = cfg.interferer_power();
  for (const auto& p : interferers) s.interferers.push_back(Emitter{p, pi, std::nullopt});
  return s;
}

std::size_t snapshot_count(const ScenarioConfig& cfg) {
  if (cfg.channel == ChannelKind::kRfFreeSpace) return cfg.rf.snapshots;
  return stft_frame_count(cfg.acoustic.signal_length, cfg.acoustic.stft.window, cfg.acoustic.stft.hop);
}

}  // namespace

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  if (jobs <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t threads = std::min(jobs, n);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ReferenceResult run_reference_phase(const ScenarioConfig& cfg) {
  const ArrayGeometry geom = cfg.geometry();
  auto rng = make_rng(derive_seed(cfg.seed, kReferenceStream));
  ReferenceResult out{HermitianMatrix::zero(geom.size()), std::nullopt, sample_positions(cfg.reference(), cfg.n_s, rng)};
  const bool inverse = cfg.uses_variant(MapVariant::kInverseDomainCoral);
  CorrelationAccumulator acc, inv_acc;
  for (const auto& p : out.positions) {
    const auto r = reference_correlation(simulated_steering_vector(geom, p), cfg.eps);
    acc.add(r);
    if (inverse) inv_acc.add(invert_hpd(r));
  }
  out.sigma_s = acc.mean();
  if (inverse) out.sigma_s_inverse_mean = inv_acc.mean();
  return out;
}

std::vector<Vec3> fixed_interferer_positions(const ScenarioConfig& cfg, std::size_t draw) {
  if (cfg.interferer_mode != InterfererMode::kFixed) return {};
  auto rng = make_rng(derive_seed(draw_seed(cfg, draw), kFixedInterfererStream));
  return sample_some(cfg.interference(), cfg.interferers_operational, rng);
}

AdaptationResult run_adaptation_phase(const ScenarioConfig& cfg, std::size_t draw, std::size_t jobs) {
  const ArrayGeometry geom = cfg.geometry();
  const std::uint64_t dseed = draw_seed(cfg, draw);
  const bool inverse = cfg.uses_variant(MapVariant::kInverseDomainCoral);

  AdaptationResult out{HermitianMatrix::zero(geom.size()), std::nullopt, fixed_interferer_positions(cfg, draw), {}, {}};
  out.transmissions.resize(cfg.n_a);
  out.noise_powers.resize(cfg.n_a);
  std::vector<HermitianMatrix> sigmas(cfg.n_a, HermitianMatrix::zero(geom.size()));
  std::vector<HermitianMatrix> inverses(inverse ? cfg.n_a : 0, HermitianMatrix::zero(geom.size()));

  parallel_for(cfg.n_a, jobs, [&](std::size_t j) {
    const std::uint64_t tseed = derive_seed(dseed, kTransmissionStreamBase + j);
    auto rng = make_rng(derive_seed(tseed, 1));
    Transmission t;
    const Vec3 desired = sample_one(cfg.roi, rng);
    t.interferers = cfg.interferer_mode == InterfererMode::kFixed
                        ? out.fixed_interferers
                        : sample_some(cfg.interference(), cfg.interferers_adaptation, rng);
    Scene scene = make_scene(cfg, geom, desired, t.interferers);
    // Without a desired source the noise level still follows the SNR of a
    // typical ROI transmission.
    scene.noise_power = scene_noise_power(scene);
    if (cfg.desired_in_adaptation) {
      t.desired = desired;
    } else {
      scene.desired.clear();
    }
    out.noise_powers[j] = *scene.noise_power;
    sigmas[j] = sample_correlation(synthesize_snapshots(scene, derive_seed(tseed, 2)));
    if (inverse) inverses[j] = invert_hpd(regularize(sigmas[j], cfg.eps));
    out.transmissions[j] = std::move(t);
  });

  CorrelationAccumulator acc, inv_acc;
  for (const auto& s : sigmas) acc.add(s);
  for (const auto& s : inverses) inv_acc.add(s);
  out.sigma_a = acc.mean();
  if (inverse) out.sigma_a_inverse_mean = inv_acc.mean();
  return out;
}

HermitianMatrix population_adaptation_correlation(const ScenarioConfig& cfg, const AdaptationResult& adaptation) {
  if (cfg.channel != ChannelKind::kRfFreeSpace)
    throw ConfigError("population correlation: defined for free-space narrowband scenes only");
  const ArrayGeometry geom = cfg.geometry();
  const auto m = static_cast<Eigen::Index>(geom.size());
  CMatrix sum = CMatrix::Zero(m, m);
  for (std::size_t j = 0; j < adaptation.transmissions.size(); ++j) {
    const auto& t = adaptation.transmissions[j];
    if (t.desired) {
      const CVector h = free_space_channel(geom, *t.desired, cfg.rf.amplitude).gain;
      sum += h * h.adjoint();
    }
    for (const auto& p : t.interferers) {
      const CVector g = free_space_channel(geom, p, cfg.rf.amplitude).gain;
      sum += cfg.interferer_power() * (g * g.adjoint());
    }
    sum += adaptation.noise_powers[j] * CMatrix::Identity(m, m);
  }
  return HermitianMatrix::symmetrize(sum / static_cast<double>(adaptation.transmissions.size()));
}

const AdaptationMap& TrainedSystem::map(MapVariant v) const {
  const std::optional<AdaptationMap>* m = &coral;
  if (v == MapVariant::kParallelTransport) m = &parallel_transport;
  if (v == MapVariant::kInverseDomainCoral) m = &inverse_domain;
  if (!*m) throw InvalidInput("trained system: map variant " + std::string(to_string(v)) + " was not fitted");
  return **m;
}

TrainedSystem train_system(const ScenarioConfig& cfg, const ReferenceResult& reference, std::size_t draw,
                           std::size_t jobs) {
  TrainedSystem s{reference, run_adaptation_phase(cfg, draw, jobs), std::nullopt, std::nullopt, std::nullopt};
  const HermitianMatrix sigma_a = regularize(s.adaptation.sigma_a, cfg.eps);
  s.coral = fit_map(reference.sigma_s, sigma_a, MapVariant::kCoral);
  if (cfg.uses_variant(MapVariant::kParallelTransport))
    s.parallel_transport = fit_map(reference.sigma_s, sigma_a, MapVariant::kParallelTransport);
  if (cfg.uses_variant(MapVariant::kInverseDomainCoral)) {
    if (!reference.sigma_s_inverse_mean || !s.adaptation.sigma_a_inverse_mean)
      throw InvalidInput("train_system: inverse-domain map needs inverted correlation means");
    s.inverse_domain = fit_map(*reference.sigma_s_inverse_mean, *s.adaptation.sigma_a_inverse_mean,
                               MapVariant::kInverseDomainCoral);
  }
  return s;
}

std::vector<BeamformerOutput> evaluate_beamformers(const ScenarioConfig& cfg, const TrainedSystem& system,
                                                   const SteeringTable& table, const SnapshotSet& snapshots,
                                                   std::size_t active_interferers) {
  const ArrayGeometry geom = cfg.geometry();
  const std::size_t m = geom.size();
  const HermitianMatrix sigma = sample_correlation(snapshots);
  std::optional<HermitianMatrix> regularized, inverse;
  std::optional<HermitianMatrix> adapted[3];
  auto reg = [&]() -> const HermitianMatrix& {
    if (!regularized) regularized = regularize(sigma, cfg.eps);
    return *regularized;
  };
  auto adapted_for = [&](MapVariant v) -> const HermitianMatrix& {
    auto& slot = adapted[static_cast<int>(v)];
    if (!slot) {
      if (v == MapVariant::kInverseDomainCoral) {
        slot = adapt_covariance(system.map(v), invert_hpd(reg()));
      } else {
        slot = adapt_covariance(system.map(v), sigma);
      }
    }
    return *slot;
  };

  std::vector<BeamformerOutput> out;
  out.reserve(cfg.beamformers.size());
  for (const auto& b : cfg.beamformers) {
    std::optional<SpectrumFunction> fn;
    if (!b.adapted) {
      switch (b.kind) {
        case BeamformerKind::kDS: fn = SpectrumFunction::ds(sigma, geom); break;
        case BeamformerKind::kMVDR: fn = SpectrumFunction::mvdr(reg(), geom); break;
        case BeamformerKind::kMUSIC:
          fn = SpectrumFunction::music(sigma, geom, b.signal_dim.value_or(std::min(1 + active_interferers, m - 1)));
          break;
      }
    } else if (b.variant == MapVariant::kInverseDomainCoral) {
      fn = SpectrumFunction::mvdr(adapted_for(b.variant), geom, true);
    } else {
      const HermitianMatrix& a = adapted_for(b.variant);
      switch (b.kind) {
        case BeamformerKind::kDS: fn = SpectrumFunction::ds(a, geom); break;
        case BeamformerKind::kMVDR: fn = SpectrumFunction::mvdr(regularize(a, cfg.eps), geom); break;
        case BeamformerKind::kMUSIC: fn = SpectrumFunction::music(a, geom, b.signal_dim.value_or(1)); break;
      }
    }
    double est = estimate_doa(fn->evaluate(table));
    if (cfg.refine) est = refine_doa(*fn, est, table.grid().step_deg);
    out.push_back(BeamformerOutput{b.label, std::move(*fn), est});
  }
  return out;
}

TrialScene make_trial_scene(const ScenarioConfig& cfg, const TrainedSystem& system, std::size_t global_index) {
  const ArrayGeometry geom = cfg.geometry();
  const std::uint64_t ts = trial_seed(cfg.seed, global_index);
  auto rng = make_rng(derive_seed(ts, kPositionStream));
  const Vec3 desired = sample_one(cfg.roi, rng);
  const std::vector<Vec3> interferers = cfg.interferer_mode == InterfererMode::kFixed
                                            ? system.adaptation.fixed_interferers
                                            : sample_some(cfg.interference(), cfg.interferers_operational, rng);
  return TrialScene{make_scene(cfg, geom, desired, interferers), derive_seed(ts, kSignalStream),
                    true_doa(geom, desired)};
}

TrialResult run_trial(const ScenarioConfig& cfg, const TrainedSystem& system, const SteeringTable& table,
                      std::size_t global_index) {
  const TrialScene ts = make_trial_scene(cfg, system, global_index);
  const SnapshotSet snaps = synthesize_snapshots(ts.scene, ts.signal_seed);
  const auto outputs = evaluate_beamformers(cfg, system, table, snaps, ts.scene.interferers.size());
  TrialResult r;
  r.index = global_index;
  r.draw = global_index / cfg.trials;
  r.true_theta = ts.true_theta;
  for (const auto& o : outputs) {
    r.estimates.push_back(o.estimate);
    r.errors.push_back(std::abs(o.estimate - ts.true_theta));
  }
  return r;
}

std::vector<TrialResult> run_operational_trials(const ScenarioConfig& cfg, const TrainedSystem& system,
                                                std::size_t first, std::size_t count, std::size_t jobs) {
  const SteeringTable table(cfg.geometry(), cfg.grid);
  std::vector<TrialResult> out(count);
  parallel_for(count, jobs, [&](std::size_t i) { out[i] = run_trial(cfg, system, table, first + i); });
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidInput("percentile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SummaryStats summarize_errors(const std::vector<double>& signed_errors) {
  if (signed_errors.empty()) throw InvalidInput("summarize: no results");
  SummaryStats s;
  s.count = signed_errors.size();
  std::vector<double> abs_err;
  double sum = 0.0, sq = 0.0;
  for (double e : signed_errors) {
    abs_err.push_back(std::abs(e));
    sum += e;
    sq += e * e;
  }
  const double n = static_cast<double>(s.count);
  s.median = percentile(abs_err, 0.5);
  s.iqr = percentile(abs_err, 0.75) - percentile(abs_err, 0.25);
  s.rmse = std::sqrt(sq / n);
  s.bias = sum / n;
  double var = 0.0;
  for (double e : signed_errors) var += (e - s.bias) * (e - s.bias);
  s.std = std::sqrt(var / n);
  return s;
}

SummaryStats summarize(const std::vector<TrialResult>& results, std::size_t column) {
  std::vector<double> e;
  e.reserve(results.size());
  for (const auto& r : results) {
    if (column >= r.estimates.size()) throw InvalidInput("summarize: beamformer column out of range");
    e.push_back(r.estimates[column] - r.true_theta);
  }
  return summarize_errors(e);
}

ExperimentResult run_experiment(const ScenarioConfig& cfg, std::size_t jobs) {
  validate_config(cfg);
  ExperimentResult out;
  for (const auto& b : cfg.beamformers) out.labels.push_back(b.label);
  out.reference = run_reference_phase(cfg);
  for (std::size_t d = 0; d < cfg.interferer_draws; ++d) {
    const TrainedSystem system = train_system(cfg, out.reference, d, jobs);
    auto trials = run_operational_trials(cfg, system, d * cfg.trials, cfg.trials, jobs);
    out.trials.insert(out.trials.end(), trials.begin(), trials.end());
  }
  for (std::size_t c = 0; c < out.labels.size(); ++c) out.stats.push_back(summarize(out.trials, c));
  return out;
}

double crb_single_source(const ArrayGeometry& geom, double snr_db, std::size_t snapshots, double theta_deg) {
  if (snapshots < 1) throw InvalidInput("crb: need at least one snapshot");
  if (!std::isfinite(snr_db)) throw InvalidInput("crb: snr must be finite");
  double mean_x = 0.0;
  for (const auto& p : geom.elements()) mean_x += p.x();
  mean_x /= static_cast<double>(geom.size());
  double spread = 0.0;
  for (const auto& p : geom.elements()) spread += (p.x() - mean_x) * (p.x() - mean_x);
  const double s = std::sin(deg2rad(theta_deg));
  const double snr = std::pow(10.0, snr_db / 10.0);
  const double denom = 2.0 * static_cast<double>(snapshots) * snr * s * s * spread;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  const double k = geom.wavelength() / (2.0 * kPi);
  return rad2deg(std::sqrt(k * k / denom));
}

std::vector<OutputSirPoint> theoretic_output_sir(const OutputSirSetup& setup) {
  const ArrayGeometry geom = ArrayGeometry::uniform_linear(setup.num_elements, 0.5, 1.0);
  const auto m = static_cast<Eigen::Index>(setup.num_elements);
  const double noise = std::pow(10.0, -setup.snr_db / 10.0);
  // Area-uniform sector positions give angles uniform over the intervals.
  const Region roi = SectorRegion{Vec3::Zero(), setup.roi, 1.0, 2.0};
  auto rng = make_rng(derive_seed(setup.seed, kReferenceStream));

  CorrelationAccumulator sigma_s;
  for (const auto& p : sample_positions(roi, setup.n_s, rng))
    sigma_s.add(reference_correlation(steering_vector(geom, doa_from(Vec3::Zero(), p)), setup.eps));

  CMatrix interference = noise * CMatrix::Identity(m, m);
  for (double th : setup.interferer_angles) {
    const CVector d = steering_vector(geom, th);
    interference += d * d.adjoint();
  }
  CMatrix sigma_a = interference;
  CMatrix desired = CMatrix::Zero(m, m);
  for (const auto& p : sample_positions(roi, setup.n_a, rng)) {
    const CVector d = steering_vector(geom, doa_from(Vec3::Zero(), p));
    desired += d * d.adjoint();
  }
  sigma_a += desired / static_cast<double>(setup.n_a);

  const HermitianMatrix ss = sigma_s.mean();
  const HermitianMatrix sa = HermitianMatrix::symmetrize(sigma_a);
  const AdaptationMap coral = fit_map(ss, sa, MapVariant::kCoral);
  const AdaptationMap pt = fit_map(ss, sa, MapVariant::kParallelTransport);

  auto sir = [&](const HermitianMatrix& sigma, double theta_s) {
    const auto p = SpectrumFunction::ds(sigma, geom);
    double worst = std::numeric_limits<double>::infinity();
    for (double th : setup.interferer_angles) worst = std::min(worst, output_sir_db(p, theta_s, th));
    return worst;
  };

  std::vector<OutputSirPoint> out;
  for (double theta_s : setup.desired_angles.angles()) {
    const CVector d = steering_vector(geom, theta_s);
    const HermitianMatrix sigma = HermitianMatrix::symmetrize(d * d.adjoint() + interference);
    out.push_back(OutputSirPoint{theta_s, sir(sigma, theta_s), sir(adapt_covariance(coral, sigma), theta_s),
                                 sir(adapt_covariance(pt, sigma), theta_s)});
  }
  return out;
}

std::vector<CrbStudyPoint> crb_study(const ScenarioConfig& cfg, const std::vector<double>& snrs_db, std::size_t column,
                                     std::size_t positions, std::size_t realizations, std::size_t jobs) {
  if (column >= cfg.beamformers.size()) throw InvalidInput("crb_study: beamformer column out of range");
  if (positions < 1 || realizations < 2) throw InvalidInput("crb_study: need >= 1 position and >= 2 realizations");
  const ArrayGeometry geom = cfg.geometry();
  const TrainedSystem system = train_system(cfg, run_reference_phase(cfg), 0, jobs);
  const SteeringTable table(geom, cfg.grid);
  auto rng = make_rng(derive_seed(cfg.seed, kCrbPositionStream));
  const auto desired = sample_positions(cfg.roi, positions, rng);
  const std::size_t l = snapshot_count(cfg);

  std::vector<CrbStudyPoint> out;
  for (std::size_t si = 0; si < snrs_db.size(); ++si) {
    ScenarioConfig local = cfg;
    local.snr_db = snrs_db[si];
    std::vector<double> signed_err(positions * realizations);
    parallel_for(signed_err.size(), jobs, [&](std::size_t idx) {
      // Source positions and waveforms are fixed per position; only the noise is redrawn.
      const std::size_t p = idx / realizations;
      const std::uint64_t signal_seed = derive_seed(derive_seed(cfg.seed, kCrbPositionStream), p);
      auto prng = make_rng(derive_seed(signal_seed, kPositionStream));
      const std::vector<Vec3> interferers =
          cfg.interferer_mode == InterfererMode::kFixed
              ? system.adaptation.fixed_interferers
              : sample_some(cfg.interference(), cfg.interferers_operational, prng);
      Scene scene = make_scene(local, geom, desired[p], interferers);
      scene.noise_seed = derive_seed(derive_seed(cfg.seed, kCrbNoiseStream + si), idx);
      const auto outputs =
          evaluate_beamformers(local, system, table, synthesize_snapshots(scene, signal_seed), interferers.size());
      signed_err[idx] = outputs[column].estimate - true_doa(geom, desired[p]);
    });

    CrbStudyPoint pt;
    pt.snr_db = snrs_db[si];
    double pooled = 0.0, crb_sq = 0.0;
    std::vector<double> abs_err;
    for (std::size_t p = 0; p < positions; ++p) {
      double mean = 0.0;
      for (std::size_t r = 0; r < realizations; ++r) mean += signed_err[p * realizations + r];
      mean /= static_cast<double>(realizations);
      double var = 0.0;
      for (std::size_t r = 0; r < realizations; ++r) {
        const double e = signed_err[p * realizations + r];
        var += (e - mean) * (e - mean);
        abs_err.push_back(std::abs(e));
      }
      pooled += var / static_cast<double>(realizations - 1);
      const double c = crb_single_source(geom, local.snr_db, l, true_doa(geom, desired[p]));
      crb_sq += c * c;
    }
    pt.pooled_std = std::sqrt(pooled / static_cast<double>(positions));
    pt.crb = std::sqrt(crb_sq / static_cast<double>(positions));
    pt.median_error = percentile(abs_err, 0.5);
    out.push_back(pt);
  }
  return out;
}

}  // namespace steerlab
