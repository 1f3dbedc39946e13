#pragma once

// Received-signal synthesis: source waveforms, image-method room responses,
// free-space narrowband channels, mixing at prescribed SNR/SIR, and
// single-bin STFT snapshot extraction.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "steerlab/geometry.hpp"
#include "steerlab/linalg.hpp"

namespace steerlab {

struct RoomSpec {
  Vec3 dimensions;
  double reverberation_time = 0.0;  // seconds, 0 means anechoic
  double speed_of_sound = 340.0;
  std::size_t air_length = 2048;
};

void validate_room(const RoomSpec& room);

/// Uniform wall pressure reflection coefficient sqrt(1 - alpha) with the
/// Sabine absorption alpha = 24 ln(10) V / (c S T60); 0 when T60 is 0 or
/// too short for the room.
double reflection_coefficient(const RoomSpec& room);

/// Allen-Berkley image-method impulse response from source to mic.
/// Each image is a 1 / (4 pi d) scaled, 81-tap Hann-windowed sinc centred on
/// its fractional delay d / c * fs.
std::vector<double> image_method_air(const RoomSpec& room, const Vec3& source, const Vec3& mic,
                                     double fs);

struct Channel {
  enum class Kind { kFir, kNarrowband };
  Kind kind = Kind::kNarrowband;
  std::vector<std::vector<double>> fir;  // one tap list per element
  CVector gain;                          // one complex gain per element
};

/// Narrowband free-space gains a / r_m exp(-j 2 pi r_m / lambda).
Channel free_space_channel(const ArrayGeometry& geom, const Vec3& source, double amplitude = 1.0);

/// Per-element image-method channel.
Channel room_channel(const RoomSpec& room, const ArrayGeometry& geom, const Vec3& source, double fs);

/// L complex M-vectors stored as the columns of an M x L matrix.
struct SnapshotSet {
  CMatrix data;
  double bin_frequency = 0.0;

  std::size_t num_elements() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t num_snapshots() const { return static_cast<std::size_t>(data.cols()); }
};

struct TimeSignals {
  double fs = 0.0;
  std::vector<std::vector<double>> channels;
};

struct StftSpec {
  std::size_t window = 2048;
  std::size_t hop = 1024;
  std::size_t bin = 242;
};

std::size_t stft_frame_count(std::size_t signal_length, std::size_t window, std::size_t hop);

/// Rectangular-window STFT restricted to one (zero-based) bin.
SnapshotSet stft_bin(const TimeSignals& signals, std::size_t window, std::size_t hop,
                     std::size_t bin);

std::vector<double> gen_gaussian_signal(std::size_t len, std::mt19937_64& rng);
std::vector<Complex> gen_complex_gaussian_signal(std::size_t len, std::mt19937_64& rng);

struct NarrowbandModel {
  std::size_t snapshots = 100;
  double amplitude = 1.0;
};

struct AcousticModel {
  RoomSpec room;
  double fs = 12000.0;
  std::size_t signal_length = 30000;
  StftSpec stft;
};

using ChannelModel = std::variant<NarrowbandModel, AcousticModel>;

struct Emitter {
  Vec3 position = Vec3::Zero();
  double power = 1.0;             // transmitted signal variance
  std::optional<Channel> channel;  // overrides the model-derived channel
};

/// One transmission interval: who is active, through which channels, at what noise level.
struct Scene {
  ArrayGeometry geometry;
  ChannelModel model;
  std::vector<Emitter> desired;
  std::vector<Emitter> interferers;
  double snr_db = 20.0;
  bool add_noise = true;
  std::optional<double> noise_power;  // per element; derived from snr_db when absent
  /// Seeds the noise directly, so the noise can be redrawn with the source
  /// waveforms held fixed.
  std::optional<std::uint64_t> noise_seed;
};

/// Channel of an emitter in this scene (explicit override or model-derived).
/// ConfigError when an explicit channel does not fit the model or the array.
Channel emitter_channel(const Scene& scene, const Emitter& emitter);

/// Per-element direct-path received power of the first desired source
/// divided by the SNR, or the explicit noise_power. ConfigError if neither exists.
double scene_noise_power(const Scene& scene);

/// Signals of the k-th desired source, the i-th interferer and the noise use
/// independent streams derived from seed, so a scene split into parts sums
/// back to the full scene.
SnapshotSet synthesize_snapshots(const Scene& scene, std::uint64_t seed);

/// Time-domain per-element signals of an acoustic scene (direct convolution).
TimeSignals synthesize_time_domain(const Scene& scene, std::uint64_t seed);

/// Stream ids used for signal generation.
std::uint64_t desired_stream(std::size_t k);
std::uint64_t interferer_stream(std::size_t i);
std::uint64_t noise_stream();

void write_snapshots_csv(const SnapshotSet& snapshots, const std::string& path);
SnapshotSet read_snapshots_csv(const std::string& path);

}  // namespace steerlab
