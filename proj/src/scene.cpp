#include "steerlab/scene.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "steerlab/error.hpp"
#include "steerlab/rng.hpp"

namespace steerlab {
namespace {

bool is_acoustic(const Scene& scene) { return std::holds_alternative<AcousticModel>(scene.model); }

double snr_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

// Single-bin DFT kernel exp(-j 2 pi bin n / window), tabulated over one window.
std::vector<Complex> bin_kernel(std::size_t window, std::size_t bin) {
  std::vector<Complex> w(window);
  for (std::size_t n = 0; n < window; ++n) {
    const double ph = -2.0 * kPi * static_cast<double>((bin * n) % window) / static_cast<double>(window);
    w[n] = std::polar(1.0, ph);
  }
  return w;
}

// X(t) = sum_{n<window} s(t + n) w^n for t in [t_lo, t_hi], s zero outside its support.
// Runs the sliding-DFT recursion downward from t_hi and resynchronises periodically.
std::vector<Complex> sliding_bin(const std::vector<double>& s, long t_lo, long t_hi,
                                 const std::vector<Complex>& kernel) {
  const long window = static_cast<long>(kernel.size());
  const long n_sig = static_cast<long>(s.size());
  auto sample = [&](long i) { return (i >= 0 && i < n_sig) ? s[static_cast<std::size_t>(i)] : 0.0; };
  auto direct = [&](long t) {
    Complex acc = 0.0;
    const long n0 = std::max(0L, -t);
    const long n1 = std::min(window, n_sig - t);
    for (long n = n0; n < n1; ++n) acc += s[static_cast<std::size_t>(t + n)] * kernel[static_cast<std::size_t>(n)];
    return acc;
  };
  const Complex step = kernel.size() > 1 ? kernel[1] : Complex(1.0);
  std::vector<Complex> out(static_cast<std::size_t>(t_hi - t_lo + 1));
  Complex x = direct(t_hi);
  out.back() = x;
  constexpr long kResync = 2048;
  for (long t = t_hi; t > t_lo; --t) {
    const long tn = t - 1;
    if ((t_hi - tn) % kResync == 0) {
      x = direct(tn);
    } else {
      // X(t-1) = s(t-1) + w X(t) - s(t + window - 1), using w^window = 1.
      x = sample(tn) + step * x - sample(t + window - 1);
    }
    out[static_cast<std::size_t>(tn - t_lo)] = x;
  }
  return out;
}

std::vector<double> convolve_truncated(const std::vector<double>& s, const std::vector<double>& h) {
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t n = 0; n < s.size(); ++n) {
    double acc = 0.0;
    const std::size_t kmax = std::min(h.size(), n + 1);
    for (std::size_t k = 0; k < kmax; ++k) acc += h[k] * s[n - k];
    out[n] = acc;
  }
  return out;
}

struct ActiveEmitter {
  const Emitter* emitter;
  std::uint64_t stream;
};

std::vector<ActiveEmitter> active_emitters(const Scene& scene) {
  std::vector<ActiveEmitter> out;
  for (std::size_t k = 0; k < scene.desired.size(); ++k) out.push_back({&scene.desired[k], desired_stream(k)});
  for (std::size_t i = 0; i < scene.interferers.size(); ++i)
    out.push_back({&scene.interferers[i], interferer_stream(i)});
  return out;
}

}  // namespace

std::uint64_t desired_stream(std::size_t k) { return 1 + k; }
std::uint64_t interferer_stream(std::size_t i) { return 1000 + i; }
std::uint64_t noise_stream() { return 999999; }

Channel free_space_channel(const ArrayGeometry& geom, const Vec3& source, double amplitude) {
  Channel ch;
  ch.kind = Channel::Kind::kNarrowband;
  ch.gain = amplitude * simulated_steering_vector(geom, source);
  return ch;
}

std::size_t stft_frame_count(std::size_t signal_length, std::size_t window, std::size_t hop) {
  if (window == 0 || hop == 0) throw InvalidInput("stft: window and hop must be positive");
  if (window > signal_length) throw InvalidInput("stft: window longer than the signal");
  return (signal_length - window) / hop + 1;
}

SnapshotSet stft_bin(const TimeSignals& signals, std::size_t window, std::size_t hop,
                     std::size_t bin) {
  if (signals.channels.empty()) throw InvalidInput("stft_bin: no channels");
  if (bin >= window) throw InvalidInput("stft_bin: bin index out of range");
  const std::size_t n = signals.channels.front().size();
  for (const auto& ch : signals.channels)
    if (ch.size() != n) throw InvalidInput("stft_bin: channels differ in length");
  const std::size_t frames = stft_frame_count(n, window, hop);
  const auto kernel = bin_kernel(window, bin);
  SnapshotSet out;
  out.data.resize(static_cast<Eigen::Index>(signals.channels.size()), static_cast<Eigen::Index>(frames));
  for (std::size_t m = 0; m < signals.channels.size(); ++m) {
    const auto& x = signals.channels[m];
    for (std::size_t l = 0; l < frames; ++l) {
      Complex acc = 0.0;
      for (std::size_t i = 0; i < window; ++i) acc += x[l * hop + i] * kernel[i];
      out.data(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) = acc;
    }
  }
  out.bin_frequency = static_cast<double>(bin) * signals.fs / static_cast<double>(window);
  return out;
}

std::vector<double> gen_gaussian_signal(std::size_t len, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(len);
  for (auto& v : out) v = normal(rng);
  return out;
}

std::vector<Complex> gen_complex_gaussian_signal(std::size_t len, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::vector<Complex> out(len);
  for (auto& v : out) {
    const double re = normal(rng);
    const double im = normal(rng);
    v = Complex(re, im);
  }
  return out;
}

Channel emitter_channel(const Scene& scene, const Emitter& emitter) {
  const std::size_t m = scene.geometry.size();
  if (emitter.channel) {
    const Channel& ch = *emitter.channel;
    if (is_acoustic(scene)) {
      if (ch.kind != Channel::Kind::kFir || ch.fir.size() != m)
        throw ConfigError("emitter channel: acoustic scenes need one FIR per element");
      for (const auto& taps : ch.fir)
        if (taps.empty()) throw ConfigError("emitter channel: empty FIR");
    } else {
      if (ch.kind != Channel::Kind::kNarrowband || static_cast<std::size_t>(ch.gain.size()) != m)
        throw ConfigError("emitter channel: narrowband scenes need one gain per element");
      if (!ch.gain.allFinite()) throw ConfigError("emitter channel: non-finite gain");
    }
    return ch;
  }
  if (const auto* ac = std::get_if<AcousticModel>(&scene.model))
    return room_channel(ac->room, scene.geometry, emitter.position, ac->fs);
  const auto& nb = std::get<NarrowbandModel>(scene.model);
  return free_space_channel(scene.geometry, emitter.position, nb.amplitude);
}

double scene_noise_power(const Scene& scene) {
  if (scene.noise_power) return *scene.noise_power;
  if (scene.desired.empty())
    throw ConfigError("scene: noise level needs either noise_power or a desired source");
  const Emitter& ref = scene.desired.front();
  double direct = 0.0;
  const std::size_t m = scene.geometry.size();
  if (is_acoustic(scene) && !ref.channel) {
    for (const auto& p : scene.geometry.elements()) {
      const double r = (ref.position - p).norm();
      const double g = 1.0 / (4.0 * kPi * r);
      direct += g * g;
    }
  } else if (is_acoustic(scene)) {
    // Explicit FIR: use the strongest tap as the direct path.
    for (const auto& taps : ref.channel->fir) {
      double peak = 0.0;
      for (double t : taps) peak = std::max(peak, std::abs(t));
      direct += peak * peak;
    }
  } else {
    direct = emitter_channel(scene, ref).gain.squaredNorm();
  }
  direct /= static_cast<double>(m);
  return ref.power * direct / snr_linear(scene.snr_db);
}

SnapshotSet synthesize_snapshots(const Scene& scene, std::uint64_t seed) {
  const Eigen::Index m = static_cast<Eigen::Index>(scene.geometry.size());
  const auto emitters = active_emitters(scene);
  SnapshotSet out;

  if (const auto* nb = std::get_if<NarrowbandModel>(&scene.model)) {
    if (nb->snapshots < 1) throw ConfigError("scene: snapshots must be >= 1");
    const Eigen::Index l = static_cast<Eigen::Index>(nb->snapshots);
    out.data = CMatrix::Zero(m, l);
    for (const auto& ae : emitters) {
      const Channel ch = emitter_channel(scene, *ae.emitter);
      auto rng = make_rng(derive_seed(seed, ae.stream));
      const auto sig = gen_complex_gaussian_signal(nb->snapshots, rng);
      const double amp = std::sqrt(ae.emitter->power);
      for (Eigen::Index i = 0; i < l; ++i) out.data.col(i) += (amp * sig[static_cast<std::size_t>(i)]) * ch.gain;
    }
    if (scene.add_noise) {
      const double sigma = std::sqrt(scene_noise_power(scene));
      auto rng = make_rng(scene.noise_seed ? *scene.noise_seed : derive_seed(seed, noise_stream()));
      const auto noise = gen_complex_gaussian_signal(static_cast<std::size_t>(m * l), rng);
      for (Eigen::Index i = 0; i < l; ++i)
        for (Eigen::Index e = 0; e < m; ++e)
          out.data(e, i) += sigma * noise[static_cast<std::size_t>(i * m + e)];
    }
    return out;
  }

  const auto& ac = std::get<AcousticModel>(scene.model);
  const std::size_t n = ac.signal_length;
  const std::size_t frames = stft_frame_count(n, ac.stft.window, ac.stft.hop);
  if (ac.stft.bin >= ac.stft.window) throw InvalidInput("scene: STFT bin out of range");
  const auto kernel = bin_kernel(ac.stft.window, ac.stft.bin);
  const long hop = static_cast<long>(ac.stft.hop);
  out.data = CMatrix::Zero(m, static_cast<Eigen::Index>(frames));
  out.bin_frequency = static_cast<double>(ac.stft.bin) * ac.fs / static_cast<double>(ac.stft.window);

  for (const auto& ae : emitters) {
    const Channel ch = emitter_channel(scene, *ae.emitter);
    auto rng = make_rng(derive_seed(seed, ae.stream));
    auto sig = gen_gaussian_signal(n, rng);
    const double amp = std::sqrt(ae.emitter->power);
    for (auto& v : sig) v *= amp;
    std::size_t k_max = 0;
    for (const auto& taps : ch.fir) k_max = std::max(k_max, taps.size());
    const long t_lo = -static_cast<long>(k_max) + 1;
    const long t_hi = static_cast<long>(frames - 1) * hop;
    const auto x = sliding_bin(sig, t_lo, t_hi, kernel);
    // Z_m(l) = sum_k h_m(k) X(l hop - k)
    for (Eigen::Index e = 0; e < m; ++e) {
      const auto& taps = ch.fir[static_cast<std::size_t>(e)];
      for (std::size_t l = 0; l < frames; ++l) {
        const long base = static_cast<long>(l) * hop - t_lo;
        Complex acc = 0.0;
        for (std::size_t k = 0; k < taps.size(); ++k)
          acc += taps[k] * x[static_cast<std::size_t>(base - static_cast<long>(k))];
        out.data(e, static_cast<Eigen::Index>(l)) += acc;
      }
    }
  }
  if (scene.add_noise) {
    const double sigma = std::sqrt(scene_noise_power(scene));
    auto rng = make_rng(scene.noise_seed ? *scene.noise_seed : derive_seed(seed, noise_stream()));
    for (Eigen::Index e = 0; e < m; ++e) {
      auto noise = gen_gaussian_signal(n, rng);
      for (std::size_t l = 0; l < frames; ++l) {
        Complex acc = 0.0;
        for (std::size_t i = 0; i < ac.stft.window; ++i)
          acc += noise[l * ac.stft.hop + i] * kernel[i];
        out.data(e, static_cast<Eigen::Index>(l)) += sigma * acc;
      }
    }
  }
  return out;
}

TimeSignals synthesize_time_domain(const Scene& scene, std::uint64_t seed) {
  const auto* ac = std::get_if<AcousticModel>(&scene.model);
  if (!ac) throw InvalidInput("synthesize_time_domain: scene is not acoustic");
  const std::size_t m = scene.geometry.size();
  const std::size_t n = ac->signal_length;
  TimeSignals out;
  out.fs = ac->fs;
  out.channels.assign(m, std::vector<double>(n, 0.0));
  for (const auto& ae : active_emitters(scene)) {
    const Channel ch = emitter_channel(scene, *ae.emitter);
    auto rng = make_rng(derive_seed(seed, ae.stream));
    auto sig = gen_gaussian_signal(n, rng);
    const double amp = std::sqrt(ae.emitter->power);
    for (auto& v : sig) v *= amp;
    for (std::size_t e = 0; e < m; ++e) {
      const auto y = convolve_truncated(sig, ch.fir[e]);
      for (std::size_t i = 0; i < n; ++i) out.channels[e][i] += y[i];
    }
  }
  if (scene.add_noise) {
    const double sigma = std::sqrt(scene_noise_power(scene));
    auto rng = make_rng(scene.noise_seed ? *scene.noise_seed : derive_seed(seed, noise_stream()));
    for (std::size_t e = 0; e < m; ++e) {
      const auto noise = gen_gaussian_signal(n, rng);
      for (std::size_t i = 0; i < n; ++i) out.channels[e][i] += sigma * noise[i];
    }
  }
  return out;
}

void write_snapshots_csv(const SnapshotSet& snapshots, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  os << "# bin_frequency_hz=" << std::setprecision(17) << snapshots.bin_frequency << "\n";
  os << "snapshot";
  for (std::size_t e = 0; e < snapshots.num_elements(); ++e) os << ",re" << e << ",im" << e;
  os << "\n";
  for (std::size_t l = 0; l < snapshots.num_snapshots(); ++l) {
    os << l;
    for (std::size_t e = 0; e < snapshots.num_elements(); ++e) {
      const Complex v = snapshots.data(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(l));
      os << "," << v.real() << "," << v.imag();
    }
    os << "\n";
  }
}

SnapshotSet read_snapshots_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path);
  SnapshotSet out;
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("bin_frequency_hz=");
      if (pos != std::string::npos) out.bin_frequency = std::stod(line.substr(pos + 17));
      continue;
    }
    if (line.rfind("snapshot", 0) == 0) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() < 3 || values.size() % 2 == 0)
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": malformed snapshot row");
    if (width == 0) width = values.size();
    if (values.size() != width)
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": inconsistent row width");
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InvalidInput(path + ": no snapshots");
  const Eigen::Index m = static_cast<Eigen::Index>((width - 1) / 2);
  out.data.resize(m, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t l = 0; l < rows.size(); ++l)
    for (Eigen::Index e = 0; e < m; ++e)
      out.data(e, static_cast<Eigen::Index>(l)) =
          Complex(rows[l][static_cast<std::size_t>(1 + 2 * e)], rows[l][static_cast<std::size_t>(2 + 2 * e)]);
  return out;
}

}  // namespace steerlab
