#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "steerlab/error.hpp"
#include "steerlab/rng.hpp"
#include "steerlab/scene.hpp"

using namespace steerlab;

namespace {

RoomSpec lab_room(double t60) {
  RoomSpec room;
  room.dimensions = Vec3(5.2, 6.2, 3.5);
  room.reverberation_time = t60;
  return room;
}

ArrayGeometry mic_array() { return ArrayGeometry::uniform_linear(9, 0.12, 0.24, Vec3(2.0, 0.5, 1.5)); }

std::size_t argmax_abs(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  return best;
}

double energy(const std::vector<double>& v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

Complex bin_response(const std::vector<double>& h, double f, double fs) {
  Complex acc = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) acc += h[k] * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(k) / fs);
  return acc;
}

}  // namespace

TEST_CASE("gaussian signal statistics") {
  std::mt19937_64 rng(1);
  const std::size_t n = 30000;
  const auto x = gen_gaussian_signal(n, rng);
  CHECK(x.size() == n);
  CHECK(static_cast<double>(n) / 12000.0 == doctest::Approx(2.5));
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(energy(x) / static_cast<double>(n) == doctest::Approx(1.0).epsilon(4.0 * std::sqrt(2.0 / n)));

  const auto z = gen_complex_gaussian_signal(n, rng);
  Complex zm = 0.0;
  double p = 0.0;
  for (const auto& v : z) {
    zm += v;
    p += std::norm(v);
  }
  CHECK(std::abs(zm) / static_cast<double>(n) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(p / static_cast<double>(n) - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));

  std::mt19937_64 a(5);
  std::mt19937_64 b(5);
  CHECK(gen_gaussian_signal(10, a) == gen_gaussian_signal(10, b));
}

TEST_CASE("reflection coefficient") {
  CHECK(reflection_coefficient(lab_room(0.0)) == 0.0);
  const double r400 = reflection_coefficient(lab_room(0.4));
  const double v = 5.2 * 6.2 * 3.5;
  const double s = 2.0 * (5.2 * 6.2 + 5.2 * 3.5 + 6.2 * 3.5);
  CHECK(r400 == doctest::Approx(std::sqrt(1.0 - 24.0 * std::log(10.0) * v / (340.0 * s * 0.4))));
  CHECK(reflection_coefficient(lab_room(0.1)) < reflection_coefficient(lab_room(0.2)));
  CHECK(reflection_coefficient(lab_room(0.5)) < 1.0);
  CHECK(reflection_coefficient(lab_room(0.01)) == 0.0);
  RoomSpec bad = lab_room(0.2);
  bad.dimensions.y() = 0.0;
  CHECK_THROWS_AS(reflection_coefficient(bad), InvalidInput);
}

TEST_CASE("anechoic AIR is a scaled fractional delay") {
  const RoomSpec room = lab_room(0.0);
  const Vec3 mic(2.0, 2.0, 1.5);
  const auto h1 = image_method_air(room, Vec3(3.0, 2.0, 1.5), mic, 12000.0);
  CHECK(h1.size() == 2048);
  const std::size_t peak = argmax_abs(h1);
  CHECK(peak == 35);  // 12000 / 340 = 35.29 samples
  // Sub-sample centre from a parabola through the three largest taps.
  const double y0 = h1[peak - 1], y1 = h1[peak], y2 = h1[peak + 1];
  const double centre = static_cast<double>(peak) + 0.5 * (y0 - y2) / (y0 - 2.0 * y1 + y2);
  CHECK(centre == doctest::Approx(12000.0 / 340.0).epsilon(0.01));

  const auto h2 = image_method_air(room, Vec3(4.0, 2.0, 1.5), mic, 12000.0);
  CHECK(energy(h1) / energy(h2) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(h1[peak] * 4.0 * kPi == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("AIR errors and reciprocity") {
  const RoomSpec room = lab_room(0.2);
  CHECK_THROWS_AS(image_method_air(room, Vec3(6.0, 2.0, 1.5), Vec3(2.0, 2.0, 1.5), 12000.0), InvalidInput);
  CHECK_THROWS_AS(image_method_air(room, Vec3(1.0, 2.0, 1.5), Vec3(2.0, -0.1, 1.5), 12000.0), InvalidInput);
  const Vec3 a(1.1, 3.7, 1.5);
  const Vec3 b(2.3, 0.6, 1.2);
  const auto hab = image_method_air(room, a, b, 12000.0);
  const auto hba = image_method_air(room, b, a, 12000.0);
  double diff = 0.0;
  for (std::size_t i = 0; i < hab.size(); ++i) diff = std::max(diff, std::abs(hab[i] - hba[i]));
  CHECK(diff < 1e-10);
}

TEST_CASE("reverberant AIR carries more energy than anechoic") {
  const Vec3 src(1.5, 4.5, 1.5);
  const Vec3 mic(2.0, 0.5, 1.5);
  const double e0 = energy(image_method_air(lab_room(0.0), src, mic, 12000.0));
  const double e2 = energy(image_method_air(lab_room(0.2), src, mic, 12000.0));
  const double e4 = energy(image_method_air(lab_room(0.4), src, mic, 12000.0));
  CHECK(e2 > 1.5 * e0);
  CHECK(e4 > e2);
}

TEST_CASE("anechoic AIR bin response matches free-space phases") {
  const double fs = 12000.0;
  const double f = 242.0 * fs / 2048.0;
  const RoomSpec room = lab_room(0.0);
  const ArrayGeometry mics = ArrayGeometry::uniform_linear(9, 0.12, 340.0 / f, Vec3(2.0, 0.5, 1.5));
  const Vec3 src(2.8, 5.5, 1.5);
  const Channel ch = room_channel(room, mics, src, fs);
  const auto d = simulated_steering_vector(mics, src);
  const Complex h0 = bin_response(ch.fir[0], f, fs);
  for (std::size_t m = 1; m < mics.size(); ++m) {
    const Complex hm = bin_response(ch.fir[m], f, fs);
    const double dphi = std::remainder(std::arg(hm / h0) - std::arg(d(static_cast<Eigen::Index>(m)) / d(0)), 2.0 * kPi);
    CHECK(std::abs(dphi) < 0.05);
  }
}

TEST_CASE("stft bin extraction") {
  CHECK(stft_frame_count(30000, 2048, 1024) == 28);
  CHECK_THROWS_AS(stft_frame_count(100, 2048, 1024), InvalidInput);
  const double fs = 12000.0;
  const double f = 242.0 * fs / 2048.0;
  CHECK(f == doctest::Approx(1417.97).epsilon(1e-5));
  CHECK(340.0 / f / 2.0 == doctest::Approx(0.12).epsilon(0.002));

  TimeSignals tone{fs, {std::vector<double>(30000)}};
  for (std::size_t n = 0; n < 30000; ++n) tone.channels[0][n] = std::cos(2.0 * kPi * f * static_cast<double>(n) / fs);
  const auto snaps = stft_bin(tone, 2048, 1024, 242);
  CHECK(snaps.num_snapshots() == 28);
  CHECK(snaps.bin_frequency == doctest::Approx(f));
  for (std::size_t l = 0; l < 28; ++l)
    CHECK(std::abs(snaps.data(0, static_cast<Eigen::Index>(l))) == doctest::Approx(1024.0).epsilon(1e-9));
  CHECK_THROWS_AS(stft_bin(tone, 2048, 1024, 2048), InvalidInput);

  std::mt19937_64 rng(2);
  TimeSignals noise{fs, {gen_gaussian_signal(5000, rng), gen_gaussian_signal(5000, rng)}};
  const auto s2 = stft_bin(noise, 512, 256, 37);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t l = 0; l < s2.num_snapshots(); ++l)
      CHECK(std::abs(s2.data(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) -
                     oracle::dft_bin(noise.channels[m], l * 256, 512, 37)) < 1e-9);
}

TEST_CASE("narrowband synthesis without noise is rank one") {
  const auto geom = ArrayGeometry::uniform_linear(4, 0.0625, 0.125);
  Channel ch;
  ch.gain = CVector::Ones(4);
  ch.gain(2) = Complex(0.0, 2.0);
  Scene scene{geom, NarrowbandModel{50, 1.0}, {Emitter{Vec3(0.0, 100.0, 0.0), 1.0, ch}}, {}, 20.0, false, {}};
  const auto z = synthesize_snapshots(scene, 3);
  auto rng = make_rng(derive_seed(3, desired_stream(0)));
  const auto s = gen_complex_gaussian_signal(50, rng);
  for (Eigen::Index l = 0; l < 50; ++l)
    CHECK((z.data.col(l) - s[static_cast<std::size_t>(l)] * ch.gain).norm() < 1e-14);
}

TEST_CASE("interferer power scaling follows the SIR") {
  const auto geom = ArrayGeometry::uniform_linear(4, 0.0625, 0.125);
  const Emitter unit{Vec3(50.0, 120.0, 0.0), 1.0, {}};
  Emitter strong = unit;
  strong.power = std::pow(10.0, 20.0 / 10.0);  // SIR -20 dB
  Scene a{geom, NarrowbandModel{}, {}, {unit}, 20.0, false, {}};
  Scene b{geom, NarrowbandModel{}, {}, {strong}, 20.0, false, {}};
  const auto za = synthesize_snapshots(a, 9);
  const auto zb = synthesize_snapshots(b, 9);
  CHECK(relative_frobenius_error(zb.data, 10.0 * za.data) < 1e-14);
  CHECK(strong.power / unit.power == 100.0);
}

TEST_CASE("narrowband synthesis is linear in its components") {
  const auto geom = ArrayGeometry::uniform_linear(9, 0.0625, 0.125);
  const Emitter des{polar_position(Vec3::Zero(), 80.0, 170.0), 1.0, {}};
  const Emitter intf{polar_position(Vec3::Zero(), 40.0, 200.0), 10.0, {}};
  Scene full{geom, NarrowbandModel{}, {des}, {intf}, 20.0, true, {}};
  Scene only_d{geom, NarrowbandModel{}, {des}, {}, 20.0, false, {}};
  Scene only_i{geom, NarrowbandModel{}, {}, {intf}, 20.0, false, {}};
  Scene only_n{geom, NarrowbandModel{}, {}, {}, 20.0, true, scene_noise_power(full)};
  const auto z = synthesize_snapshots(full, 17);
  const CMatrix sum = synthesize_snapshots(only_d, 17).data + synthesize_snapshots(only_i, 17).data +
                      synthesize_snapshots(only_n, 17).data;
  CHECK(relative_frobenius_error(sum, z.data) < 1e-14);

  const double direct = simulated_steering_vector(geom, des.position).squaredNorm() / 9.0;
  CHECK(scene_noise_power(full) == doctest::Approx(direct / 100.0));
  Scene none{geom, NarrowbandModel{}, {}, {intf}, 20.0, true, {}};
  CHECK_THROWS_AS(scene_noise_power(none), ConfigError);
}

TEST_CASE("acoustic snapshot path matches time-domain convolution and STFT") {
  AcousticModel model;
  model.room = lab_room(0.3);
  model.signal_length = 9000;
  const auto geom = ArrayGeometry::uniform_linear(3, 0.12, 0.24, Vec3(2.0, 0.5, 1.5));
  const Emitter des{Vec3(1.2, 4.0, 1.5), 1.0, {}};
  const Emitter intf{Vec3(0.5, 1.5, 1.5), 4.0, {}};
  const Scene scene{geom, model, {des}, {intf}, 20.0, true, {}};
  const auto fast = synthesize_snapshots(scene, 21);
  const auto td = synthesize_time_domain(scene, 21);
  const auto slow = stft_bin(td, model.stft.window, model.stft.hop, model.stft.bin);
  CHECK(fast.num_snapshots() == slow.num_snapshots());
  CHECK(relative_frobenius_error(fast.data, slow.data) < 1e-9);
  CHECK(fast.bin_frequency == doctest::Approx(slow.bin_frequency));

  // Time-domain channel agrees with the oracle convolution.
  const Channel ch = emitter_channel(scene, des);
  auto rng = make_rng(derive_seed(21, desired_stream(0)));
  const auto s = gen_gaussian_signal(model.signal_length, rng);
  const auto y = oracle::convolve(s, ch.fir[1]);
  Scene only_d{geom, model, {des}, {}, 20.0, false, {}};
  const auto td_d = synthesize_time_domain(only_d, 21);
  double diff = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) diff = std::max(diff, std::abs(y[i] - td_d.channels[1][i]));
  CHECK(diff < 1e-12);
}

TEST_CASE("explicit channels must match the scene") {
  const auto geom = ArrayGeometry::uniform_linear(3, 0.12, 0.24, Vec3(2.0, 0.5, 1.5));
  Channel nb;
  nb.gain = CVector::Ones(3);
  AcousticModel model;
  model.room = lab_room(0.0);
  const Scene ac{geom, model, {Emitter{Vec3(1.0, 3.0, 1.5), 1.0, nb}}, {}, 20.0, false, {}};
  CHECK_THROWS_AS(synthesize_snapshots(ac, 1), ConfigError);
  Channel short_gain;
  short_gain.gain = CVector::Ones(2);
  const Scene rf{geom, NarrowbandModel{}, {Emitter{Vec3(1.0, 3.0, 1.5), 1.0, short_gain}}, {}, 20.0, false, {}};
  CHECK_THROWS_AS(synthesize_snapshots(rf, 1), ConfigError);
}

TEST_CASE("snapshot csv round trip") {
  std::mt19937_64 rng(8);
  SnapshotSet s{oracle::random_complex(3, 5, rng), 1417.96875};
  const auto path = (std::filesystem::temp_directory_path() / "steerlab_snapshots_test.csv").string();
  write_snapshots_csv(s, path);
  const auto back = read_snapshots_csv(path);
  CHECK(back.bin_frequency == s.bin_frequency);
  CHECK(back.data == s.data);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_snapshots_csv(path), InvalidInput);
}
