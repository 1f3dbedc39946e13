#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

#include "steerlab/error.hpp"
#include "steerlab/scene.hpp"

namespace steerlab {
namespace {

constexpr int kInterpTaps = 81;
constexpr int kInterpHalf = kInterpTaps / 2;

bool inside_room(const RoomSpec& room, const Vec3& p) {
  for (int a = 0; a < 3; ++a)
    if (!(p(a) >= 0.0 && p(a) <= room.dimensions(a))) return false;
  return true;
}

// Hann window phase table: cos / sin of 2 pi (n - half) / taps.
struct WindowTable {
  std::array<double, kInterpTaps> c{};
  std::array<double, kInterpTaps> s{};
  WindowTable() {
    for (int n = 0; n < kInterpTaps; ++n) {
      const double a = 2.0 * kPi * (n - kInterpHalf) / kInterpTaps;
      c[static_cast<std::size_t>(n)] = std::cos(a);
      s[static_cast<std::size_t>(n)] = std::sin(a);
    }
  }
};

const WindowTable& window_table() {
  static const WindowTable table;
  return table;
}

// Adds gain * windowed-sinc centred at `delay` samples into taps.
void add_fractional_impulse(std::vector<double>& taps, double delay, double gain) {
  const WindowTable& tab = window_table();
  const double whole = std::floor(delay);
  const double frac = delay - whole;
  const long start = static_cast<long>(whole) - kInterpHalf;
  // sin(pi (k - frac)) = -(-1)^k sin(pi frac) for integer k.
  const double sin_pf = std::sin(kPi * frac);
  const double phi = 2.0 * kPi * frac / kInterpTaps;
  const double cphi = std::cos(phi);
  const double sphi = std::sin(phi);
  const long len = static_cast<long>(taps.size());
  for (int n = 0; n < kInterpTaps; ++n) {
    const long idx = start + n;
    if (idx < 0 || idx >= len) continue;
    const int k = n - kInterpHalf;
    const double t = k - frac;
    double sinc;
    if (t == 0.0) {
      sinc = 1.0;
    } else {
      const double sign = (k % 2 == 0) ? -1.0 : 1.0;
      sinc = sign * sin_pf / (kPi * t);
    }
    const double cw = tab.c[static_cast<std::size_t>(n)] * cphi + tab.s[static_cast<std::size_t>(n)] * sphi;
    const double window = 0.5 * (1.0 + cw);
    taps[static_cast<std::size_t>(idx)] += gain * window * sinc;
  }
}

}  // namespace

void validate_room(const RoomSpec& room) {
  for (int a = 0; a < 3; ++a)
    if (!(room.dimensions(a) > 0.0)) throw InvalidInput("room: all extents must be positive");
  if (!(room.reverberation_time >= 0.0)) throw InvalidInput("room: reverberation time must be >= 0");
  if (!(room.speed_of_sound > 0.0)) throw InvalidInput("room: speed of sound must be positive");
  if (room.air_length < 1) throw InvalidInput("room: air_length must be >= 1");
}

double reflection_coefficient(const RoomSpec& room) {
  validate_room(room);
  if (room.reverberation_time == 0.0) return 0.0;
  const Vec3& d = room.dimensions;
  const double volume = d.x() * d.y() * d.z();
  const double surface = 2.0 * (d.x() * d.y() + d.x() * d.z() + d.y() * d.z());
  const double alpha =
      24.0 * std::log(10.0) * volume / (room.speed_of_sound * surface * room.reverberation_time);
  if (alpha >= 1.0) return 0.0;
  return std::sqrt(1.0 - alpha);
}

std::vector<double> image_method_air(const RoomSpec& room, const Vec3& source, const Vec3& mic,
                                     double fs) {
  validate_room(room);
  if (!(fs > 0.0)) throw InvalidInput("image_method_air: fs must be positive");
  if (!inside_room(room, source)) throw InvalidInput("image_method_air: source outside the room");
  if (!inside_room(room, mic)) throw InvalidInput("image_method_air: microphone outside the room");

  const double refl = reflection_coefficient(room);
  const double c_ts = room.speed_of_sound / fs;  // metres per sample
  const Vec3 s = source / c_ts;
  const Vec3 r = mic / c_ts;
  const Vec3 l = room.dimensions / c_ts;
  const std::size_t n_samples = room.air_length;
  std::vector<double> taps(n_samples, 0.0);

  std::array<int, 3> order{};
  for (int a = 0; a < 3; ++a)
    order[static_cast<std::size_t>(a)] =
        static_cast<int>(std::ceil(static_cast<double>(n_samples) / (2.0 * l(a))));

  // Reflection powers up to the largest exponent reachable inside the box.
  const int max_exp = 2 * (order[0] + order[1] + order[2]) + 3;
  std::vector<double> refl_pow(static_cast<std::size_t>(max_exp) + 1);
  refl_pow[0] = 1.0;
  for (int e = 1; e <= max_exp; ++e) refl_pow[static_cast<std::size_t>(e)] = refl_pow[static_cast<std::size_t>(e) - 1] * refl;

  for (int mx = -order[0]; mx <= order[0]; ++mx) {
    for (int my = -order[1]; my <= order[1]; ++my) {
      for (int mz = -order[2]; mz <= order[2]; ++mz) {
        for (int q = 0; q <= 1; ++q) {
          const double dx = (1 - 2 * q) * s.x() - r.x() + 2.0 * mx * l.x();
          const int ex = std::abs(mx - q) + std::abs(mx);
          for (int j = 0; j <= 1; ++j) {
            const double dy = (1 - 2 * j) * s.y() - r.y() + 2.0 * my * l.y();
            const int ey = std::abs(my - j) + std::abs(my);
            for (int k = 0; k <= 1; ++k) {
              const double dz = (1 - 2 * k) * s.z() - r.z() + 2.0 * mz * l.z();
              const int ez = std::abs(mz - k) + std::abs(mz);
              const double amp = refl_pow[static_cast<std::size_t>(ex + ey + ez)];
              if (amp == 0.0) continue;
              const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
              if (std::floor(dist) >= static_cast<double>(n_samples)) continue;
              if (dist == 0.0)
                throw InvalidInput("image_method_air: source and microphone coincide");
              const double gain = amp / (4.0 * kPi * dist * c_ts);
              add_fractional_impulse(taps, dist, gain);
            }
          }
        }
      }
    }
  }
  return taps;
}

Channel room_channel(const RoomSpec& room, const ArrayGeometry& geom, const Vec3& source,
                     double fs) {
  Channel ch;
  ch.kind = Channel::Kind::kFir;
  ch.fir.reserve(geom.size());
  for (const auto& mic : geom.elements()) ch.fir.push_back(image_method_air(room, source, mic, fs));
  return ch;
}

}  // namespace steerlab
