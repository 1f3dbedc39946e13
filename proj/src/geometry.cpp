#include "steerlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "steerlab/error.hpp"

namespace steerlab {

ArrayGeometry::ArrayGeometry(std::vector<Vec3> elements, double wavelength)
    : elements_(std::move(elements)), wavelength_(wavelength) {
  if (elements_.size() < 2) throw InvalidInput("ArrayGeometry: need at least 2 elements");
  if (!(wavelength_ > 0.0) || !std::isfinite(wavelength_))
    throw InvalidInput("ArrayGeometry: wavelength must be positive");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (!elements_[i].allFinite()) throw InvalidInput("ArrayGeometry: non-finite element position");
    for (std::size_t j = 0; j < i; ++j)
      if ((elements_[i] - elements_[j]).norm() == 0.0)
        throw InvalidInput("ArrayGeometry: elements " + std::to_string(j) + " and " +
                           std::to_string(i) + " coincide");
  }
}

ArrayGeometry ArrayGeometry::uniform_linear(std::size_t num_elements, double spacing,
                                            double wavelength, const Vec3& origin) {
  std::vector<Vec3> elements;
  elements.reserve(num_elements);
  for (std::size_t m = 0; m < num_elements; ++m)
    elements.push_back(origin + Vec3(spacing * static_cast<double>(m), 0.0, 0.0));
  return ArrayGeometry(std::move(elements), wavelength);
}

Vec3 ArrayGeometry::centroid() const {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : elements_) sum += p;
  return sum / static_cast<double>(elements_.size());
}

double ArrayGeometry::aperture() const {
  double best = 0.0;
  for (std::size_t i = 0; i < elements_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) best = std::max(best, (elements_[i] - elements_[j]).norm());
  return best;
}

void validate_region(const Region& region) {
  if (const auto* rect = std::get_if<RectangleRegion>(&region)) {
    if (!rect->corner_a.allFinite() || !rect->corner_b.allFinite())
      throw InvalidInput("rectangle region: non-finite corner");
    return;
  }
  const auto& sector = std::get<SectorRegion>(region);
  if (sector.intervals.empty()) throw InvalidInput("sector region: no angle interval");
  if (!(sector.r_min > 0.0) || !(sector.r_max >= sector.r_min))
    throw InvalidInput("sector region: radii must satisfy 0 < r_min <= r_max");
  std::vector<AngleInterval> sorted = sector.intervals;
  std::sort(sorted.begin(), sorted.end(),
            [](const AngleInterval& a, const AngleInterval& b) { return a.lo_deg < b.lo_deg; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& iv = sorted[i];
    if (!(iv.lo_deg >= 0.0) || !(iv.hi_deg <= 180.0) || !(iv.lo_deg <= iv.hi_deg))
      throw InvalidInput("sector region: angle interval must satisfy 0 <= lo <= hi <= 180");
    if (i > 0 && iv.lo_deg < sorted[i - 1].hi_deg)
      throw InvalidInput("sector region: angle intervals overlap");
  }
}

std::size_t DirectionGrid::size() const {
  return static_cast<std::size_t>(std::llround((end_deg - start_deg) / step_deg)) + 1;
}

double DirectionGrid::angle(std::size_t k) const {
  return std::min(start_deg + step_deg * static_cast<double>(k), end_deg);
}

std::vector<double> DirectionGrid::angles() const {
  std::vector<double> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = angle(k);
  return out;
}

void validate_grid(const DirectionGrid& grid) {
  if (!(grid.start_deg < grid.end_deg)) throw InvalidInput("grid: start must be below end");
  if (!(grid.step_deg > 0.0)) throw InvalidInput("grid: step must be positive");
}

SteeringVector steering_vector(const ArrayGeometry& geom, double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg <= 180.0))
    throw InvalidInput("steering_vector: theta must lie in [0, 180] degrees");
  const double th = deg2rad(theta_deg);
  const Vec3 dir(std::cos(th), std::sin(th), 0.0);
  const double k = 2.0 * kPi / geom.wavelength();
  SteeringVector d(static_cast<Eigen::Index>(geom.size()));
  d(0) = 1.0;
  for (std::size_t m = 1; m < geom.size(); ++m) {
    const double phase = k * (geom.element(m) - geom.reference()).dot(dir);
    d(static_cast<Eigen::Index>(m)) = std::polar(1.0, phase);
  }
  return d;
}

SteeringVector simulated_steering_vector(const ArrayGeometry& geom, const Vec3& source) {
  const double k = 2.0 * kPi / geom.wavelength();
  SteeringVector d(static_cast<Eigen::Index>(geom.size()));
  for (std::size_t m = 0; m < geom.size(); ++m) {
    const double r = (source - geom.element(m)).norm();
    if (!(r > 0.0))
      throw InvalidInput("simulated_steering_vector: source coincides with element " +
                         std::to_string(m));
    d(static_cast<Eigen::Index>(m)) = std::polar(1.0 / r, -k * r);
  }
  return d;
}

std::vector<Vec3> sample_positions(const Region& region, std::size_t n, std::mt19937_64& rng) {
  if (n < 1) throw InvalidInput("sample_positions: n must be >= 1");
  validate_region(region);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(n);

  if (const auto* rect = std::get_if<RectangleRegion>(&region)) {
    const double x0 = std::min(rect->corner_a.x(), rect->corner_b.x());
    const double x1 = std::max(rect->corner_a.x(), rect->corner_b.x());
    const double y0 = std::min(rect->corner_a.y(), rect->corner_b.y());
    const double y1 = std::max(rect->corner_a.y(), rect->corner_b.y());
    for (std::size_t i = 0; i < n; ++i) {
      const double x = x0 + (x1 - x0) * unit(rng);
      const double y = y0 + (y1 - y0) * unit(rng);
      out.emplace_back(x, y, rect->corner_a.z());
    }
    return out;
  }

  const auto& sector = std::get<SectorRegion>(region);
  std::vector<double> widths;
  for (const auto& iv : sector.intervals) widths.push_back(iv.hi_deg - iv.lo_deg);
  double total = 0.0;
  for (double w : widths) total += w;
  if (sector.intervals.size() > 1 && !(total > 0.0))
    throw InvalidInput("sample_positions: sector has zero angular extent");
  const double r2_lo = sector.r_min * sector.r_min;
  const double r2_hi = sector.r_max * sector.r_max;
  for (std::size_t i = 0; i < n; ++i) {
    // Pick an interval proportionally to its angular width, then a uniform angle in it.
    double u = unit(rng) * total;
    std::size_t k = 0;
    while (k + 1 < widths.size() && u >= widths[k]) {
      u -= widths[k];
      ++k;
    }
    const auto& iv = sector.intervals[k];
    const double theta = iv.lo_deg + std::clamp(u, 0.0, widths[k]);
    const double r = std::sqrt(r2_lo + (r2_hi - r2_lo) * unit(rng));
    out.push_back(polar_position(sector.center, theta, r));
  }
  return out;
}

double doa_from(const Vec3& origin, const Vec3& source) {
  const Vec3 rel = source - origin;
  // Linear arrays cannot tell y from -y; fold into [0, 180].
  return rad2deg(std::atan2(std::abs(rel.y()), rel.x()));
}

double true_doa(const ArrayGeometry& geom, const Vec3& source) {
  return doa_from(geom.centroid(), source);
}

Vec3 polar_position(const Vec3& center, double theta_deg, double range) {
  const double th = deg2rad(theta_deg);
  return center + Vec3(range * std::cos(th), range * std::sin(th), 0.0);
}

bool region_contains_angle(const SectorRegion& sector, double theta_deg) {
  for (const auto& iv : sector.intervals)
    if (theta_deg >= iv.lo_deg && theta_deg <= iv.hi_deg) return true;
  return false;
}

}  // namespace steerlab
