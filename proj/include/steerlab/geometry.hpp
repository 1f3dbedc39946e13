#pragma once

// Array layout, direction conventions, steering vectors and region sampling.
//
// Angles are in degrees, measured in the xy plane from the +x axis (the array
// axis for linear arrays), so broadside of an x-aligned ULA is 90 degrees.

#include <cstddef>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "steerlab/linalg.hpp"

namespace steerlab {

using Vec3 = Eigen::Vector3d;
using SteeringVector = CVector;

class ArrayGeometry {
 public:
  ArrayGeometry(std::vector<Vec3> elements, double wavelength);

  /// M elements spaced along +x starting at origin.
  static ArrayGeometry uniform_linear(std::size_t num_elements, double spacing, double wavelength,
                                      const Vec3& origin = Vec3::Zero());

  std::size_t size() const { return elements_.size(); }
  const std::vector<Vec3>& elements() const { return elements_; }
  const Vec3& element(std::size_t m) const { return elements_[m]; }
  const Vec3& reference() const { return elements_.front(); }
  Vec3 centroid() const;
  double wavelength() const { return wavelength_; }
  /// Largest distance between two elements.
  double aperture() const;

 private:
  std::vector<Vec3> elements_;
  double wavelength_;
};

struct RectangleRegion {
  Vec3 corner_a;  // z of corner_a is the fixed height
  Vec3 corner_b;
};

struct AngleInterval {
  double lo_deg;
  double hi_deg;
};

struct SectorRegion {
  Vec3 center = Vec3::Zero();
  std::vector<AngleInterval> intervals;  // disjoint, inside [0, 180]
  double r_min;
  double r_max;
};

using Region = std::variant<RectangleRegion, SectorRegion>;

/// Throws InvalidInput if the region is empty or malformed.
void validate_region(const Region& region);

struct DirectionGrid {
  double start_deg = 0.0;
  double end_deg = 180.0;
  double step_deg = 0.1;

  std::size_t size() const;
  double angle(std::size_t k) const;
  std::vector<double> angles() const;
};

void validate_grid(const DirectionGrid& grid);

/// Plane-wave response d(theta) with entry 0 equal to 1:
/// phase_m = 2 pi / lambda * (p_m - p_0) . (cos theta, sin theta, 0).
SteeringVector steering_vector(const ArrayGeometry& geom, double theta_deg);

/// Free-space transfer vector (1 / r_m) exp(-j 2 pi r_m / lambda).
SteeringVector simulated_steering_vector(const ArrayGeometry& geom, const Vec3& source);

/// n i.i.d. uniform positions in the region (area-uniform for sectors).
std::vector<Vec3> sample_positions(const Region& region, std::size_t n, std::mt19937_64& rng);

/// Angle in [0, 180] degrees between +x and the xy projection of source - origin.
double doa_from(const Vec3& origin, const Vec3& source);

/// Ground-truth DoA of a source, seen from the array centroid.
double true_doa(const ArrayGeometry& geom, const Vec3& source);

/// Position at the given angle and range from a center point in the xy plane.
Vec3 polar_position(const Vec3& center, double theta_deg, double range);

bool region_contains_angle(const SectorRegion& sector, double theta_deg);

constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace steerlab
