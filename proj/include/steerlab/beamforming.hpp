#pragma once

// DS / MVDR / MUSIC spatial spectra, argmax DoA estimation, diagnostic
// quadratic-term spectra and output SIR.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "steerlab/adaptation.hpp"
#include "steerlab/geometry.hpp"
#include "steerlab/linalg.hpp"

namespace steerlab {

/// Linear-scale power over a direction grid.
struct Spectrum {
  DirectionGrid grid;
  std::vector<double> values;
};

/// Steering vectors of one array over one grid, as the columns of an M x G matrix.
class SteeringTable {
 public:
  SteeringTable(const ArrayGeometry& geom, const DirectionGrid& grid);

  const DirectionGrid& grid() const { return grid_; }
  const CMatrix& vectors() const { return d_; }

 private:
  DirectionGrid grid_;
  CMatrix d_;
};

enum class BeamformerKind { kDS, kMVDR, kMUSIC };

std::string_view to_string(BeamformerKind k);
BeamformerKind parse_beamformer_kind(std::string_view name);

/// P(theta) at arbitrary angles. Every supported beamformer is a quadratic
/// form q(theta) = d^H W d: DS returns q, MVDR and MUSIC return 1 / q
/// (W = Sigma^{-1} and U_N U_N^H respectively).
class SpectrumFunction {
 public:
  static SpectrumFunction ds(const HermitianMatrix& sigma, const ArrayGeometry& geom);
  static SpectrumFunction mvdr(const HermitianMatrix& sigma_or_inverse, const ArrayGeometry& geom,
                               bool input_is_inverse = false);
  /// InvalidInput unless 1 <= signal_dim < M.
  static SpectrumFunction music(const HermitianMatrix& sigma, const ArrayGeometry& geom,
                                std::size_t signal_dim);

  BeamformerKind kind() const { return kind_; }
  double operator()(double theta_deg) const;
  Spectrum evaluate(const DirectionGrid& grid) const;
  Spectrum evaluate(const SteeringTable& table) const;

 private:
  SpectrumFunction(BeamformerKind kind, CMatrix weight, const ArrayGeometry& geom);
  double from_quadratic(double q) const;

  BeamformerKind kind_;
  CMatrix weight_;
  ArrayGeometry geom_;
};

Spectrum ds_spectrum(const HermitianMatrix& sigma, const ArrayGeometry& geom, const DirectionGrid& grid);
Spectrum mvdr_spectrum(const HermitianMatrix& sigma_or_inverse, const ArrayGeometry& geom,
                       const DirectionGrid& grid, bool input_is_inverse = false);
Spectrum music_spectrum(const HermitianMatrix& sigma, const ArrayGeometry& geom,
                        const DirectionGrid& grid, std::size_t signal_dim);

/// Grid angle of the global maximum; ties go to the smallest angle.
double estimate_doa(const Spectrum& spectrum);

/// Golden-section search of the peak within +-half_width of a coarse estimate.
double refine_doa(const SpectrumFunction& p, double coarse_deg, double half_width_deg,
                  double tol_deg = 1e-7);

/// |d^H A d|^2 for a square matrix A.
Spectrum quadratic_term_spectrum(const CMatrix& a, const ArrayGeometry& geom, const DirectionGrid& grid);

/// ||E^H d||^2, the DS spectrum of E E^H.
Spectrum induced_spectrum(const AdaptationMap& map, const ArrayGeometry& geom, const DirectionGrid& grid);

/// 10 log10 P(theta_s) / P(theta_i), evaluated at the exact angles.
double output_sir_db(const SpectrumFunction& p, double theta_s_deg, double theta_i_deg);

double to_db(double power);

}  // namespace steerlab
