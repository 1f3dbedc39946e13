#include "steerlab/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "steerlab/error.hpp"

namespace steerlab {
namespace {

constexpr double kTinyQuadratic = 1e-300;

std::vector<double> quadratic_forms(const CMatrix& w, const CMatrix& d) {
  const CMatrix wd = w * d;
  std::vector<double> q(static_cast<std::size_t>(d.cols()));
  for (Eigen::Index g = 0; g < d.cols(); ++g) q[static_cast<std::size_t>(g)] = d.col(g).dot(wd.col(g)).real();
  return q;
}

}  // namespace

SteeringTable::SteeringTable(const ArrayGeometry& geom, const DirectionGrid& grid) : grid_(grid) {
  validate_grid(grid);
  const std::size_t n = grid.size();
  d_.resize(static_cast<Eigen::Index>(geom.size()), static_cast<Eigen::Index>(n));
  for (std::size_t g = 0; g < n; ++g) d_.col(static_cast<Eigen::Index>(g)) = steering_vector(geom, grid.angle(g));
}

std::string_view to_string(BeamformerKind k) {
  switch (k) {
    case BeamformerKind::kDS:
      return "ds";
    case BeamformerKind::kMVDR:
      return "mvdr";
    case BeamformerKind::kMUSIC:
      return "music";
  }
  return "ds";
}

BeamformerKind parse_beamformer_kind(std::string_view name) {
  if (name == "ds") return BeamformerKind::kDS;
  if (name == "mvdr") return BeamformerKind::kMVDR;
  if (name == "music") return BeamformerKind::kMUSIC;
  throw InvalidInput("unknown beamformer '" + std::string(name) + "'");
}

SpectrumFunction::SpectrumFunction(BeamformerKind kind, CMatrix weight, const ArrayGeometry& geom)
    : kind_(kind), weight_(std::move(weight)), geom_(geom) {
  if (weight_.rows() != static_cast<Eigen::Index>(geom_.size()))
    throw InvalidInput("spectrum: matrix dimension does not match the array");
}

SpectrumFunction SpectrumFunction::ds(const HermitianMatrix& sigma, const ArrayGeometry& geom) {
  return SpectrumFunction(BeamformerKind::kDS, sigma.matrix(), geom);
}

SpectrumFunction SpectrumFunction::mvdr(const HermitianMatrix& sigma_or_inverse,
                                        const ArrayGeometry& geom, bool input_is_inverse) {
  CMatrix w = input_is_inverse ? sigma_or_inverse.matrix() : invert_hpd(sigma_or_inverse).matrix();
  return SpectrumFunction(BeamformerKind::kMVDR, std::move(w), geom);
}

SpectrumFunction SpectrumFunction::music(const HermitianMatrix& sigma, const ArrayGeometry& geom,
                                         std::size_t signal_dim) {
  const auto m = static_cast<std::size_t>(sigma.dim());
  if (signal_dim < 1 || signal_dim >= m)
    throw InvalidInput("music: signal dimension must satisfy 1 <= k < M");
  const HermitianEigen eig = hermitian_eig(sigma);
  const CMatrix un = eig.eigenvectors.rightCols(static_cast<Eigen::Index>(m - signal_dim));
  return SpectrumFunction(BeamformerKind::kMUSIC, un * un.adjoint(), geom);
}

double SpectrumFunction::from_quadratic(double q) const {
  if (kind_ == BeamformerKind::kDS) return std::max(q, 0.0);
  return 1.0 / std::max(q, kTinyQuadratic);
}

double SpectrumFunction::operator()(double theta_deg) const {
  const SteeringVector d = steering_vector(geom_, theta_deg);
  return from_quadratic(d.dot(weight_ * d).real());
}

Spectrum SpectrumFunction::evaluate(const DirectionGrid& grid) const {
  return evaluate(SteeringTable(geom_, grid));
}

Spectrum SpectrumFunction::evaluate(const SteeringTable& table) const {
  if (table.vectors().rows() != weight_.rows())
    throw InvalidInput("spectrum: steering table does not match the array");
  Spectrum out{table.grid(), quadratic_forms(weight_, table.vectors())};
  for (double& v : out.values) v = from_quadratic(v);
  return out;
}

Spectrum ds_spectrum(const HermitianMatrix& sigma, const ArrayGeometry& geom, const DirectionGrid& grid) {
  return SpectrumFunction::ds(sigma, geom).evaluate(grid);
}

Spectrum mvdr_spectrum(const HermitianMatrix& sigma_or_inverse, const ArrayGeometry& geom,
                       const DirectionGrid& grid, bool input_is_inverse) {
  return SpectrumFunction::mvdr(sigma_or_inverse, geom, input_is_inverse).evaluate(grid);
}

Spectrum music_spectrum(const HermitianMatrix& sigma, const ArrayGeometry& geom,
                        const DirectionGrid& grid, std::size_t signal_dim) {
  return SpectrumFunction::music(sigma, geom, signal_dim).evaluate(grid);
}

double estimate_doa(const Spectrum& spectrum) {
  if (spectrum.values.empty()) throw InvalidInput("estimate_doa: empty spectrum");
  std::size_t best = 0;
  for (std::size_t g = 1; g < spectrum.values.size(); ++g)
    if (spectrum.values[g] > spectrum.values[best]) best = g;
  return spectrum.grid.angle(best);
}

double refine_doa(const SpectrumFunction& p, double coarse_deg, double half_width_deg, double tol_deg) {
  double lo = std::max(0.0, coarse_deg - half_width_deg);
  double hi = std::min(180.0, coarse_deg + half_width_deg);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = p(x1);
  double f2 = p(x2);
  while (hi - lo > tol_deg) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = p(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = p(x1);
    }
  }
  const double mid = 0.5 * (lo + hi);
  return p(mid) >= p(coarse_deg) ? mid : coarse_deg;
}

Spectrum quadratic_term_spectrum(const CMatrix& a, const ArrayGeometry& geom, const DirectionGrid& grid) {
  if (a.rows() != a.cols() || a.rows() != static_cast<Eigen::Index>(geom.size()))
    throw InvalidInput("quadratic_term_spectrum: matrix must be M x M");
  const SteeringTable table(geom, grid);
  const CMatrix& d = table.vectors();
  const CMatrix ad = a * d;
  Spectrum out{grid, std::vector<double>(grid.size())};
  for (Eigen::Index g = 0; g < d.cols(); ++g) out.values[static_cast<std::size_t>(g)] = std::norm(d.col(g).dot(ad.col(g)));
  return out;
}

Spectrum induced_spectrum(const AdaptationMap& map, const ArrayGeometry& geom, const DirectionGrid& grid) {
  if (map.dim() != static_cast<Eigen::Index>(geom.size()))
    throw InvalidInput("induced_spectrum: map dimension does not match the array");
  const SteeringTable table(geom, grid);
  const CMatrix u = map.matrix().adjoint() * table.vectors();
  Spectrum out{grid, std::vector<double>(grid.size())};
  for (Eigen::Index g = 0; g < u.cols(); ++g) out.values[static_cast<std::size_t>(g)] = u.col(g).squaredNorm();
  return out;
}

double output_sir_db(const SpectrumFunction& p, double theta_s_deg, double theta_i_deg) {
  const double ps = p(theta_s_deg);
  const double pi = p(theta_i_deg);
  if (!(pi > 0.0)) throw NumericalFailure("output_sir: zero power at the interferer direction");
  return 10.0 * std::log10(ps / pi);
}

double to_db(double power) {
  return 10.0 * std::log10(std::max(power, std::numeric_limits<double>::min()));
}

}  // namespace steerlab
