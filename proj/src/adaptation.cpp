#include "steerlab/adaptation.hpp"

#include <cmath>
#include <string>

#include "steerlab/error.hpp"

namespace steerlab {

std::string_view to_string(MapVariant v) {
  switch (v) {
    case MapVariant::kCoral:
      return "coral";
    case MapVariant::kParallelTransport:
      return "parallel-transport";
    case MapVariant::kInverseDomainCoral:
      return "inverse-domain-coral";
  }
  return "coral";
}

MapVariant parse_map_variant(std::string_view name) {
  if (name == "coral") return MapVariant::kCoral;
  if (name == "pt" || name == "parallel-transport") return MapVariant::kParallelTransport;
  if (name == "inverse" || name == "inverse-domain-coral") return MapVariant::kInverseDomainCoral;
  throw InvalidInput("unknown map variant '" + std::string(name) + "'");
}

AdaptationMap::AdaptationMap(CMatrix e, MapVariant variant, HermitianMatrix sigma_s,
                             HermitianMatrix sigma_a)
    : e_(std::move(e)), variant_(variant), sigma_s_(std::move(sigma_s)), sigma_a_(std::move(sigma_a)) {
  if (e_.rows() != e_.cols() || e_.rows() != sigma_s_.dim() || sigma_s_.dim() != sigma_a_.dim())
    throw InvalidInput("AdaptationMap: dimension mismatch");
  if (!e_.allFinite()) throw NumericalFailure("AdaptationMap: non-finite map entries");
}

AdaptationMap fit_map(const HermitianMatrix& sigma_s, const HermitianMatrix& sigma_a,
                      MapVariant variant) {
  if (sigma_s.dim() != sigma_a.dim()) throw InvalidInput("fit_map: dimension mismatch");
  CMatrix e;
  if (variant == MapVariant::kParallelTransport) {
    e = sqrt_of_product_with_inverse(sigma_s, sigma_a);
  } else {
    e = matrix_sqrt(sigma_s).matrix() * matrix_inv_sqrt(sigma_a).matrix();
  }
  return AdaptationMap(std::move(e), variant, sigma_s, sigma_a);
}

SnapshotSet adapt_snapshots(const AdaptationMap& map, const SnapshotSet& snapshots) {
  if (static_cast<Eigen::Index>(snapshots.num_elements()) != map.dim())
    throw InvalidInput("adapt_snapshots: dimension mismatch");
  SnapshotSet out;
  out.data = map.matrix() * snapshots.data;
  out.bin_frequency = snapshots.bin_frequency;
  return out;
}

HermitianMatrix adapt_covariance(const AdaptationMap& map, const HermitianMatrix& sigma) {
  if (sigma.dim() != map.dim()) throw InvalidInput("adapt_covariance: dimension mismatch");
  return sigma.congruence(map.matrix());
}

}  // namespace steerlab
