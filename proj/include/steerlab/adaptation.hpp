#pragma once

// Domain-adaptation maps that carry received signals from the operational
// environment to the free-space reference domain.
//
//   coral               E = Sigma_S^{1/2} Sigma_A^{-1/2}
//   parallel-transport  E = (Sigma_S Sigma_A^{-1})^{1/2}
//   inverse-domain      coral fitted on the means of the inverted correlations;
//                       applied to inverse sample correlations (MVDR).
//
// Both forward variants satisfy E Sigma_A E^H = Sigma_S.

#include <string>
#include <string_view>

#include "steerlab/linalg.hpp"
#include "steerlab/scene.hpp"

namespace steerlab {

enum class MapVariant { kCoral, kParallelTransport, kInverseDomainCoral };

std::string_view to_string(MapVariant v);
/// Accepts "coral", "pt" / "parallel-transport", "inverse" / "inverse-domain-coral".
MapVariant parse_map_variant(std::string_view name);

class AdaptationMap {
 public:
  AdaptationMap(CMatrix e, MapVariant variant, HermitianMatrix sigma_s, HermitianMatrix sigma_a);

  const CMatrix& matrix() const { return e_; }
  MapVariant variant() const { return variant_; }
  const HermitianMatrix& sigma_s() const { return sigma_s_; }
  const HermitianMatrix& sigma_a() const { return sigma_a_; }
  Eigen::Index dim() const { return e_.rows(); }

 private:
  CMatrix e_;
  MapVariant variant_;
  HermitianMatrix sigma_s_;
  HermitianMatrix sigma_a_;
};

/// For kInverseDomainCoral, sigma_s / sigma_a are the means of the inverted
/// reference and adaptation correlations.
AdaptationMap fit_map(const HermitianMatrix& sigma_s, const HermitianMatrix& sigma_a,
                      MapVariant variant);

/// y(l) = E z(l)
SnapshotSet adapt_snapshots(const AdaptationMap& map, const SnapshotSet& snapshots);

/// E Sigma E^H. For the inverse-domain variant `sigma` is an inverse
/// correlation and so is the result.
HermitianMatrix adapt_covariance(const AdaptationMap& map, const HermitianMatrix& sigma);

}  // namespace steerlab
