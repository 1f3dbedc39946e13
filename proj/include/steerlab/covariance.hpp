#pragma once

#include <vector>

#include "steerlab/geometry.hpp"
#include "steerlab/linalg.hpp"
#include "steerlab/scene.hpp"

namespace steerlab {

/// (1/L) sum_l z(l) z(l)^H
HermitianMatrix sample_correlation(const SnapshotSet& snapshots);

/// d d^H + eps I
HermitianMatrix reference_correlation(const SteeringVector& d, double eps);

/// Arithmetic mean; InvalidInput on an empty list or mismatched dimensions.
HermitianMatrix mean_correlation(const std::vector<HermitianMatrix>& mats);

/// Running sum of correlation matrices, divided once on read-out.
class CorrelationAccumulator {
 public:
  void add(const HermitianMatrix& m);
  /// Merges partial sums accumulated elsewhere (e.g. in another worker).
  void merge(const CorrelationAccumulator& other);
  std::size_t count() const { return count_; }
  HermitianMatrix mean() const;

 private:
  CMatrix sum_;
  std::size_t count_ = 0;
};

/// Adds eps I when the smallest eigenvalue is below eps.
HermitianMatrix regularize(const HermitianMatrix& m, double eps);

}  // namespace steerlab
