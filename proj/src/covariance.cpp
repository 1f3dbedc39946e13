#include "steerlab/covariance.hpp"

#include "steerlab/error.hpp"

namespace steerlab {

HermitianMatrix sample_correlation(const SnapshotSet& snapshots) {
  if (snapshots.num_snapshots() < 1 || snapshots.num_elements() < 1)
    throw InvalidInput("sample_correlation: empty snapshot set");
  const double inv_l = 1.0 / static_cast<double>(snapshots.num_snapshots());
  return HermitianMatrix::symmetrize(inv_l * (snapshots.data * snapshots.data.adjoint()));
}

HermitianMatrix reference_correlation(const SteeringVector& d, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("reference_correlation: eps must be positive");
  return HermitianMatrix::outer(d) + HermitianMatrix::identity(d.size()) * eps;
}

HermitianMatrix mean_correlation(const std::vector<HermitianMatrix>& mats) {
  CorrelationAccumulator acc;
  for (const auto& m : mats) acc.add(m);
  return acc.mean();
}

void CorrelationAccumulator::add(const HermitianMatrix& m) {
  if (count_ == 0) {
    sum_ = m.matrix();
  } else {
    if (m.dim() != sum_.rows()) throw InvalidInput("mean_correlation: dimension mismatch");
    sum_ += m.matrix();
  }
  ++count_;
}

void CorrelationAccumulator::merge(const CorrelationAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  if (other.sum_.rows() != sum_.rows()) throw InvalidInput("mean_correlation: dimension mismatch");
  sum_ += other.sum_;
  count_ += other.count_;
}

HermitianMatrix CorrelationAccumulator::mean() const {
  if (count_ == 0) throw InvalidInput("mean_correlation: no matrices");
  return HermitianMatrix::symmetrize(sum_ / static_cast<double>(count_));
}

HermitianMatrix regularize(const HermitianMatrix& m, double eps) {
  const HermitianEigen eig = hermitian_eig(m);
  if (eig.eigenvalues(eig.eigenvalues.size() - 1) < eps)
    return m + HermitianMatrix::identity(m.dim()) * eps;
  return m;
}

}  // namespace steerlab
