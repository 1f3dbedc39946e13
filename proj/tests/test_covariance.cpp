#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "steerlab/covariance.hpp"
#include "steerlab/error.hpp"

using namespace steerlab;

TEST_CASE("sample correlation examples") {
  SnapshotSet one;
  one.data = CMatrix(2, 1);
  one.data << 1.0, Complex(0.0, 1.0);
  const auto r = sample_correlation(one);
  CHECK(std::abs(r(0, 0) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(r(0, 1) - Complex(0.0, -1.0)) < 1e-15);
  CHECK(std::abs(r(1, 0) - Complex(0.0, 1.0)) < 1e-15);

  SnapshotSet basis{CMatrix::Identity(4, 4), 0.0};
  CHECK(relative_frobenius_error(sample_correlation(basis).matrix(), 0.25 * CMatrix::Identity(4, 4)) < 1e-15);

  std::mt19937_64 rng(1);
  const std::size_t l = 100000;
  SnapshotSet g{oracle::random_complex(3, static_cast<Eigen::Index>(l), rng) / std::sqrt(2.0), 0.0};
  const auto rg = sample_correlation(g);
  const double tol = 5.0 / std::sqrt(static_cast<double>(l));
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(std::abs(rg(i, j) - (i == j ? 1.0 : 0.0)) < tol);

  double tr = 0.0;
  for (Eigen::Index c = 0; c < g.data.cols(); ++c) tr += g.data.col(c).squaredNorm();
  CHECK(rg.trace() == doctest::Approx(tr / static_cast<double>(l)));

  SnapshotSet empty{CMatrix(3, 0), 0.0};
  CHECK_THROWS_AS(sample_correlation(empty), InvalidInput);
}

TEST_CASE("sample correlation ignores snapshot order") {
  std::mt19937_64 rng(2);
  SnapshotSet s{oracle::random_complex(4, 30, rng), 0.0};
  SnapshotSet p = s;
  std::vector<Eigen::Index> perm(30);
  for (Eigen::Index i = 0; i < 30; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  for (Eigen::Index i = 0; i < 30; ++i) p.data.col(i) = s.data.col(perm[static_cast<std::size_t>(i)]);
  CHECK(relative_frobenius_error(sample_correlation(p).matrix(), sample_correlation(s).matrix()) < 1e-14);
}

TEST_CASE("reference correlation spectrum") {
  const CVector zero = CVector::Zero(3);
  CHECK(relative_frobenius_error(reference_correlation(zero, 1e-7).matrix(), 1e-7 * CMatrix::Identity(3, 3)) < 1e-15);
  CVector d = CVector::Zero(5);
  d(1) = Complex(0.0, 1.0);
  const auto eig = hermitian_eig(reference_correlation(d, 1e-7));
  CHECK(eig.eigenvalues(0) == doctest::Approx(1.0 + 1e-7));
  for (Eigen::Index i = 1; i < 5; ++i) CHECK(eig.eigenvalues(i) == doctest::Approx(1e-7).epsilon(1e-6));
  CHECK_THROWS_AS(reference_correlation(d, 0.0), InvalidInput);
}

TEST_CASE("mean correlation") {
  std::mt19937_64 rng(3);
  const HermitianMatrix a(oracle::random_hpd(4, rng));
  CHECK(relative_frobenius_error(mean_correlation({a}).matrix(), a.matrix()) < 1e-15);
  const HermitianMatrix b = HermitianMatrix::identity(4) * 2.0 - a;
  CHECK(relative_frobenius_error(mean_correlation({a, b}).matrix(), CMatrix::Identity(4, 4)) < 1e-14);
  CHECK_THROWS_AS(mean_correlation({}), InvalidInput);
  CHECK_THROWS_AS(mean_correlation({a, HermitianMatrix::identity(3)}), InvalidInput);

  const HermitianMatrix c(oracle::random_hpd(4, rng));
  const auto m1 = mean_correlation({a * 3.0, c * 3.0});
  const auto m2 = mean_correlation({a, c}) * 3.0;
  CHECK(relative_frobenius_error(m1.matrix(), m2.matrix()) < 1e-14);

  std::vector<CVector> ds;
  double mean_norm = 0.0;
  std::vector<HermitianMatrix> refs;
  for (int j = 0; j < 200; ++j) {
    ds.push_back(oracle::random_complex(9, 1, rng).col(0));
    mean_norm += ds.back().squaredNorm() / 200.0;
    refs.push_back(reference_correlation(ds.back(), 1e-7));
  }
  CHECK(mean_correlation(refs).trace() == doctest::Approx(mean_norm + 9e-7));
}

TEST_CASE("accumulator merge equals sequential accumulation") {
  std::mt19937_64 rng(4);
  std::vector<HermitianMatrix> mats;
  for (int i = 0; i < 10; ++i) mats.emplace_back(oracle::random_hpd(3, rng));
  CorrelationAccumulator all;
  CorrelationAccumulator left;
  CorrelationAccumulator right;
  for (int i = 0; i < 10; ++i) {
    all.add(mats[static_cast<std::size_t>(i)]);
    (i < 4 ? left : right).add(mats[static_cast<std::size_t>(i)]);
  }
  left.merge(right);
  CHECK(left.count() == 10);
  CHECK(relative_frobenius_error(left.mean().matrix(), all.mean().matrix()) < 1e-14);
}

TEST_CASE("regularize only touches near-singular matrices") {
  const auto id = HermitianMatrix::identity(3);
  CHECK(relative_frobenius_error(regularize(id, 1e-7).matrix(), id.matrix()) == 0.0);
  const auto z = regularize(HermitianMatrix::zero(3), 1e-7);
  CHECK(relative_frobenius_error(z.matrix(), 1e-7 * CMatrix::Identity(3, 3)) < 1e-15);
}
