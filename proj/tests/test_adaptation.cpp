#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "steerlab/adaptation.hpp"
#include "steerlab/covariance.hpp"
#include "steerlab/error.hpp"

using namespace steerlab;

namespace {

HermitianMatrix diag2(double a, double b) {
  RVector d(2);
  d << a, b;
  return HermitianMatrix::diagonal(d);
}

}  // namespace

TEST_CASE("identical statistics give the identity map") {
  std::mt19937_64 rng(1);
  const HermitianMatrix a(oracle::random_hpd(5, rng));
  for (auto v : {MapVariant::kCoral, MapVariant::kParallelTransport})
    CHECK(relative_frobenius_error(fit_map(a, a, v).matrix(), CMatrix::Identity(5, 5)) < 1e-10);
}

TEST_CASE("diagonal commuting pair") {
  const auto s = diag2(4.0, 1.0);
  const auto a = diag2(1.0, 4.0);
  CMatrix expect = CMatrix::Zero(2, 2);
  expect(0, 0) = 2.0;
  expect(1, 1) = 0.5;
  CHECK(relative_frobenius_error(fit_map(s, a, MapVariant::kCoral).matrix(), expect) < 1e-14);
  CHECK(relative_frobenius_error(fit_map(s, a, MapVariant::kParallelTransport).matrix(), expect) < 1e-14);
}

TEST_CASE("maps align second-order statistics") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const HermitianMatrix s(oracle::random_hpd(9, rng));
    const HermitianMatrix a(oracle::random_hpd(9, rng));
    for (auto v : {MapVariant::kCoral, MapVariant::kParallelTransport}) {
      const auto map = fit_map(s, a, v);
      CHECK(relative_frobenius_error(adapt_covariance(map, a).matrix(), s.matrix()) < 1e-10);
    }
  }
}

TEST_CASE("coral and parallel transport coincide for commuting pairs") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto [s, a] = oracle::random_commuting_hpd(9, rng);
    const auto e = fit_map(HermitianMatrix(s), HermitianMatrix(a), MapVariant::kCoral).matrix();
    const auto pt = fit_map(HermitianMatrix(s), HermitianMatrix(a), MapVariant::kParallelTransport).matrix();
    CHECK(relative_frobenius_error(pt, e) < 1e-9);
  }
}

TEST_CASE("adapt snapshots and covariance") {
  std::mt19937_64 rng(4);
  const HermitianMatrix s(oracle::random_hpd(4, rng));
  const HermitianMatrix a(oracle::random_hpd(4, rng));
  const auto map = fit_map(s, a, MapVariant::kCoral);
  SnapshotSet z{oracle::random_complex(4, 40, rng), 100.0};
  const auto y = adapt_snapshots(map, z);
  CHECK(y.bin_frequency == 100.0);
  CHECK(relative_frobenius_error(sample_correlation(y).matrix(),
                                 adapt_covariance(map, sample_correlation(z)).matrix()) < 1e-10);

  const auto id = AdaptationMap(CMatrix::Identity(4, 4), MapVariant::kCoral, s, s);
  CHECK(adapt_snapshots(id, z).data == z.data);
  CHECK(relative_frobenius_error(adapt_covariance(id, a).matrix(), a.matrix()) < 1e-15);
  const auto two = AdaptationMap(2.0 * CMatrix::Identity(4, 4), MapVariant::kCoral, s, s);
  CHECK(relative_frobenius_error(sample_correlation(adapt_snapshots(two, z)).matrix(),
                                 4.0 * sample_correlation(z).matrix()) < 1e-14);

  SnapshotSet wrong{oracle::random_complex(3, 5, rng), 0.0};
  CHECK_THROWS_AS(adapt_snapshots(map, wrong), InvalidInput);
  CHECK_THROWS_AS(adapt_covariance(map, HermitianMatrix::identity(3)), InvalidInput);
  CHECK_THROWS_AS(fit_map(s, HermitianMatrix::identity(3), MapVariant::kCoral), InvalidInput);
}

TEST_CASE("rank-one expansion of the adapted covariance") {
  std::mt19937_64 rng(5);
  const HermitianMatrix s(oracle::random_hpd(6, rng));
  const HermitianMatrix a(oracle::random_hpd(6, rng));
  const CVector ds = oracle::random_complex(6, 1, rng).col(0);
  for (auto v : {MapVariant::kCoral, MapVariant::kParallelTransport}) {
    const auto map = fit_map(s, a, v);
    const CVector eds = map.matrix() * ds;
    const auto lhs = adapt_covariance(map, a + HermitianMatrix::outer(ds));
    CHECK(relative_frobenius_error(lhs.matrix(), (s + HermitianMatrix::outer(eds)).matrix()) < 1e-10);
  }
}

TEST_CASE("inverse-domain variant maps inverse statistics") {
  std::mt19937_64 rng(6);
  const HermitianMatrix s(oracle::random_hpd(4, rng));
  const HermitianMatrix a(oracle::random_hpd(4, rng));
  const auto map = fit_map(invert_hpd(s), invert_hpd(a), MapVariant::kInverseDomainCoral);
  CHECK(map.variant() == MapVariant::kInverseDomainCoral);
  CHECK(relative_frobenius_error(adapt_covariance(map, invert_hpd(a)).matrix(), invert_hpd(s).matrix()) < 1e-9);
}

TEST_CASE("variant names") {
  CHECK(parse_map_variant("coral") == MapVariant::kCoral);
  CHECK(parse_map_variant("pt") == MapVariant::kParallelTransport);
  CHECK(parse_map_variant("parallel-transport") == MapVariant::kParallelTransport);
  CHECK(parse_map_variant("inverse-domain-coral") == MapVariant::kInverseDomainCoral);
  for (auto v : {MapVariant::kCoral, MapVariant::kParallelTransport, MapVariant::kInverseDomainCoral})
    CHECK(parse_map_variant(to_string(v)) == v);
  CHECK_THROWS_AS(parse_map_variant("nope"), InvalidInput);
}

TEST_CASE("singular adaptation statistics propagate") {
  const auto s = HermitianMatrix::identity(2);
  CHECK_THROWS_AS(fit_map(s, HermitianMatrix::zero(2), MapVariant::kCoral), SingularMatrix);
  CHECK_THROWS_AS(fit_map(s, HermitianMatrix::zero(2), MapVariant::kParallelTransport), SingularMatrix);
}
