#include "steerlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "steerlab/error.hpp"

namespace steerlab {
namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalThreshold = 1e-14;
constexpr double kNegativeEigenTolerance = 1e-10;
constexpr double kInvSqrtFloor = 1e-12;
constexpr double kMaxCondition = 1e14;

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

double off_diagonal_norm(const CMatrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

HermitianMatrix spectral_function(const HermitianEigen& eig, const RVector& values) {
  const CMatrix& v = eig.eigenvectors;
  return HermitianMatrix::symmetrize(v * values.cast<Complex>().asDiagonal() * v.adjoint());
}

}  // namespace

HermitianMatrix::HermitianMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw InvalidInput("HermitianMatrix: expected a non-empty square matrix, got " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  if (!all_finite(m)) throw InvalidInput("HermitianMatrix: non-finite entry");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance * scale)
    throw InvalidInput("HermitianMatrix: asymmetry " + std::to_string(asym / scale) +
                       " (relative) exceeds tolerance");
  m_ = hermitian_part(m);
}

HermitianMatrix HermitianMatrix::symmetrize(const CMatrix& m) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw InvalidInput("HermitianMatrix::symmetrize: expected a non-empty square matrix");
  return HermitianMatrix(hermitian_part(m), Unchecked{});
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  if (dim < 1) throw InvalidInput("HermitianMatrix::identity: dim must be >= 1");
  return HermitianMatrix(CMatrix::Identity(dim, dim), Unchecked{});
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
  if (dim < 1) throw InvalidInput("HermitianMatrix::zero: dim must be >= 1");
  return HermitianMatrix(CMatrix::Zero(dim, dim), Unchecked{});
}

HermitianMatrix HermitianMatrix::outer(const CVector& v) {
  if (v.size() < 1) throw InvalidInput("HermitianMatrix::outer: empty vector");
  return symmetrize(v * v.adjoint());
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& d) {
  if (d.size() < 1) throw InvalidInput("HermitianMatrix::diagonal: empty diagonal");
  return HermitianMatrix(CMatrix(d.cast<Complex>().asDiagonal()), Unchecked{});
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
  if (other.dim() != dim()) throw InvalidInput("HermitianMatrix: dimension mismatch in +");
  return HermitianMatrix(m_ + other.m_, Unchecked{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
  if (other.dim() != dim()) throw InvalidInput("HermitianMatrix: dimension mismatch in -");
  return HermitianMatrix(m_ - other.m_, Unchecked{});
}

HermitianMatrix HermitianMatrix::operator*(double scale) const {
  return HermitianMatrix(m_ * scale, Unchecked{});
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other) {
  if (other.dim() != dim()) throw InvalidInput("HermitianMatrix: dimension mismatch in +=");
  m_ += other.m_;
  return *this;
}

HermitianMatrix HermitianMatrix::congruence(const CMatrix& t) const {
  if (t.cols() != dim()) throw InvalidInput("HermitianMatrix::congruence: dimension mismatch");
  return symmetrize(t * m_ * t.adjoint());
}

HermitianEigen hermitian_eig(const HermitianMatrix& h) {
  CMatrix a = h.matrix();
  const Eigen::Index n = a.rows();
  if (!all_finite(a)) throw InvalidInput("hermitian_eig: non-finite entry");

  CMatrix v = CMatrix::Identity(n, n);
  const double threshold = kOffDiagonalThreshold * a.norm();

  bool converged = false;
  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) {
      converged = true;
      break;
    }
    if (sweep == kMaxSweeps) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        // Phase u rotates a_pq onto the real axis, then a real rotation
        // annihilates it: J = diag(1, conj(u)) * [[c, s], [-s, c]].
        const Complex u = apq / r;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex jpp = c;
        const Complex jpq = s;
        const Complex jqp = -s * std::conj(u);
        const Complex jqq = c * std::conj(u);

        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }
  if (!converged)
    throw NumericalFailure("hermitian_eig: Jacobi iteration did not converge in " +
                           std::to_string(kMaxSweeps) + " sweeps");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() > a(j, j).real();
  });

  HermitianEigen out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(src, src).real();
    out.eigenvectors.col(k) = v.col(src);
  }
  return out;
}

HermitianMatrix matrix_power_half(const HermitianMatrix& a, HalfPower power) {
  const HermitianEigen eig = hermitian_eig(a);
  const RVector& lambda = eig.eigenvalues;
  const double lambda_max = lambda(0);
  const double lambda_min = lambda(lambda.size() - 1);
  if (lambda_min < -kNegativeEigenTolerance * a.frobenius_norm())
    throw NotPSD("matrix_power_half: eigenvalue " + std::to_string(lambda_min) + " is negative");

  RVector f(lambda.size());
  if (power == HalfPower::kSqrt) {
    for (Eigen::Index i = 0; i < lambda.size(); ++i) f(i) = std::sqrt(std::max(lambda(i), 0.0));
  } else {
    if (!(lambda_max > 0.0))
      throw SingularMatrix("matrix_power_half: no positive eigenvalue for the inverse root");
    const double floor = lambda_max * kInvSqrtFloor;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
      f(i) = 1.0 / std::sqrt(std::max(lambda(i), floor));
  }
  return spectral_function(eig, f);
}

CMatrix sqrt_of_product_with_inverse(const HermitianMatrix& s, const HermitianMatrix& a) {
  if (s.dim() != a.dim())
    throw InvalidInput("sqrt_of_product_with_inverse: dimension mismatch");
  const HermitianEigen eig = hermitian_eig(a);
  const RVector& lambda = eig.eigenvalues;
  if (!(lambda(lambda.size() - 1) > 0.0))
    throw SingularMatrix("sqrt_of_product_with_inverse: A is not positive definite");
  const HermitianMatrix a_half = spectral_function(eig, lambda.cwiseSqrt());
  const HermitianMatrix a_inv_half = spectral_function(eig, lambda.cwiseSqrt().cwiseInverse());
  const HermitianMatrix whitened = s.congruence(a_inv_half.matrix());
  const HermitianMatrix root = matrix_sqrt(whitened);
  return a_half.matrix() * root.matrix() * a_inv_half.matrix();
}

HermitianMatrix invert_hpd(const HermitianMatrix& a) {
  const HermitianEigen eig = hermitian_eig(a);
  const RVector& lambda = eig.eigenvalues;
  const double lambda_max = lambda(0);
  const double lambda_min = lambda(lambda.size() - 1);
  if (!(lambda_min > 0.0))
    throw SingularMatrix("invert_hpd: matrix is not positive definite (lambda_min = " +
                         std::to_string(lambda_min) + ")");
  if (lambda_max / lambda_min > kMaxCondition)
    throw SingularMatrix("invert_hpd: condition number " +
                         std::to_string(lambda_max / lambda_min) + " exceeds 1e14");
  return spectral_function(eig, lambda.cwiseInverse());
}

double relative_frobenius_error(const CMatrix& x, const CMatrix& ref) {
  const double denom = ref.norm();
  const double diff = (x - ref).norm();
  return denom > 0.0 ? diff / denom : diff;
}

}  // namespace steerlab
