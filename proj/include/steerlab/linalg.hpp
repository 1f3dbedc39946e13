#pragma once

// Dense complex Hermitian / HPD matrix algebra: Jacobi eigendecomposition and
// the spectral matrix functions needed by the adaptation maps.

#include <complex>

#include <Eigen/Dense>

namespace steerlab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Square complex matrix equal to its conjugate transpose.
///
/// The checked constructor rejects inputs whose asymmetry exceeds 1e-12 of the
/// largest entry and then stores the exact Hermitian part (A + A^H) / 2.
/// symmetrize() skips the check and is meant for products that are Hermitian
/// in exact arithmetic (E Sigma E^H and friends).
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const CMatrix& m);

  static HermitianMatrix symmetrize(const CMatrix& m);
  static HermitianMatrix identity(Eigen::Index dim);
  static HermitianMatrix zero(Eigen::Index dim);
  static HermitianMatrix outer(const CVector& v);
  static HermitianMatrix diagonal(const RVector& d);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double frobenius_norm() const { return m_.norm(); }
  double trace() const { return m_.trace().real(); }

  HermitianMatrix operator+(const HermitianMatrix& other) const;
  HermitianMatrix operator-(const HermitianMatrix& other) const;
  HermitianMatrix operator*(double scale) const;
  HermitianMatrix& operator+=(const HermitianMatrix& other);

  /// Re-expresses X with the congruence T X T^H.
  HermitianMatrix congruence(const CMatrix& t) const;

 private:
  struct Unchecked {};
  HermitianMatrix(CMatrix m, Unchecked);

  CMatrix m_;
};

inline HermitianMatrix operator*(double scale, const HermitianMatrix& h) { return h * scale; }

/// eigenvalues sorted descending; eigenvectors are the matching unitary columns.
struct HermitianEigen {
  RVector eigenvalues;
  CMatrix eigenvectors;
};

/// Cyclic complex Jacobi. Deterministic; ties in the sort keep input order.
/// Throws InvalidInput on non-finite entries, NumericalFailure when the
/// off-diagonal mass has not dropped below 1e-14 ||A||_F after 100 sweeps.
HermitianEigen hermitian_eig(const HermitianMatrix& a);

enum class HalfPower { kSqrt, kInvSqrt };

/// Principal A^{1/2} or A^{-1/2} of a PSD matrix.
/// Eigenvalues below -1e-10 ||A||_F raise NotPSD. For the inverse root,
/// eigenvalues are floored at 1e-12 * lambda_max; a matrix with no positive
/// eigenvalue raises SingularMatrix.
HermitianMatrix matrix_power_half(const HermitianMatrix& a, HalfPower power);

inline HermitianMatrix matrix_sqrt(const HermitianMatrix& a) {
  return matrix_power_half(a, HalfPower::kSqrt);
}
inline HermitianMatrix matrix_inv_sqrt(const HermitianMatrix& a) {
  return matrix_power_half(a, HalfPower::kInvSqrt);
}

/// Principal square root of S A^{-1} for HPD S and A.
///
/// S A^{-1} is similar to A^{-1/2} S A^{-1/2}, so the root is assembled as
/// A^{1/2} (A^{-1/2} S A^{-1/2})^{1/2} A^{-1/2} using Hermitian roots only.
/// The result is generally not Hermitian.
CMatrix sqrt_of_product_with_inverse(const HermitianMatrix& s, const HermitianMatrix& a);

/// Inverse of an HPD matrix through its eigendecomposition.
/// Raises SingularMatrix when lambda_min <= 0 or lambda_max / lambda_min > 1e14.
HermitianMatrix invert_hpd(const HermitianMatrix& a);

/// ||x - ref||_F / ||ref||_F (absolute error when ref is zero).
double relative_frobenius_error(const CMatrix& x, const CMatrix& ref);

}  // namespace steerlab
