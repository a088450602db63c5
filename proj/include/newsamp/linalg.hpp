#pragma once

#include "newsamp/errors.hpp"
#include "newsamp/numeric.hpp"

namespace newsamp {

// Dense symmetric matrix. The constructor checks symmetry up to roundoff and
// stores an exactly symmetric copy; trusted() skips the check for matrices
// produced symmetric by construction.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix m);
  static SymMatrix trusted(Matrix m);

  Index dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  SymMatrix() = default;
  Matrix m_;
};

// Leading part of a symmetric eigendecomposition: k algebraically largest
// eigenvalues (non-increasing) with orthonormal eigenvectors as columns.
struct TruncatedEigen {
  Vector values;   // k, non-increasing
  Matrix vectors;  // p x k, orthonormal columns
  Index rank() const { return values.size(); }
};

// Full spectrum in non-increasing order; vectors sign-normalized so the first
// coordinate above 1e-12 in magnitude is positive.
struct SpectralDecomposition {
  Vector values;   // p, non-increasing
  Matrix vectors;  // p x p
};

// Scaling matrix obtained by thresholding all eigenvalues below the r-th at
// the (r+1)-th before inversion:
//   Q = lambda_{r+1}^{-1} I + U_r (Lambda_r^{-1} - lambda_{r+1}^{-1} I) U_r^T.
// Stored in factored form; apply() costs O(p r).
class ScalingMatrix {
 public:
  ScalingMatrix(Index p, double lambda_threshold, Matrix leading_vectors,
                Vector leading_values);

  Index dim() const { return p_; }
  Index rank() const { return leading_values_.size(); }
  double lambda_threshold() const { return lambda_threshold_; }  // lambda_{r+1}
  const Matrix& leading_vectors() const { return leading_vectors_; }
  const Vector& leading_values() const { return leading_values_; }
  double norm2() const { return 1.0 / lambda_threshold_; }

  Vector apply(const Vector& v) const;
  // Materializes the p x p matrix; test/diagnostic use, O(p^2 r).
  Matrix dense() const;

 private:
  Index p_;
  double lambda_threshold_;
  Matrix leading_vectors_;
  Vector leading_values_;
};

// Full dense symmetric eigendecomposition, descending order.
SpectralDecomposition full_eigen(const SymMatrix& a);

// Largest k eigenvalues and eigenvectors. Throws InvalidRank unless
// 1 <= k <= dim.
TruncatedEigen truncated_eigen(const SymMatrix& h, Index k);

// Builds the thresholded scaling matrix from a rank-(r+1) truncation of h.
// Throws DegenerateSpectrum when lambda_{r+1} <= 1e-10 * max(1, lambda_1).
ScalingMatrix build_scaling_matrix(const SymMatrix& h, Index r);

// Same, reusing an already computed spectrum of h.
ScalingMatrix scaling_from_spectrum(const SpectralDecomposition& dec, Index r);

Vector apply_scaling(const ScalingMatrix& q, const Vector& v);

// max_i |lambda_i(a)|
double spectral_norm(const SymMatrix& a);

// Zero tolerance used when deciding that a threshold eigenvalue is
// numerically zero.
inline double eigen_zero_tol(double lambda_max) {
  return 1e-10 * std::max(1.0, lambda_max);
}

}  // namespace newsamp
