#include "newsamp/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace newsamp {

namespace {

void sign_normalize_columns(Matrix& u) {
  for (Index c = 0; c < u.cols(); ++c) {
    for (Index i = 0; i < u.rows(); ++i) {
      if (std::abs(u(i, c)) > 1e-12) {
        if (u(i, c) < 0.0) u.col(c) = -u.col(c);
        break;
      }
    }
  }
}

}  // namespace

SymMatrix::SymMatrix(Matrix m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw InvalidInput("symmetric matrix must be square and non-empty");
  if (!m.allFinite())
    throw InvalidInput("symmetric matrix has non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw InvalidInput("matrix is not symmetric (asymmetry " +
                       std::to_string(asym) + ")");
  // Store exact symmetry: average the two triangles.
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i + 1; j < m.cols(); ++j) {
      double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  m_ = std::move(m);
}

SymMatrix SymMatrix::trusted(Matrix m) {
  SymMatrix out;
  out.m_ = std::move(m);
  return out;
}

SpectralDecomposition full_eigen(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat());
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("symmetric eigendecomposition failed to converge");
  SpectralDecomposition dec;
  dec.values = solver.eigenvalues().reverse();
  dec.vectors = solver.eigenvectors().rowwise().reverse();
  sign_normalize_columns(dec.vectors);
  return dec;
}

TruncatedEigen truncated_eigen(const SymMatrix& h, Index k) {
  if (k < 1 || k > h.dim())
    throw InvalidRank("truncation rank " + std::to_string(k) +
                      " outside [1, " + std::to_string(h.dim()) + "]");
  SpectralDecomposition dec = full_eigen(h);
  TruncatedEigen out;
  out.values = dec.values.head(k);
  out.vectors = dec.vectors.leftCols(k);
  return out;
}

ScalingMatrix::ScalingMatrix(Index p, double lambda_threshold,
                             Matrix leading_vectors, Vector leading_values)
    : p_(p),
      lambda_threshold_(lambda_threshold),
      leading_vectors_(std::move(leading_vectors)),
      leading_values_(std::move(leading_values)) {
  if (lambda_threshold_ <= 0.0)
    throw DegenerateSpectrum("threshold eigenvalue must be positive");
  if (leading_vectors_.rows() != p_ ||
      leading_vectors_.cols() != leading_values_.size())
    throw InvalidInput("scaling matrix factor dimensions disagree");
  for (Index i = 0; i < leading_values_.size(); ++i) {
    if (leading_values_[i] < lambda_threshold_)
      throw InvalidInput("leading eigenvalues must dominate the threshold");
  }
}

Vector ScalingMatrix::apply(const Vector& v) const {
  if (v.size() != p_)
    throw InvalidInput("vector length " + std::to_string(v.size()) +
                       " does not match dimension " + std::to_string(p_));
  Vector coeffs = leading_vectors_.transpose() * v;  // r
  for (Index i = 0; i < coeffs.size(); ++i)
    coeffs[i] *= 1.0 / leading_values_[i] - 1.0 / lambda_threshold_;
  return v / lambda_threshold_ + leading_vectors_ * coeffs;
}

Matrix ScalingMatrix::dense() const {
  Matrix out = Matrix::Identity(p_, p_) / lambda_threshold_;
  for (Index i = 0; i < leading_values_.size(); ++i) {
    out += (1.0 / leading_values_[i] - 1.0 / lambda_threshold_) *
           leading_vectors_.col(i) * leading_vectors_.col(i).transpose();
  }
  return out;
}

ScalingMatrix scaling_from_spectrum(const SpectralDecomposition& dec, Index r) {
  const Index p = dec.values.size();
  if (r < 1 || r + 1 > p)
    throw InvalidRank("rank threshold " + std::to_string(r) +
                      " needs r >= 1 and r + 1 <= " + std::to_string(p));
  const double lambda_threshold = dec.values[r];
  if (lambda_threshold <= eigen_zero_tol(dec.values[0]))
    throw DegenerateSpectrum(
        "threshold eigenvalue " + std::to_string(lambda_threshold) +
        " is numerically zero; inverse scaling would be unbounded");
  return ScalingMatrix(p, lambda_threshold, dec.vectors.leftCols(r),
                       dec.values.head(r));
}

ScalingMatrix build_scaling_matrix(const SymMatrix& h, Index r) {
  if (r < 1 || r + 1 > h.dim())
    throw InvalidRank("rank threshold " + std::to_string(r) +
                      " needs r >= 1 and r + 1 <= " + std::to_string(h.dim()));
  return scaling_from_spectrum(full_eigen(h), r);
}

Vector apply_scaling(const ScalingMatrix& q, const Vector& v) {
  return q.apply(v);
}

double spectral_norm(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat(),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("symmetric eigendecomposition failed to converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace newsamp
