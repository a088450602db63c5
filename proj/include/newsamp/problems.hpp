#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newsamp/linalg.hpp"

namespace newsamp {

// Observations behind the averaged objective: rows x_i of the design matrix
// and responses y_i.
struct Dataset {
  Matrix X;  // n x p
  Vector y;  // n

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
  void validate() const;
};

enum class ObjectiveKind {
  ols,
  logistic,
  poisson,
  svm_hinge2,
  svm_smoothed_huber,
};

bool is_glm(ObjectiveKind kind);
bool is_svm(ObjectiveKind kind);
std::string kind_name(ObjectiveKind kind);
ObjectiveKind kind_from_name(const std::string& name);

// Cumulant generating function of a canonical-link GLM with its first two
// derivatives.
struct GlmLink {
  std::function<double(double)> phi;
  std::function<double(double)> phi1;
  std::function<double(double)> phi2;
};

GlmLink glm_link(ObjectiveKind kind);

// Constants entering the convergence coefficients.
//   hessian_bound      K: uniform bound on per-sample Hessian norms
//   hessian_lipschitz  M: Lipschitz constant of the (sub-sampled) Hessian,
//                      +infinity when no such constant is available (SVM)
//   covariate_radius_sq  R_x = max_i ||x_i||^2
//   link_lipschitz     L: Lipschitz constant of phi'' (GLM kinds only)
struct ProblemConstants {
  double hessian_bound = 0.0;
  double hessian_lipschitz = 0.0;
  double covariate_radius_sq = 0.0;
  double link_lipschitz = 0.0;
  bool covered() const { return std::isfinite(hessian_lipschitz); }
};

// Optional inputs for constants that cannot be global:
//   iterates     points whose inner-product range bounds the Poisson link
//   z_bound      explicit bound b on |<x_i, theta>| (overrides iterates)
//   sample_size  sub-sample size entering the SVM surrogate (0 means n)
struct ConstantsQuery {
  std::vector<Vector> iterates;
  std::optional<double> z_bound;
  std::size_t sample_size = 0;
};

// Average-of-n-functions objective f(theta) = (1/n) sum_i f_i(theta) with
// analytic per-sample gradients and Hessians.
//
// GLM kinds:  f_i = phi(<x_i, theta>) - y_i <x_i, theta>.
// SVM kinds:  f_i = 0.5 ||theta||^2 + (n C / 2) loss(y_i <x_i, theta>),
// so the average reproduces the primal SVM objective
// 0.5||theta||^2 + (C/2) sum_i loss_i while keeping the averaged sub-sampled
// Hessian convention unchanged.
//
// All sums over samples use compensated accumulation; results are independent
// of sample ordering to within 1e-12.
class Objective {
 public:
  Objective(Dataset data, ObjectiveKind kind, double svm_penalty = 0.0);

  const Dataset& data() const { return data_; }
  ObjectiveKind kind() const { return kind_; }
  double svm_penalty() const { return svm_penalty_; }
  Index dim() const { return data_.p(); }

  double value(const Vector& theta) const;
  Vector gradient(const Vector& theta) const;
  Vector gradient_sample(const Vector& theta, std::size_t i) const;
  SymMatrix subsampled_hessian(const Vector& theta,
                               std::span<const std::size_t> sample) const;
  SymMatrix full_hessian(const Vector& theta) const;
  // Hessian-vector product at theta, O(n p).
  Vector hessian_vec(const Vector& theta, const Vector& v) const;

  ProblemConstants constants(const ConstantsQuery& query = {}) const;

 private:
  Vector inner(const Vector& theta) const;
  void check_theta(const Vector& theta) const;

  Dataset data_;
  ObjectiveKind kind_;
  double svm_penalty_;
};

// Smoothed Huber classification loss and derivatives in the margin m = y z:
// zero beyond 3/2, quadratic on [1/2, 3/2], linear below 1/2. C^1 at both
// breakpoints.
double smoothed_huber(double margin);
double smoothed_huber_d1(double margin);
double smoothed_huber_d2(double margin);

// Squared hinge max(0, 1 - m)^2; the kink at m = 1 carries zero curvature.
double hinge2(double margin);
double hinge2_d1(double margin);
double hinge2_d2(double margin);

}  // namespace newsamp
