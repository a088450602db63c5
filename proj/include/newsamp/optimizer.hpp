#pragma once

#include <functional>
#include <optional>

#include "newsamp/problems.hpp"
#include "newsamp/sampling.hpp"
#include "newsamp/trace.hpp"

namespace newsamp {

// Feasible parameter set with exact Euclidean projection.
class ConvexSet {
 public:
  enum class Kind { unconstrained, ball, box };

  static ConvexSet unconstrained();
  static ConvexSet l2_ball(Vector center, double radius);
  static ConvexSet box(Vector lower, Vector upper);

  Kind kind() const { return kind_; }
  Vector project(const Vector& theta) const;
  bool contains(const Vector& theta, double tol = 1e-10) const;
  // Euclidean diameter; +infinity for the unconstrained set.
  double diameter() const;

  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

 private:
  ConvexSet() = default;
  Kind kind_ = Kind::unconstrained;
  Vector center_;
  double radius_ = 0.0;
  Vector lower_, upper_;
};

Vector project(const ConvexSet& set, const Vector& theta);

// Step size eta = 2 / (1 + lambda_min/lambda_threshold + gamma) with the
// sampling correction gamma = step_scale * sqrt(log(p) / sample_size). With
// the correction small this lies in [1, 2).
double adaptive_step(double lambda_min, double lambda_threshold, Index dim,
                     std::size_t sample_size, double step_scale = 1.0);

struct StepMode {
  enum class Kind { fixed, adaptive };
  Kind kind = Kind::adaptive;
  double eta = 1.0;         // fixed mode
  double step_scale = 1.0;  // adaptive mode correction constant

  static StepMode fixed(double eta) {
    return StepMode{Kind::fixed, eta, 0.0};
  }
  static StepMode adaptive(double step_scale = 1.0) {
    return StepMode{Kind::adaptive, 1.0, step_scale};
  }
};

struct NewSampConfig {
  Index rank = 1;  // eigenvalue threshold r; needs rank + 1 <= p
  SampleScheme scheme;
  StepMode step = StepMode::adaptive();
  double eps = 1e-8;  // stop when ||theta^{t+1} - theta^t|| <= eps
  std::size_t max_iters = 100;
  Vector theta0;
  bool record_iterates = true;
};

// Everything an iteration saw, passed to the observer before the iterate
// advances. References are valid only during the call.
struct IterationView {
  std::size_t t;
  const Vector& theta;
  const Vector& theta_next;
  const Vector& grad;
  const std::vector<std::size_t>& sample;
  const SymMatrix& hess_sample;
  const ScalingMatrix& scaling;
  double eta;
  double gamma;
  double lambda_min;  // smallest eigenvalue of the sub-sampled Hessian
};

using IterationObserver = std::function<void(const IterationView&)>;

// Sub-sampled Newton iterations with eigenvalue thresholding:
//   H_{S_t} from the sampling scheme, Q^t from its rank-(r+1) truncation,
//   theta^{t+1} = P_C(theta^t - eta_t Q^t grad f(theta^t)).
// Evaluation failures and degenerate spectra abort with the trace collected
// so far and reason = error.
Trace newsamp_run(const Objective& obj, const NewSampConfig& cfg,
                  const ConvexSet& set,
                  const std::optional<Vector>& reference = {},
                  const IterationObserver& observer = {});

// Identical loop with Q^t the full inverse of H_{S_t}; kept as the unstable
// baseline that thresholding repairs. A numerically singular sub-sampled
// Hessian stops the run with reason = error.
Trace plain_subsampled_newton_run(const Objective& obj,
                                  const NewSampConfig& cfg,
                                  const ConvexSet& set,
                                  const std::optional<Vector>& reference = {});

}  // namespace newsamp
