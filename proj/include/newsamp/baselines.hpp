#pragma once

#include <optional>

#include "newsamp/optimizer.hpp"

namespace newsamp {

enum class BaselineMethod { gd, agd, newton, bfgs, lbfgs, sgd, adagrad };

std::string baseline_name(BaselineMethod method);
BaselineMethod baseline_from_name(const std::string& name);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::gd;
  // Batch methods use a constant step size. exact_line_step replaces it with
  // the quadratic-exact step along the search direction (uses one
  // Hessian-vector product per iteration).
  double step = 1.0;
  bool exact_line_step = false;
  std::size_t memory = 10;  // L-BFGS history length
  // SGD step schedule gamma_t = sgd_step / (1 + t / sgd_decay).
  double sgd_step = 1.0;
  double sgd_decay = 1.0;
  // AdaGrad per-coordinate rule gamma / sqrt(ada_floor + sum of squared
  // gradient entries).
  double ada_step = 0.1;
  double ada_floor = 1e-8;
  double eps = 1e-8;
  std::size_t max_iters = 1000;
  Vector theta0;
  std::uint64_t seed = 0;
  bool record_iterates = true;
  // Stochastic methods can subsample their records; the objective and
  // gradient norm are only evaluated at recorded iterations.
  std::size_t record_every = 1;
  // A run is flagged divergent when f exceeds 10 |f(theta0)| + 1.
  double divergence_factor = 10.0;
};

// Runs one reference method with the shared trace contract: projection after
// every update, stop when the update moves less than eps or at max_iters.
Trace run_baseline(const Objective& obj, const BaselineConfig& cfg,
                   const ConvexSet& set,
                   const std::optional<Vector>& reference = {});

// High-precision solver used to produce reference minimizers: full Newton
// with halving damping whenever the step would increase f, run to the given
// gradient-norm tolerance. Throws NumericalFailure if it stalls.
Vector newton_reference(const Objective& obj, const Vector& theta0,
                        double grad_tol = 1e-12, std::size_t max_iters = 200);

}  // namespace newsamp
