#include "newsamp/optimizer.hpp"

#include <chrono>
#include <cmath>

namespace newsamp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_config(const Objective& obj, const NewSampConfig& cfg) {
  const Index p = obj.dim();
  if (cfg.rank < 1 || cfg.rank + 1 > p)
    throw InvalidRank("rank threshold needs 1 <= r and r + 1 <= p");
  if (cfg.eps <= 0.0) throw InvalidInput("stopping tolerance must be positive");
  if (cfg.step.kind == StepMode::Kind::fixed && cfg.step.eta <= 0.0)
    throw InvalidInput("fixed step size must be positive");
  if (cfg.theta0.size() != p)
    throw InvalidInput("initial iterate does not match problem dimension");
}

}  // namespace

ConvexSet ConvexSet::unconstrained() { return ConvexSet{}; }

ConvexSet ConvexSet::l2_ball(Vector center, double radius) {
  if (radius <= 0.0) throw InvalidInput("ball radius must be positive");
  ConvexSet s;
  s.kind_ = Kind::ball;
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size())
    throw InvalidInput("box bounds must have equal length");
  for (Index i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i])
      throw InvalidInput("box lower bound exceeds the upper bound");
  }
  ConvexSet s;
  s.kind_ = Kind::box;
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

Vector ConvexSet::project(const Vector& theta) const {
  switch (kind_) {
    case Kind::unconstrained:
      return theta;
    case Kind::ball: {
      if (theta.size() != center_.size())
        throw InvalidInput("vector does not match the ball dimension");
      Vector d = theta - center_;
      double norm = d.norm();
      if (norm <= radius_) return theta;
      return center_ + d * (radius_ / norm);
    }
    case Kind::box: {
      if (theta.size() != lower_.size())
        throw InvalidInput("vector does not match the box dimension");
      return theta.cwiseMax(lower_).cwiseMin(upper_);
    }
  }
  return theta;
}

bool ConvexSet::contains(const Vector& theta, double tol) const {
  return (theta - project(theta)).norm() <= tol;
}

double ConvexSet::diameter() const {
  switch (kind_) {
    case Kind::unconstrained:
      return std::numeric_limits<double>::infinity();
    case Kind::ball:
      return 2.0 * radius_;
    case Kind::box:
      return (upper_ - lower_).norm();
  }
  return std::numeric_limits<double>::infinity();
}

Vector project(const ConvexSet& set, const Vector& theta) {
  return set.project(theta);
}

double adaptive_step(double lambda_min, double lambda_threshold, Index dim,
                     std::size_t sample_size, double step_scale) {
  if (lambda_threshold <= 0.0)
    throw DegenerateSpectrum("threshold eigenvalue must be positive");
  if (lambda_min < 0.0 || lambda_min > lambda_threshold)
    throw InvalidInput("needs 0 <= lambda_min <= lambda_threshold");
  if (dim < 1 || sample_size < 1)
    throw InvalidInput("dimension and sample size must be positive");
  double gamma = step_scale * std::sqrt(std::log(static_cast<double>(dim)) /
                                        static_cast<double>(sample_size));
  return 2.0 / (1.0 + lambda_min / lambda_threshold + gamma);
}

namespace {

// Shared loop for the thresholded and plain sub-sampled Newton methods.
// `make_direction` returns the scaled gradient Q grad (or throws), and fills
// the per-iteration eigen data.
struct StepInfo {
  double eta = 0.0;
  double gamma = 0.0;
  std::optional<double> lambda_threshold;
  double lambda_min = 0.0;
};

template <typename DirectionFn>
Trace run_loop(const Objective& obj, const NewSampConfig& cfg,
               const ConvexSet& set, const std::optional<Vector>& reference,
               DirectionFn&& make_direction) {
  validate_config(obj, cfg);
  Trace trace;
  const auto start = Clock::now();
  Vector theta = set.project(cfg.theta0);
  SampleStream stream(cfg.scheme, static_cast<std::size_t>(obj.data().n()));

  auto make_record = [&](std::size_t t, double f, double gnorm) {
    TraceRecord rec;
    rec.t = t;
    rec.objective = f;
    rec.grad_norm = gnorm;
    if (reference) rec.dist = (theta - *reference).norm();
    rec.elapsed_s = seconds_since(start);
    if (cfg.record_iterates) rec.theta = theta;
    return rec;
  };

  std::size_t t = 0;
  while (true) {
    double f;
    Vector grad;
    try {
      f = obj.value(theta);
      grad = obj.gradient(theta);
    } catch (const Error& e) {
      trace.reason = StopReason::error;
      trace.error_message = e.what();
      trace.iterations = t;
      return trace;
    }
    if (t >= cfg.max_iters) {
      trace.records.push_back(make_record(t, f, grad.norm()));
      trace.reason = StopReason::max_iters;
      trace.iterations = t;
      return trace;
    }

    std::vector<std::size_t> sample;
    Vector direction;
    StepInfo info;
    try {
      sample = stream.next(t);
      direction = make_direction(t, theta, grad, sample, info);
    } catch (const Error& e) {
      trace.records.push_back(make_record(t, f, grad.norm()));
      trace.reason = StopReason::error;
      trace.error_message = e.what();
      trace.iterations = t;
      return trace;
    }

    Vector theta_next = set.project(theta - info.eta * direction);
    TraceRecord rec = make_record(t, f, grad.norm());
    rec.step = info.eta;
    rec.lambda_threshold = info.lambda_threshold;
    rec.lambda_min = info.lambda_min;
    trace.records.push_back(std::move(rec));

    if (!theta_next.allFinite()) {
      trace.reason = StopReason::error;
      trace.error_message = "numerical failure: non-finite iterate";
      trace.iterations = t;
      return trace;
    }

    double moved = (theta_next - theta).norm();
    theta = std::move(theta_next);
    ++t;
    if (moved <= cfg.eps) {
      double ff;
      Vector gg;
      try {
        ff = obj.value(theta);
        gg = obj.gradient(theta);
      } catch (const Error& e) {
        trace.reason = StopReason::error;
        trace.error_message = e.what();
        trace.iterations = t - 1;
        return trace;
      }
      trace.records.push_back(make_record(t, ff, gg.norm()));
      trace.reason = StopReason::eps_reached;
      trace.iterations = t - 1;
      return trace;
    }
  }
}

}  // namespace

Trace newsamp_run(const Objective& obj, const NewSampConfig& cfg,
                  const ConvexSet& set, const std::optional<Vector>& reference,
                  const IterationObserver& observer) {
  const Index p = obj.dim();
  std::vector<std::string> warnings;
  bool warned_step = false;
  auto direction = [&](std::size_t t, const Vector& theta, const Vector& grad,
                       const std::vector<std::size_t>& sample,
                       StepInfo& info) -> Vector {
    SymMatrix hess = obj.subsampled_hessian(theta, sample);
    SpectralDecomposition dec = full_eigen(hess);
    ScalingMatrix scaling = scaling_from_spectrum(dec, cfg.rank);
    info.lambda_threshold = dec.values[cfg.rank];
    info.lambda_min = std::max(dec.values[p - 1], 0.0);
    info.gamma = cfg.step.step_scale *
                 std::sqrt(std::log(static_cast<double>(p)) /
                           static_cast<double>(sample.size()));
    if (cfg.step.kind == StepMode::Kind::adaptive) {
      info.eta = adaptive_step(info.lambda_min, *info.lambda_threshold, p,
                               sample.size(), cfg.step.step_scale);
    } else {
      info.eta = cfg.step.eta;
      info.gamma = 0.0;
      double limit =
          2.0 / (1.0 + info.lambda_min / *info.lambda_threshold);
      if (info.eta > limit && !warned_step) {
        warnings.push_back(
            "fixed step " + std::to_string(info.eta) +
            " exceeds the contraction bound " + std::to_string(limit) +
            " at iteration " + std::to_string(t));
        warned_step = true;
      }
    }
    Vector dir = scaling.apply(grad);
    if (observer) {
      Vector theta_next = set.project(theta - info.eta * dir);
      IterationView view{t,    theta,   theta_next, grad,
                         sample, hess,  scaling,    info.eta,
                         info.gamma, info.lambda_min};
      observer(view);
    }
    return dir;
  };
  Trace result = run_loop(obj, cfg, set, reference, direction);
  result.warnings = std::move(warnings);
  return result;
}

Trace plain_subsampled_newton_run(const Objective& obj,
                                  const NewSampConfig& cfg,
                                  const ConvexSet& set,
                                  const std::optional<Vector>& reference) {
  const Index p = obj.dim();
  auto direction = [&](std::size_t, const Vector& theta, const Vector& grad,
                       const std::vector<std::size_t>& sample,
                       StepInfo& info) -> Vector {
    SymMatrix hess = obj.subsampled_hessian(theta, sample);
    SpectralDecomposition dec = full_eigen(hess);
    info.lambda_threshold = std::nullopt;
    info.lambda_min = dec.values[p - 1];
    if (dec.values[p - 1] <= eigen_zero_tol(dec.values[0]))
      throw NumericalFailure(
          "singular sub-sampled Hessian: smallest eigenvalue " +
          std::to_string(dec.values[p - 1]));
    if (cfg.step.kind == StepMode::Kind::adaptive) {
      info.eta = adaptive_step(std::max(dec.values[p - 1], 0.0),
                               dec.values[cfg.rank], p, sample.size(),
                               cfg.step.step_scale);
    } else {
      info.eta = cfg.step.eta;
    }
    Vector coeffs = dec.vectors.transpose() * grad;
    coeffs.array() /= dec.values.array();
    return dec.vectors * coeffs;
  };
  return run_loop(obj, cfg, set, reference, direction);
}

}  // namespace newsamp
