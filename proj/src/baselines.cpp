#include "newsamp/baselines.hpp"

#include <chrono>
#include <cmath>
#include <deque>

#include <Eigen/Cholesky>

namespace newsamp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct RunState {
  Trace trace;
  Clock::time_point start = Clock::now();
  double f0 = 0.0;
};

void push_record(RunState& state, const BaselineConfig& cfg, std::size_t t,
                 const Vector& theta, double f, double gnorm,
                 std::optional<double> step,
                 const std::optional<Vector>& reference) {
  TraceRecord rec;
  rec.t = t;
  rec.objective = f;
  rec.grad_norm = gnorm;
  rec.step = step;
  if (reference) rec.dist = (theta - *reference).norm();
  rec.elapsed_s = seconds_since(state.start);
  if (cfg.record_iterates) rec.theta = theta;
  state.trace.records.push_back(std::move(rec));
}

bool diverged(const RunState& state, const BaselineConfig& cfg, double f) {
  return f > cfg.divergence_factor * std::abs(state.f0) + 1.0;
}

// Step length along direction d from theta: the configured constant, or the
// exact minimizer of the local quadratic model along d.
double step_length(const Objective& obj, const BaselineConfig& cfg,
                   const Vector& theta, const Vector& grad, const Vector& d) {
  if (!cfg.exact_line_step) return cfg.step;
  double curvature = d.dot(obj.hessian_vec(theta, d));
  if (curvature <= 0.0) return cfg.step;
  return -grad.dot(d) / curvature;
}

Trace run_batch(const Objective& obj, const BaselineConfig& cfg,
                const ConvexSet& set, const std::optional<Vector>& reference) {
  const Index p = obj.dim();
  RunState state;
  Vector theta = set.project(cfg.theta0);
  Vector theta_prev = theta;                    // AGD momentum
  Matrix inv_hess;                              // BFGS
  std::deque<std::pair<Vector, Vector>> pairs;  // L-BFGS (s, y)
  if (cfg.method == BaselineMethod::bfgs) inv_hess = Matrix::Identity(p, p);

  state.f0 = obj.value(theta);
  std::size_t t = 0;
  while (true) {
    double f;
    Vector grad;
    try {
      f = obj.value(theta);
      grad = obj.gradient(theta);
    } catch (const Error& e) {
      state.trace.reason = StopReason::error;
      state.trace.error_message = e.what();
      state.trace.iterations = t;
      return state.trace;
    }
    if (diverged(state, cfg, f)) {
      push_record(state, cfg, t, theta, f, grad.norm(), std::nullopt,
                  reference);
      state.trace.reason = StopReason::error;
      state.trace.error_message =
          "divergence: objective exceeded 10 |f(theta0)| + 1";
      state.trace.iterations = t;
      return state.trace;
    }
    if (t >= cfg.max_iters) {
      push_record(state, cfg, t, theta, f, grad.norm(), std::nullopt,
                  reference);
      state.trace.reason = StopReason::max_iters;
      state.trace.iterations = t;
      return state.trace;
    }

    Vector direction;  // theta_next = P(probe + alpha * direction)
    double alpha = cfg.step;
    Vector probe = theta;
    switch (cfg.method) {
      case BaselineMethod::gd: {
        direction = -grad;
        alpha = step_length(obj, cfg, theta, grad, direction);
        break;
      }
      case BaselineMethod::agd: {
        double beta = t == 0 ? 0.0
                             : (static_cast<double>(t) - 1.0) /
                                   (static_cast<double>(t) + 2.0);
        probe = theta + beta * (theta - theta_prev);
        Vector grad_probe;
        try {
          grad_probe = obj.gradient(probe);
        } catch (const Error& e) {
          state.trace.reason = StopReason::error;
          state.trace.error_message = e.what();
          state.trace.iterations = t;
          return state.trace;
        }
        direction = -grad_probe;
        break;
      }
      case BaselineMethod::newton: {
        auto dec = full_eigen(obj.full_hessian(theta));
        if (dec.values[p - 1] <= eigen_zero_tol(dec.values[0])) {
          push_record(state, cfg, t, theta, f, grad.norm(), std::nullopt,
                      reference);
          state.trace.reason = StopReason::error;
          state.trace.error_message = "singular Hessian in Newton step";
          state.trace.iterations = t;
          return state.trace;
        }
        Vector coeffs = dec.vectors.transpose() * grad;
        coeffs.array() /= dec.values.array();
        direction = -(dec.vectors * coeffs);
        break;
      }
      case BaselineMethod::bfgs: {
        direction = -(inv_hess * grad);
        if (grad.dot(direction) >= 0.0) {
          inv_hess = Matrix::Identity(p, p);  // reset on non-descent
          direction = -grad;
        }
        alpha = step_length(obj, cfg, theta, grad, direction);
        break;
      }
      case BaselineMethod::lbfgs: {
        // Two-loop recursion over the stored (s, y) pairs.
        direction = -grad;
        std::vector<double> alphas(pairs.size());
        for (std::size_t k = pairs.size(); k-- > 0;) {
          const auto& [s, y] = pairs[k];
          double rho = 1.0 / y.dot(s);
          alphas[k] = rho * s.dot(direction);
          direction -= alphas[k] * y;
        }
        if (!pairs.empty()) {
          const auto& [s, y] = pairs.back();
          direction *= s.dot(y) / y.dot(y);
        }
        for (std::size_t k = 0; k < pairs.size(); ++k) {
          const auto& [s, y] = pairs[k];
          double rho = 1.0 / y.dot(s);
          double beta = rho * y.dot(direction);
          direction += (alphas[k] - beta) * s;
        }
        if (grad.dot(direction) >= 0.0) direction = -grad;
        alpha = step_length(obj, cfg, theta, grad, direction);
        break;
      }
      default:
        throw InvalidInput("stochastic method dispatched to the batch loop");
    }

    Vector theta_next = set.project(probe + alpha * direction);
    push_record(state, cfg, t, theta, f, grad.norm(), alpha, reference);
    if (!theta_next.allFinite()) {
      state.trace.reason = StopReason::error;
      state.trace.error_message = "numerical failure: non-finite iterate";
      state.trace.iterations = t;
      return state.trace;
    }

    // Curvature pairs with negligible s^T y are skipped to keep the inverse
    // approximation positive definite.
    if (cfg.method == BaselineMethod::bfgs ||
        cfg.method == BaselineMethod::lbfgs) {
      Vector grad_next;
      try {
        grad_next = obj.gradient(theta_next);
      } catch (const Error& e) {
        state.trace.reason = StopReason::error;
        state.trace.error_message = e.what();
        state.trace.iterations = t;
        return state.trace;
      }
      Vector s = theta_next - theta;
      Vector y = grad_next - grad;
      double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        if (cfg.method == BaselineMethod::bfgs) {
          double rho = 1.0 / sy;
          Matrix left = Matrix::Identity(p, p) - rho * s * y.transpose();
          inv_hess =
              left * inv_hess * left.transpose() + rho * s * s.transpose();
        } else {
          pairs.emplace_back(s, y);
          if (pairs.size() > cfg.memory) pairs.pop_front();
        }
      }
    }

    double moved = (theta_next - theta).norm();
    theta_prev = theta;
    theta = std::move(theta_next);
    ++t;
    if (moved <= cfg.eps) {
      double ff;
      Vector gg;
      try {
        ff = obj.value(theta);
        gg = obj.gradient(theta);
      } catch (const Error& e) {
        state.trace.reason = StopReason::error;
        state.trace.error_message = e.what();
        state.trace.iterations = t - 1;
        return state.trace;
      }
      push_record(state, cfg, t, theta, ff, gg.norm(), std::nullopt,
                  reference);
      state.trace.reason = StopReason::eps_reached;
      state.trace.iterations = t - 1;
      return state.trace;
    }
  }
}

Trace run_stochastic(const Objective& obj, const BaselineConfig& cfg,
                     const ConvexSet& set,
                     const std::optional<Vector>& reference) {
  const std::size_t n = static_cast<std::size_t>(obj.data().n());
  RunState state;
  Vector theta = set.project(cfg.theta0);
  Vector accum = Vector::Zero(obj.dim());  // AdaGrad squared-gradient sums
  Rng rng = Rng::keyed(cfg.seed, 0x5d0c);
  state.f0 = obj.value(theta);

  // The full objective and gradient are only evaluated at recorded steps.
  auto record_now = [&](std::size_t t, std::optional<double> step) -> bool {
    double f = obj.value(theta);
    Vector grad = obj.gradient(theta);
    push_record(state, cfg, t, theta, f, grad.norm(), step, reference);
    if (diverged(state, cfg, f)) {
      state.trace.reason = StopReason::error;
      state.trace.error_message =
          "divergence: objective exceeded 10 |f(theta0)| + 1";
      state.trace.iterations = t;
      return false;
    }
    return true;
  };

  std::size_t t = 0;
  const std::size_t every = std::max<std::size_t>(1, cfg.record_every);
  while (true) {
    if (t >= cfg.max_iters) {
      record_now(t, std::nullopt);
      state.trace.reason = StopReason::max_iters;
      state.trace.iterations = t;
      return state.trace;
    }
    double gamma;
    if (cfg.method == BaselineMethod::sgd) {
      gamma = cfg.sgd_step / (1.0 + static_cast<double>(t) / cfg.sgd_decay);
    } else {
      gamma = cfg.ada_step;
    }
    if (t % every == 0) {
      if (!record_now(t, gamma)) return state.trace;
    }
    std::size_t pick = rng.below(n);
    Vector g;
    try {
      g = obj.gradient_sample(theta, pick);
    } catch (const Error& e) {
      state.trace.reason = StopReason::error;
      state.trace.error_message = e.what();
      state.trace.iterations = t;
      return state.trace;
    }
    Vector theta_next;
    if (cfg.method == BaselineMethod::sgd) {
      theta_next = set.project(theta - gamma * g);
    } else {
      accum.array() += g.array().square();
      Vector scaled = g.array() / (cfg.ada_floor + accum.array()).sqrt();
      theta_next = set.project(theta - cfg.ada_step * scaled);
    }
    if (!theta_next.allFinite()) {
      state.trace.reason = StopReason::error;
      state.trace.error_message = "numerical failure: non-finite iterate";
      state.trace.iterations = t;
      return state.trace;
    }
    double moved = (theta_next - theta).norm();
    theta = std::move(theta_next);
    ++t;
    if (moved <= cfg.eps) {
      record_now(t, std::nullopt);
      state.trace.reason = StopReason::eps_reached;
      state.trace.iterations = t - 1;
      return state.trace;
    }
  }
}

}  // namespace

std::string baseline_name(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::gd: return "gd";
    case BaselineMethod::agd: return "agd";
    case BaselineMethod::newton: return "newton";
    case BaselineMethod::bfgs: return "bfgs";
    case BaselineMethod::lbfgs: return "lbfgs";
    case BaselineMethod::sgd: return "sgd";
    case BaselineMethod::adagrad: return "adagrad";
  }
  return "unknown";
}

BaselineMethod baseline_from_name(const std::string& name) {
  if (name == "gd") return BaselineMethod::gd;
  if (name == "agd") return BaselineMethod::agd;
  if (name == "newton") return BaselineMethod::newton;
  if (name == "bfgs") return BaselineMethod::bfgs;
  if (name == "lbfgs") return BaselineMethod::lbfgs;
  if (name == "sgd") return BaselineMethod::sgd;
  if (name == "adagrad") return BaselineMethod::adagrad;
  throw InvalidInput("unknown baseline method '" + name + "'");
}

Trace run_baseline(const Objective& obj, const BaselineConfig& cfg,
                   const ConvexSet& set,
                   const std::optional<Vector>& reference) {
  if (cfg.theta0.size() != obj.dim())
    throw InvalidInput("initial iterate does not match problem dimension");
  if (cfg.eps <= 0.0)
    throw InvalidInput("stopping tolerance must be positive");
  if (cfg.step <= 0.0) throw InvalidInput("step size must be positive");
  if (cfg.method == BaselineMethod::sgd ||
      cfg.method == BaselineMethod::adagrad)
    return run_stochastic(obj, cfg, set, reference);
  return run_batch(obj, cfg, set, reference);
}

Vector newton_reference(const Objective& obj, const Vector& theta0,
                        double grad_tol, std::size_t max_iters) {
  Vector theta = theta0;
  double f = obj.value(theta);
  for (std::size_t it = 0; it < max_iters; ++it) {
    Vector grad = obj.gradient(theta);
    if (grad.norm() <= grad_tol) return theta;
    Matrix hess = obj.full_hessian(theta).mat();
    Eigen::LDLT<Matrix> ldlt(hess);
    Vector d = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !d.allFinite())
      throw NumericalFailure("reference Newton solve failed");
    double alpha = 1.0;
    Vector cand = theta - alpha * d;
    double fc = obj.value(cand);
    while (fc > f && alpha > 1e-12) {
      alpha *= 0.5;
      cand = theta - alpha * d;
      fc = obj.value(cand);
    }
    if (alpha <= 1e-12)
      throw NumericalFailure("reference Newton stalled in damping");
    theta = cand;
    f = fc;
  }
  if (obj.gradient(theta).norm() <= grad_tol) return theta;
  throw NumericalFailure("reference Newton did not reach the tolerance");
}

}  // namespace newsamp
