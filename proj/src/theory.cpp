#include "newsamp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "newsamp/errors.hpp"

namespace newsamp {

namespace {

double sampling_term_s1(double hessian_bound, Index dim,
                        std::size_t sample_size, double c_abs) {
  return c_abs * hessian_bound *
         std::sqrt(std::log(static_cast<double>(dim)) /
                   static_cast<double>(sample_size));
}

void check_common(double lambda_min, double lambda_threshold, double eta,
                  Index dim, std::size_t sample_size) {
  if (lambda_threshold <= 0.0)
    throw DegenerateSpectrum("threshold eigenvalue must be positive");
  if (lambda_min < 0.0)
    throw InvalidInput("smallest eigenvalue must be non-negative");
  if (eta <= 0.0) throw InvalidInput("step size must be positive");
  if (dim < 1 || sample_size < 1)
    throw InvalidInput("dimension and sample size must be positive");
}

// Least-squares slope of y against x.
double regression_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw InsufficientData("degenerate abscissa in regression");
  return sxy / sxx;
}

constexpr double kDistanceFloor = 1e-290;

// Longest positive prefix of the distance sequence; entries at or below the
// floor end the usable range.
std::vector<double> usable_distances(std::span<const double> distances) {
  std::vector<double> out;
  for (double d : distances) {
    if (!(d > kDistanceFloor)) break;
    out.push_back(d);
  }
  return out;
}

}  // namespace

CoefficientReport coefficients_s1(double lambda_min, double lambda_threshold,
                                  double eta, double hessian_bound,
                                  double lipschitz, Index dim,
                                  std::size_t sample_size, double c_abs) {
  check_common(lambda_min, lambda_threshold, eta, dim, sample_size);
  CoefficientReport rep;
  rep.scheme = SchemeClass::independent;
  rep.lambda_min = lambda_min;
  rep.lambda_threshold = lambda_threshold;
  rep.eta = eta;
  rep.hessian_bound = hessian_bound;
  rep.lipschitz = lipschitz;
  rep.c_abs = c_abs;
  double linear =
      1.0 - eta * lambda_min / lambda_threshold +
      eta * sampling_term_s1(hessian_bound, dim, sample_size, c_abs) /
          lambda_threshold;
  rep.linear_coeff = std::max(0.0, linear);
  rep.quad_coeff = eta * lipschitz / (2.0 * lambda_threshold);
  rep.covered = std::isfinite(rep.linear_coeff) && std::isfinite(rep.quad_coeff);
  return rep;
}

CoefficientReport coefficients_s2(double lambda_min, double lambda_threshold,
                                  double eta, double hessian_bound,
                                  double lipschitz_full,
                                  double lipschitz_sample, Index dim,
                                  std::size_t sample_size, double diameter,
                                  double c_abs) {
  check_common(lambda_min, lambda_threshold, eta, dim, sample_size);
  if (!std::isfinite(diameter) || diameter <= 0.0)
    throw RequiresBoundedSet(
        "sequential-scheme coefficients need a bounded parameter set");
  if (hessian_bound <= 0.0)
    throw InvalidInput("Hessian bound must be positive");
  double arg = diameter * diameter *
               (lipschitz_full + lipschitz_sample) *
               (lipschitz_full + lipschitz_sample) *
               static_cast<double>(sample_size) /
               (hessian_bound * hessian_bound);
  if (!(arg > 1.0))
    throw OutOfRegime("logarithm argument " + std::to_string(arg) +
                      " must exceed 1");
  CoefficientReport rep;
  rep.scheme = SchemeClass::sequential;
  rep.lambda_min = lambda_min;
  rep.lambda_threshold = lambda_threshold;
  rep.eta = eta;
  rep.hessian_bound = hessian_bound;
  rep.lipschitz = lipschitz_full;
  rep.c_abs = c_abs;
  double logv = std::log(arg);
  if (logv < 1.0) {
    logv = 1.0;
    rep.log_clamped = true;
  }
  double term = c_abs * hessian_bound *
                std::sqrt(static_cast<double>(dim) /
                          static_cast<double>(sample_size) * logv);
  double linear = 1.0 - eta * lambda_min / lambda_threshold +
                  eta * term / lambda_threshold;
  rep.linear_coeff = std::max(0.0, linear);
  rep.quad_coeff = eta * lipschitz_full / (2.0 * lambda_threshold);
  rep.covered = std::isfinite(rep.linear_coeff) && std::isfinite(rep.quad_coeff);
  return rep;
}

double coefficient_drift_bound(double k_lower, double hessian_bound, Index dim,
                               std::size_t sample_size, double c1, double c2) {
  if (k_lower <= 0.0)
    throw InvalidInput("spectrum lower bound must be positive");
  if (dim < 1 || sample_size < 1)
    throw InvalidInput("dimension and sample size must be positive");
  double noise = hessian_bound * std::sqrt(std::log(static_cast<double>(dim)) /
                                           static_cast<double>(sample_size));
  double margin = k_lower - c2 * noise;
  if (margin <= 0.0)
    throw SampleTooSmall(
        "sample too small: concentration margin " + std::to_string(margin) +
        " is not positive");
  return c1 * noise / (k_lower * margin);
}

double sufficient_start_radius(double linear_coeff, double quad_coeff,
                               double drift) {
  if (linear_coeff < 0.0 || quad_coeff < 0.0 || drift < 0.0)
    throw InvalidInput("coefficients and drift must be non-negative");
  if (linear_coeff + drift >= 1.0)
    throw NoGuarantee("linear coefficient plus drift reaches 1; no start "
                      "radius can be certified");
  double denom = quad_coeff + drift;
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return (1.0 - linear_coeff - drift) / denom;
}

namespace {

double iteration_count_at(const CompositeBound& b, double eps, double delta) {
  double q = b.linear_coeff + delta * b.quad_coeff;
  double quad_phase =
      std::log2(std::log(q) / std::log(b.initial_distance / delta * q));
  double lin_phase = std::log(eps / delta) / std::log(q);
  return quad_phase + lin_phase;
}

}  // namespace

IterationBound iteration_bound(const CompositeBound& b, double eps) {
  if (!(b.linear_coeff > 0.0) || b.linear_coeff >= 1.0)
    throw NoBound("linear coefficient must lie in (0, 1)");
  if (b.quad_coeff < 0.0) throw NoBound("quadratic coefficient must be >= 0");
  if (!(b.initial_distance > 0.0))
    throw NoBound("initial distance must be positive");
  if (b.quad_coeff > 0.0 &&
      b.initial_distance >= (1.0 - b.linear_coeff) / b.quad_coeff)
    throw NoBound("initial distance outside the convergence region");
  if (!(eps > 0.0) || eps >= b.initial_distance)
    throw NoBound("tolerance must lie in (0, initial distance)");
  double lo = std::max(eps, b.linear_coeff * b.initial_distance /
                                (1.0 - b.quad_coeff * b.initial_distance));
  double hi = b.initial_distance;
  if (!(lo < hi)) throw NoBound("empty feasible interval for the split point");

  // Golden-section search on the open interval, endpoints nudged inward.
  const double nudge = 1e-12 * (hi - lo);
  double a = lo + nudge;
  double c = hi - nudge;
  const double inv_phi = 0.6180339887498949;
  double x1 = c - inv_phi * (c - a);
  double x2 = a + inv_phi * (c - a);
  double f1 = iteration_count_at(b, eps, x1);
  double f2 = iteration_count_at(b, eps, x2);
  const double tol = 1e-9 * (hi - lo);
  while (c - a > tol) {
    if (f1 <= f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - inv_phi * (c - a);
      f1 = iteration_count_at(b, eps, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (c - a);
      f2 = iteration_count_at(b, eps, x2);
    }
  }
  double delta_star = 0.5 * (a + c);
  double count = iteration_count_at(b, eps, delta_star);
  return IterationBound{std::max(0.0, count), delta_star};
}

double local_rate(std::span<const double> distances) {
  std::vector<double> usable = usable_distances(distances);
  if (usable.size() < 10)
    throw InsufficientData("need at least 10 positive tail distances, have " +
                           std::to_string(usable.size()));
  const std::size_t tail = 10;
  std::vector<double> x(tail), y(tail);
  const std::size_t offset = usable.size() - tail;
  for (std::size_t i = 0; i < tail; ++i) {
    x[i] = static_cast<double>(offset + i);
    y[i] = std::log(usable[offset + i]);
  }
  return regression_slope(x, y);
}

double local_rate(const Trace& trace) { return local_rate(trace.distances()); }

PhaseSplit phase_split(std::span<const double> distances) {
  std::vector<double> usable = usable_distances(distances);
  if (usable.size() < 8)
    throw InsufficientData("need at least 8 positive distances, have " +
                           std::to_string(usable.size()));
  const std::size_t pairs = usable.size() - 1;
  const std::size_t width = 4;
  PhaseSplit split;
  for (std::size_t w = 0; w + width <= pairs; ++w) {
    std::vector<double> x(width), y(width);
    for (std::size_t i = 0; i < width; ++i) {
      x[i] = std::log(usable[w + i]);
      y[i] = std::log(usable[w + i + 1]);
    }
    double slope = regression_slope(x, y);
    PhaseWindow window{w, w + width + 1, slope};
    if (!split.quadratic && slope >= 1.6) split.quadratic = window;
    if (slope <= 1.2) split.linear = window;
  }
  return split;
}

PhaseSplit phase_split(const Trace& trace) {
  return phase_split(trace.distances());
}

}  // namespace newsamp
