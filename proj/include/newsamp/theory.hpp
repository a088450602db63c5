#pragma once

#include <optional>
#include <span>

#include "newsamp/errors.hpp"
#include "newsamp/trace.hpp"

namespace newsamp {

enum class SchemeClass { independent, sequential };  // S1 / S2

// Coefficients of the composite error recursion
//   dist_{t+1} <= linear_coeff * dist_t + quad_coeff * dist_t^2
// together with the quantities they were computed from. `covered` is false
// when the inputs were surrogates (SVM objectives have no Lipschitz
// constant); `log_clamped` marks the sequential-scheme logarithm having been
// clamped at 1.
struct CoefficientReport {
  double linear_coeff = 0.0;
  double quad_coeff = 0.0;
  double lambda_min = 0.0;        // smallest eigenvalue input
  double lambda_threshold = 0.0;  // threshold eigenvalue input
  double eta = 0.0;
  double hessian_bound = 0.0;     // K
  double lipschitz = 0.0;         // M
  double c_abs = 0.0;
  double drift = 0.0;             // concentration slack, when computed
  SchemeClass scheme = SchemeClass::independent;
  bool covered = true;
  bool log_clamped = false;
};

// Independent sub-sampling (S1):
//   linear = 1 - eta lam_p/lam_r1 + eta c K / lam_r1 * sqrt(log(p)/|S|)
//   quad   = eta M / (2 lam_r1)
// The default absolute constant 6 comes from the concentration argument the
// bound rests on. Negative formula values clamp at zero.
CoefficientReport coefficients_s1(double lambda_min, double lambda_threshold,
                                  double eta, double hessian_bound,
                                  double lipschitz, Index dim,
                                  std::size_t sample_size, double c_abs = 6.0);

// Sequentially dependent sub-sampling (S2): the sampling term becomes
//   eta c K / lam_r1 * sqrt(p/|S| * log(diam^2 (M_n + M_S)^2 |S| / K^2)),
// default constant 8. Requires a bounded set; a log argument <= 1 is out of
// regime, and log values below 1 are clamped (and flagged).
CoefficientReport coefficients_s2(double lambda_min, double lambda_threshold,
                                  double eta, double hessian_bound,
                                  double lipschitz_full,
                                  double lipschitz_sample, Index dim,
                                  std::size_t sample_size, double diameter,
                                  double c_abs = 8.0);

// Bound on |linear_coeff_t - linear_coeff_*| for quadratic objectives under
// S1 with unit steps:
//   c1 K sqrt(log(p)/|S|) / (k (k - c2 K sqrt(log(p)/|S|)))
// where k lower-bounds the full-Hessian spectrum.
double coefficient_drift_bound(double k_lower, double hessian_bound, Index dim,
                               std::size_t sample_size, double c1 = 1.0,
                               double c2 = 1.0);

// Largest initial distance with a convergence guarantee,
//   (1 - linear_coeff - drift) / (quad_coeff + drift);
// +infinity when the denominator vanishes (pure linear convergence), and a
// NoGuarantee error when linear_coeff + drift >= 1.
double sufficient_start_radius(double linear_coeff, double quad_coeff,
                               double drift);

struct CompositeBound {
  double linear_coeff = 0.0;
  double quad_coeff = 0.0;
  double initial_distance = 0.0;
};

struct IterationBound {
  double count;        // T(delta*)
  double split_point;  // delta*
};

// Upper bound on the iterations a composite recursion needs to reach eps:
// splits the run into a quadratic phase down to delta and a linear phase from
// delta to eps, minimizing over delta by golden-section search.
IterationBound iteration_bound(const CompositeBound& bound, double eps);

// Least-squares slope of log(dist) over the last ten positive entries;
// estimates the log of the linear rate.
double local_rate(std::span<const double> distances);
double local_rate(const Trace& trace);

struct PhaseWindow {
  std::size_t begin = 0;  // first distance index covered by the window
  std::size_t end = 0;    // one past the last distance index
  double slope = 0.0;     // log-log regression slope over the window
};

// Sliding-window fit of log(dist_{t+1}) against log(dist_t) (windows of four
// consecutive pairs). The earliest window with slope >= 1.6 is reported as
// the quadratic phase and the last with slope <= 1.2 as the linear phase;
// either may be absent.
struct PhaseSplit {
  std::optional<PhaseWindow> quadratic;
  std::optional<PhaseWindow> linear;
};

PhaseSplit phase_split(std::span<const double> distances);
PhaseSplit phase_split(const Trace& trace);

}  // namespace newsamp
