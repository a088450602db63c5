#pragma once

#include <optional>
#include <string>
#include <vector>

#include "newsamp/numeric.hpp"

namespace newsamp {

// One optimization run record. Fields that do not apply to a method or to the
// final resting iterate are left empty.
struct TraceRecord {
  std::size_t t = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  std::optional<double> step;              // eta used by the update at t
  std::optional<double> lambda_threshold;  // lambda_{r+1} of H_{S_t}
  std::optional<double> lambda_min;        // lambda_p of H_{S_t}
  std::optional<double> dist;              // ||theta^t - theta*|| if known
  double elapsed_s = 0.0;
  Vector theta;  // empty unless iterate recording is on
};

enum class StopReason { eps_reached, max_iters, error };

std::string stop_reason_name(StopReason reason);

struct Trace {
  std::vector<TraceRecord> records;
  StopReason reason = StopReason::max_iters;
  std::string error_message;
  std::vector<std::string> warnings;
  // Index of the update whose movement first fell within the stopping
  // tolerance (so an optimizer that jumps straight to the optimum and then
  // confirms it counts 1 iteration). Equals the number of updates performed
  // when stopping on max_iters or on an error.
  std::size_t iterations = 0;

  // Distances to the reference, in record order, for records that carry one.
  std::vector<double> distances() const;
  const TraceRecord& last() const { return records.back(); }
};

}  // namespace newsamp
