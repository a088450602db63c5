#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "newsamp/baselines.hpp"
#include "newsamp/data.hpp"
#include "newsamp/theory.hpp"

namespace newsamp::cli {

// Declarative run configuration: "key = value" lines, '#' comments. Command
// line overrides replace file values key by key.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;  // throws if missing
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::size_t get_size(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Problem construction shared by the subcommands: either problem.data points
// at a CSV/LIBSVM file or the spiked.* keys generate data inline.
struct LoadedProblem {
  Dataset dataset;
  Objective objective;
};

LoadedProblem load_problem(const KeyValueConfig& cfg);
SpikedModelSpec parse_spiked_spec(const KeyValueConfig& cfg);
ConvexSet parse_convex_set(const KeyValueConfig& cfg, Index dim);

// Reference minimizer for benchmark/coeffs runs: full damped Newton at the
// given gradient tolerance, cached under reference.cache_dir keyed by a hash
// of the dataset and objective.
Vector reference_solution(const KeyValueConfig& cfg, const Objective& obj,
                          std::ostream& log);

// Subcommands. Each returns a process exit code; human-readable progress goes
// to `out`, errors are thrown and rendered as JSON by the frontend.
int cmd_generate(const KeyValueConfig& cfg, std::ostream& out);
int cmd_optimize(const KeyValueConfig& cfg, std::ostream& out);
int cmd_benchmark(const KeyValueConfig& cfg, std::ostream& out);
int cmd_coeffs(const KeyValueConfig& cfg, std::ostream& out);

// Maps an exception to the short machine-readable type used on stderr.
std::string error_type(const std::exception& e);

}  // namespace newsamp::cli
