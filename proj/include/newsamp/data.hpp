#pragma once

#include <string>
#include <vector>

#include "newsamp/problems.hpp"

namespace newsamp {

// Synthetic Gaussian design whose covariance carries r spiked eigenvalues
// above a flat noise floor:
//   Sigma = floor * I + sum_j (spike_j - floor) v_j v_j^T
// for a seeded random orthonormal set {v_j}. Rows are drawn exactly as
// Sigma^{1/2} z with z standard normal. Labels come from a planted unit-norm
// coefficient vector.
struct SpikedModelSpec {
  std::size_t n = 0;
  Index p = 0;
  Index r_spikes = 0;
  std::vector<double> spike_values;  // strictly decreasing, all > noise_floor
  double noise_floor = 1.0;
  enum class LabelModel { logistic_planted, linear_gaussian, sign_planted };
  LabelModel label_model = LabelModel::logistic_planted;
  std::uint64_t seed = 0;

  void validate() const;
};

SpikedModelSpec::LabelModel label_model_from_name(const std::string& name);
std::string label_model_name(SpikedModelSpec::LabelModel model);

Dataset generate_spiked(const SpikedModelSpec& spec);

// Label handling for loaded classification data. `automatic` maps responses
// taking exactly two distinct values to {-1, +1} (smaller value to -1) and
// leaves anything else untouched; zero_one maps two-valued responses to
// {0, 1} instead.
enum class LabelMap { automatic, none, plus_minus_one, zero_one };

// RFC-4180-style numeric CSV without quoting; label_column is 0-based.
Dataset load_csv(const std::string& path, Index label_column,
                 LabelMap map = LabelMap::automatic);
// Sparse text lines "label idx:val idx:val ..." with 1-based indices,
// densified to n x p. dim = 0 infers p from the largest index.
Dataset load_libsvm(const std::string& path, Index dim = 0,
                    LabelMap map = LabelMap::automatic);

// Writers mirror the loaders; doubles are printed with 17 significant digits
// so a write-read round trip reproduces values exactly. CSV places the label
// in the last column.
void save_csv(const Dataset& ds, const std::string& path);
void save_libsvm(const Dataset& ds, const std::string& path);

// Columnwise zero-mean unit-variance scaling (population 1/n convention).
// Constant columns pass through unchanged. The response is not touched.
Dataset standardize(const Dataset& ds);

}  // namespace newsamp
