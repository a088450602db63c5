#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace newsamp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Kahan compensated accumulator. Sums accumulated through it agree across
// permutations of the inputs to within a few ulps, independent of the number
// of terms.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Per-coordinate compensated accumulation for vectors.
class KahanVector {
 public:
  explicit KahanVector(Index n) : s_(Vector::Zero(n)), c_(Vector::Zero(n)) {}
  // s += w * x
  template <typename Derived>
  void add_scaled(double w, const Eigen::MatrixBase<Derived>& x) {
    for (Index j = 0; j < s_.size(); ++j) {
      double y = w * x[j] - c_[j];
      double t = s_[j] + y;
      c_[j] = (t - s_[j]) - y;
      s_[j] = t;
    }
  }
  const Vector& value() const { return s_; }

 private:
  Vector s_;
  Vector c_;
};

// Compensated accumulation of symmetric rank-one updates, upper triangle only.
class KahanSymMatrix {
 public:
  explicit KahanSymMatrix(Index p)
      : s_(Matrix::Zero(p, p)), c_(Matrix::Zero(p, p)) {}
  // s += w * x x^T (upper triangle)
  template <typename Derived>
  void add_outer(double w, const Eigen::MatrixBase<Derived>& x) {
    const Index p = s_.rows();
    for (Index i = 0; i < p; ++i) {
      const double wi = w * x[i];
      for (Index j = i; j < p; ++j) {
        double y = wi * x[j] - c_(i, j);
        double t = s_(i, j) + y;
        c_(i, j) = (t - s_(i, j)) - y;
        s_(i, j) = t;
      }
    }
  }
  // Mirrors the upper triangle into a full symmetric matrix, optionally scaled.
  Matrix symmetric(double scale = 1.0) const {
    const Index p = s_.rows();
    Matrix out(p, p);
    for (Index i = 0; i < p; ++i) {
      for (Index j = i; j < p; ++j) {
        double v = scale * s_(i, j);
        out(i, j) = v;
        out(j, i) = v;
      }
    }
    return out;
  }

 private:
  Matrix s_;
  Matrix c_;
};

// splitmix64 mixing step; used to derive independent engine seeds from a
// (seed, counter) pair so that streams at distinct counters are decorrelated.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t counter) {
  return mix64(mix64(seed) ^ mix64(counter + 0x708f5c51d0d3e1fdULL));
}

// Thin deterministic RNG: mt19937_64 plus portable uniform/normal draws
// (distribution objects from <random> are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng keyed(std::uint64_t seed, std::uint64_t counter) {
    return Rng(stream_seed(seed, counter));
  }

  std::uint64_t bits() { return engine_(); }

  // Unbiased integer in [0, bound) via rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform in [0, 1) with 53 bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (one value per call, no caching).
  double normal() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace newsamp
