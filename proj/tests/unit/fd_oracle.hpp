#pragma once

// Central finite-difference oracles for gradient and Hessian checks.

#include <functional>

#include "newsamp/problems.hpp"

namespace oracle {

using newsamp::Index;
using newsamp::Matrix;
using newsamp::Objective;
using newsamp::Vector;

inline Vector fd_gradient(const Objective& obj, const Vector& theta,
                          double h = 1e-6) {
  Vector g(theta.size());
  for (Index j = 0; j < theta.size(); ++j) {
    Vector hi = theta, lo = theta;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (obj.value(hi) - obj.value(lo)) / (2.0 * h);
  }
  return g;
}

inline Matrix fd_hessian(const Objective& obj, const Vector& theta,
                         double h = 1e-6) {
  const Index p = theta.size();
  Matrix out(p, p);
  for (Index j = 0; j < p; ++j) {
    Vector hi = theta, lo = theta;
    hi[j] += h;
    lo[j] -= h;
    out.col(j) = (obj.gradient(hi) - obj.gradient(lo)) / (2.0 * h);
  }
  return 0.5 * (out + out.transpose());
}

inline double rel_err(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace oracle
