#include "newsamp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace newsamp {

namespace {

constexpr double kExpGuard = 700.0;  // exp() overflows near 709

double stable_log1pexp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    throw InvalidInput("dataset needs n >= 1 and p >= 1");
  if (y.size() != X.rows())
    throw InvalidInput("response length does not match the design matrix");
  if (!X.allFinite() || !y.allFinite())
    throw InvalidInput("dataset contains non-finite entries");
}

bool is_glm(ObjectiveKind kind) {
  return kind == ObjectiveKind::ols || kind == ObjectiveKind::logistic ||
         kind == ObjectiveKind::poisson;
}

bool is_svm(ObjectiveKind kind) {
  return kind == ObjectiveKind::svm_hinge2 ||
         kind == ObjectiveKind::svm_smoothed_huber;
}

std::string kind_name(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::ols: return "ols";
    case ObjectiveKind::logistic: return "logistic";
    case ObjectiveKind::poisson: return "poisson";
    case ObjectiveKind::svm_hinge2: return "svm-hinge2";
    case ObjectiveKind::svm_smoothed_huber: return "svm-huber";
  }
  return "unknown";
}

ObjectiveKind kind_from_name(const std::string& name) {
  if (name == "ols") return ObjectiveKind::ols;
  if (name == "logistic") return ObjectiveKind::logistic;
  if (name == "poisson") return ObjectiveKind::poisson;
  if (name == "svm-hinge2") return ObjectiveKind::svm_hinge2;
  if (name == "svm-huber") return ObjectiveKind::svm_smoothed_huber;
  throw InvalidInput("unknown objective kind '" + name + "'");
}

GlmLink glm_link(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::ols:
      return {[](double z) { return z * z; },
              [](double z) { return 2.0 * z; },
              [](double) { return 2.0; }};
    case ObjectiveKind::logistic:
      return {[](double z) { return stable_log1pexp(z); },
              [](double z) { return sigmoid(z); },
              [](double z) {
                double s = sigmoid(z);
                return s * (1.0 - s);
              }};
    case ObjectiveKind::poisson:
      return {[](double z) { return std::exp(z); },
              [](double z) { return std::exp(z); },
              [](double z) { return std::exp(z); }};
    default:
      throw InvalidInput("no cumulant generating function for " +
                         kind_name(kind));
  }
}

double hinge2(double m) {
  double g = std::max(0.0, 1.0 - m);
  return g * g;
}
double hinge2_d1(double m) { return m < 1.0 ? -2.0 * (1.0 - m) : 0.0; }
double hinge2_d2(double m) { return m < 1.0 ? 2.0 : 0.0; }

double smoothed_huber(double m) {
  if (m > 1.5) return 0.0;
  if (m >= 0.5) {
    double g = 1.5 - m;
    return 0.5 * g * g;
  }
  return 1.0 - m;
}
double smoothed_huber_d1(double m) {
  if (m > 1.5) return 0.0;
  if (m >= 0.5) return -(1.5 - m);
  return -1.0;
}
double smoothed_huber_d2(double m) {
  return (m >= 0.5 && m <= 1.5) ? 1.0 : 0.0;
}

Objective::Objective(Dataset data, ObjectiveKind kind, double svm_penalty)
    : data_(std::move(data)), kind_(kind), svm_penalty_(svm_penalty) {
  data_.validate();
  if (is_svm(kind_)) {
    if (svm_penalty_ <= 0.0)
      throw InvalidInput("SVM penalty C must be positive");
    for (Index i = 0; i < data_.n(); ++i) {
      if (data_.y[i] != 1.0 && data_.y[i] != -1.0)
        throw InvalidInput("SVM labels must be in {-1, +1}");
    }
  }
}

Vector Objective::inner(const Vector& theta) const { return data_.X * theta; }

void Objective::check_theta(const Vector& theta) const {
  if (theta.size() != data_.p())
    throw InvalidInput("parameter length " + std::to_string(theta.size()) +
                       " does not match dimension " +
                       std::to_string(data_.p()));
  if (!theta.allFinite())
    throw InvalidInput("parameter vector has non-finite entries");
}

double Objective::value(const Vector& theta) const {
  check_theta(theta);
  const Index n = data_.n();
  Vector z = inner(theta);
  KahanSum acc;
  if (is_glm(kind_)) {
    GlmLink link = glm_link(kind_);
    for (Index i = 0; i < n; ++i) {
      if (kind_ == ObjectiveKind::poisson && z[i] > kExpGuard)
        throw EvalOverflow("poisson inner product " + std::to_string(z[i]) +
                               " overflows the exponential link at sample " +
                               std::to_string(i),
                           static_cast<std::size_t>(i));
      acc.add(link.phi(z[i]) - data_.y[i] * z[i]);
    }
    return acc.value() / static_cast<double>(n);
  }
  const bool huber = kind_ == ObjectiveKind::svm_smoothed_huber;
  for (Index i = 0; i < n; ++i) {
    double m = data_.y[i] * z[i];
    acc.add(huber ? smoothed_huber(m) : hinge2(m));
  }
  return 0.5 * theta.squaredNorm() + 0.5 * svm_penalty_ * acc.value();
}

Vector Objective::gradient(const Vector& theta) const {
  check_theta(theta);
  const Index n = data_.n();
  Vector z = inner(theta);
  KahanVector acc(data_.p());
  if (is_glm(kind_)) {
    GlmLink link = glm_link(kind_);
    for (Index i = 0; i < n; ++i) {
      if (kind_ == ObjectiveKind::poisson && z[i] > kExpGuard)
        throw EvalOverflow("poisson inner product overflows at sample " +
                               std::to_string(i),
                           static_cast<std::size_t>(i));
      acc.add_scaled(link.phi1(z[i]) - data_.y[i], data_.X.row(i));
    }
    return acc.value() / static_cast<double>(n);
  }
  const bool huber = kind_ == ObjectiveKind::svm_smoothed_huber;
  for (Index i = 0; i < n; ++i) {
    double m = data_.y[i] * z[i];
    double d1 = huber ? smoothed_huber_d1(m) : hinge2_d1(m);
    if (d1 != 0.0)
      acc.add_scaled(0.5 * svm_penalty_ * d1 * data_.y[i], data_.X.row(i));
  }
  return theta + acc.value();
}

Vector Objective::gradient_sample(const Vector& theta, std::size_t i) const {
  check_theta(theta);
  if (i >= static_cast<std::size_t>(data_.n()))
    throw InvalidInput("sample index out of range");
  const Index idx = static_cast<Index>(i);
  double z = data_.X.row(idx).dot(theta);
  if (is_glm(kind_)) {
    if (kind_ == ObjectiveKind::poisson && z > kExpGuard)
      throw EvalOverflow(
          "poisson inner product overflows at sample " + std::to_string(i), i);
    GlmLink link = glm_link(kind_);
    return (link.phi1(z) - data_.y[idx]) * data_.X.row(idx).transpose();
  }
  const bool huber = kind_ == ObjectiveKind::svm_smoothed_huber;
  double m = data_.y[idx] * z;
  double d1 = huber ? smoothed_huber_d1(m) : hinge2_d1(m);
  double n = static_cast<double>(data_.n());
  return theta + 0.5 * n * svm_penalty_ * d1 * data_.y[idx] *
                     data_.X.row(idx).transpose();
}

SymMatrix Objective::subsampled_hessian(
    const Vector& theta, std::span<const std::size_t> sample) const {
  check_theta(theta);
  if (sample.empty()) throw InvalidInput("sample set must be non-empty");
  const Index n = data_.n();
  const Index p = data_.p();
  for (std::size_t i : sample) {
    if (i >= static_cast<std::size_t>(n))
      throw InvalidInput("sample index " + std::to_string(i) +
                         " out of range");
  }
  Vector z = inner(theta);
  KahanSymMatrix acc(p);
  const double inv_size = 1.0 / static_cast<double>(sample.size());
  if (is_glm(kind_)) {
    GlmLink link = glm_link(kind_);
    for (std::size_t i : sample) {
      const Index idx = static_cast<Index>(i);
      if (kind_ == ObjectiveKind::poisson && z[idx] > kExpGuard)
        throw EvalOverflow("poisson inner product overflows at sample " +
                               std::to_string(i),
                           i);
      double w = link.phi2(z[idx]);
      if (w != 0.0) acc.add_outer(w, data_.X.row(idx));
    }
    return SymMatrix::trusted(acc.symmetric(inv_size));
  }
  const bool huber = kind_ == ObjectiveKind::svm_smoothed_huber;
  const double scale = 0.5 * static_cast<double>(n) * svm_penalty_;
  for (std::size_t i : sample) {
    const Index idx = static_cast<Index>(i);
    double m = data_.y[idx] * z[idx];
    double d2 = huber ? smoothed_huber_d2(m) : hinge2_d2(m);
    if (d2 != 0.0) acc.add_outer(scale * d2, data_.X.row(idx));
  }
  Matrix h = acc.symmetric(inv_size);
  h += Matrix::Identity(p, p);
  return SymMatrix::trusted(std::move(h));
}

SymMatrix Objective::full_hessian(const Vector& theta) const {
  std::vector<std::size_t> all(static_cast<std::size_t>(data_.n()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return subsampled_hessian(theta, all);
}

Vector Objective::hessian_vec(const Vector& theta, const Vector& v) const {
  check_theta(theta);
  if (v.size() != data_.p())
    throw InvalidInput("vector length does not match dimension");
  const Index n = data_.n();
  Vector z = inner(theta);
  Vector xv = data_.X * v;
  KahanVector acc(data_.p());
  if (is_glm(kind_)) {
    GlmLink link = glm_link(kind_);
    for (Index i = 0; i < n; ++i) {
      if (kind_ == ObjectiveKind::poisson && z[i] > kExpGuard)
        throw EvalOverflow("poisson inner product overflows at sample " +
                               std::to_string(i),
                           static_cast<std::size_t>(i));
      acc.add_scaled(link.phi2(z[i]) * xv[i], data_.X.row(i));
    }
    return acc.value() / static_cast<double>(n);
  }
  const bool huber = kind_ == ObjectiveKind::svm_smoothed_huber;
  for (Index i = 0; i < n; ++i) {
    double m = data_.y[i] * z[i];
    double d2 = huber ? smoothed_huber_d2(m) : hinge2_d2(m);
    if (d2 != 0.0)
      acc.add_scaled(0.5 * svm_penalty_ * d2 * xv[i], data_.X.row(i));
  }
  return v + acc.value();
}

ProblemConstants Objective::constants(const ConstantsQuery& query) const {
  ProblemConstants out;
  double rx = 0.0;
  for (Index i = 0; i < data_.n(); ++i)
    rx = std::max(rx, data_.X.row(i).squaredNorm());
  out.covariate_radius_sq = rx;

  switch (kind_) {
    case ObjectiveKind::ols:
      out.hessian_bound = 2.0 * rx;
      out.link_lipschitz = 0.0;
      out.hessian_lipschitz = 0.0;
      break;
    case ObjectiveKind::logistic:
      // phi'' <= 1/4 <= 1, so the unit-bound convention K = R_x applies;
      // L = sup |phi'''| = 1 / (6 sqrt(3)).
      out.hessian_bound = rx;
      out.link_lipschitz = 1.0 / (6.0 * std::sqrt(3.0));
      out.hessian_lipschitz = out.link_lipschitz * std::pow(rx, 1.5);
      break;
    case ObjectiveKind::poisson: {
      // exp is unbounded; bound it over the supplied inner-product box.
      double b = 0.0;
      if (query.z_bound) {
        b = *query.z_bound;
      } else {
        for (const Vector& th : query.iterates) {
          Vector z = data_.X * th;
          b = std::max(b, z.cwiseAbs().maxCoeff());
        }
      }
      double eb = std::exp(b);
      out.hessian_bound = eb * rx;
      out.link_lipschitz = eb;
      out.hessian_lipschitz = eb * std::pow(rx, 1.5);
      break;
    }
    case ObjectiveKind::svm_hinge2:
    case ObjectiveKind::svm_smoothed_huber: {
      // Surrogates: per-sample curvature scaled into a sub-sampled Hessian of
      // the given size; no Lipschitz constant exists for these losses.
      double size = query.sample_size > 0
                        ? static_cast<double>(query.sample_size)
                        : static_cast<double>(data_.n());
      out.hessian_bound =
          1.0 + static_cast<double>(data_.n()) * svm_penalty_ * rx / size;
      out.link_lipschitz = 0.0;
      out.hessian_lipschitz = std::numeric_limits<double>::infinity();
      break;
    }
  }
  return out;
}

}  // namespace newsamp
