#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "newsamp/optimizer.hpp"
#include "oracles.hpp"

using namespace newsamp;

namespace {

// Least-squares problem with a planted solution; X drawn with a mild spectrum
// so the Hessian (2/n) X^T X is well conditioned.
struct OlsInstance {
  Dataset ds;
  Vector solution;
};

OlsInstance make_ols(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  OlsInstance inst;
  inst.ds.X.resize(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) inst.ds.X(i, j) = rng.normal();
  Vector theta_true = oracle::random_vector(p, seed + 1);
  Vector noise(n);
  for (Index i = 0; i < n; ++i) noise[i] = 0.1 * rng.normal();
  inst.ds.y = inst.ds.X * theta_true + noise;
  // grad f = (2/n) X^T X theta - (1/n) X^T y = 0
  Matrix gram = inst.ds.X.transpose() * inst.ds.X;
  inst.solution = gram.ldlt().solve(0.5 * inst.ds.X.transpose() * inst.ds.y);
  return inst;
}

NewSampConfig base_config(Index p, Index rank, std::size_t sample,
                          std::uint64_t seed) {
  NewSampConfig cfg;
  cfg.rank = rank;
  cfg.scheme = SampleScheme::independent(sample, seed, false);
  cfg.step = StepMode::fixed(1.0);
  cfg.eps = 1e-10;
  cfg.max_iters = 80;
  cfg.theta0 = Vector::Zero(p);
  return cfg;
}

}  // namespace

TEST_CASE("projection examples") {
  ConvexSet un = ConvexSet::unconstrained();
  Vector v(2);
  v << 3, 4;
  CHECK((un.project(v) - v).norm() == 0.0);

  ConvexSet ball = ConvexSet::l2_ball(Vector::Zero(2), 1.0);
  Vector pb = ball.project(v);
  CHECK(pb[0] == doctest::Approx(0.6));
  CHECK(pb[1] == doctest::Approx(0.8));

  Vector lo = Vector::Zero(2), hi = Vector::Ones(2);
  ConvexSet box = ConvexSet::box(lo, hi);
  Vector w(2);
  w << -1, 2;
  Vector pw = box.project(w);
  CHECK(pw[0] == 0.0);
  CHECK(pw[1] == 1.0);
}

TEST_CASE("projection is idempotent and non-expansive") {
  ConvexSet ball = ConvexSet::l2_ball(oracle::random_vector(4, 3), 0.7);
  for (std::uint64_t s = 0; s < 50; ++s) {
    Vector a = 2.0 * oracle::random_vector(4, 100 + s);
    Vector b = 2.0 * oracle::random_vector(4, 200 + s);
    Vector pa = ball.project(a);
    CHECK((ball.project(pa) - pa).norm() < 1e-12);
    CHECK((ball.project(a) - ball.project(b)).norm() <=
          (a - b).norm() + 1e-12);
  }
}

TEST_CASE("adaptive step formula") {
  CHECK(adaptive_step(1.0, 1.0, 10, 100, 0.0) == doctest::Approx(1.0));
  CHECK(adaptive_step(0.5, 1.0, 10, 100, 0.0) == doctest::Approx(4.0 / 3.0));
  double gamma = std::sqrt(std::log(100.0) / 1000.0);
  CHECK(adaptive_step(0.5, 1.0, 100, 1000, 1.0) ==
        doctest::Approx(2.0 / (1.5 + gamma)));
  CHECK_THROWS_AS(adaptive_step(0.5, 0.0, 10, 100), DegenerateSpectrum);
  CHECK_THROWS_AS(adaptive_step(2.0, 1.0, 10, 100), InvalidInput);
}

TEST_CASE("full-rank threshold and full sample reduce to Newton on quadratics") {
  for (std::uint64_t s = 1; s <= 5; ++s) {
    auto inst = make_ols(60, 6, s);
    Objective obj(inst.ds, ObjectiveKind::ols);
    NewSampConfig cfg = base_config(6, 5, 60, s);
    cfg.theta0 = oracle::random_vector(6, 900 + s);
    Trace tr = newsamp_run(obj, cfg, ConvexSet::unconstrained(),
                           inst.solution);
    REQUIRE(tr.reason == StopReason::eps_reached);
    CHECK(tr.iterations == 1);
    CHECK(*tr.records[1].dist <= 1e-8);
  }
}

TEST_CASE("iterate error follows the exact affine recursion on quadratics") {
  auto inst = make_ols(80, 8, 11);
  Objective obj(inst.ds, ObjectiveKind::ols);
  Matrix hess_full = obj.full_hessian(Vector::Zero(8)).mat();

  NewSampConfig cfg = base_config(8, 3, 30, 11);
  cfg.scheme = SampleScheme::fixed_subset(30, 11);
  cfg.max_iters = 70;

  std::vector<double> ratios;
  std::vector<double> norms;
  Vector star = inst.solution;
  auto observer = [&](const IterationView& view) {
    Matrix contraction = Matrix::Identity(8, 8) -
                         view.eta * view.scaling.dense() * hess_full;
    // theta^{t+1} - theta* = (I - eta Q H)(theta^t - theta*)
    Vector predicted = contraction * (view.theta - star);
    CHECK((view.theta_next - star - predicted).norm() < 1e-10);
    ratios.push_back((view.theta_next - star).norm() /
                     (view.theta - star).norm());
    norms.push_back(oracle::operator_norm(contraction));
  };
  Trace tr = newsamp_run(obj, cfg, ConvexSet::unconstrained(), star, observer);
  REQUIRE(ratios.size() > 3);
  for (std::size_t i = 0; i < ratios.size(); ++i)
    CHECK(ratios[i] <= norms[i] + 1e-9);
  CHECK(tr.reason == StopReason::eps_reached);
}

TEST_CASE("objective decreases along quadratic runs") {
  for (std::uint64_t s = 1; s <= 5; ++s) {
    auto inst = make_ols(100, 10, 40 + s);
    Objective obj(inst.ds, ObjectiveKind::ols);
    NewSampConfig cfg = base_config(10, 4, 50, s);
    cfg.scheme = SampleScheme::independent(50, s, false);
    cfg.step = StepMode::adaptive();
    cfg.max_iters = 40;
    Trace tr = newsamp_run(obj, cfg, ConvexSet::unconstrained());
    for (std::size_t i = 1; i < tr.records.size(); ++i)
      CHECK(tr.records[i].objective <= tr.records[i - 1].objective + 1e-12);
  }
}

TEST_CASE("projected iterates stay feasible") {
  auto inst = make_ols(60, 5, 17);
  Objective obj(inst.ds, ObjectiveKind::ols);
  ConvexSet ball = ConvexSet::l2_ball(Vector::Zero(5), 0.4);
  NewSampConfig cfg = base_config(5, 2, 30, 17);
  cfg.step = StepMode::adaptive();
  cfg.max_iters = 30;
  cfg.theta0 = Vector::Ones(5);  // outside; projected on entry
  Trace tr = newsamp_run(obj, cfg, ball);
  for (const auto& rec : tr.records) {
    REQUIRE(rec.theta.size() == 5);
    CHECK(ball.contains(rec.theta, 1e-10));
  }
}

TEST_CASE("runs are deterministic given config and seeds") {
  auto inst = make_ols(70, 6, 23);
  Objective obj(inst.ds, ObjectiveKind::ols);
  NewSampConfig cfg = base_config(6, 2, 25, 23);
  cfg.scheme = SampleScheme::independent(25, 77);
  cfg.step = StepMode::adaptive();
  Trace a = newsamp_run(obj, cfg, ConvexSet::unconstrained());
  Trace b = newsamp_run(obj, cfg, ConvexSet::unconstrained());
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK((a.records[i].theta - b.records[i].theta).lpNorm<Eigen::Infinity>() <=
          1e-15);
    CHECK(a.records[i].objective == b.records[i].objective);
  }
}

TEST_CASE("fixed steps beyond the contraction bound warn but proceed") {
  auto inst = make_ols(50, 5, 29);
  Objective obj(inst.ds, ObjectiveKind::ols);
  NewSampConfig cfg = base_config(5, 2, 50, 29);
  cfg.step = StepMode::fixed(3.0);  // > 2 violates the bound everywhere
  cfg.max_iters = 3;
  Trace tr = newsamp_run(obj, cfg, ConvexSet::unconstrained());
  CHECK_FALSE(tr.warnings.empty());
}

TEST_CASE("degenerate spectrum aborts with the trace so far") {
  // Rank-deficient design: only 2 informative directions in dimension 4.
  Dataset ds;
  ds.X = Matrix::Zero(40, 4);
  Rng rng(31);
  for (Index i = 0; i < 40; ++i) {
    ds.X(i, 0) = rng.normal();
    ds.X(i, 1) = rng.normal();
  }
  ds.y = ds.X * Vector::Ones(4);
  Objective obj(ds, ObjectiveKind::ols);
  NewSampConfig cfg = base_config(4, 3, 40, 31);
  Trace tr = newsamp_run(obj, cfg, ConvexSet::unconstrained());
  CHECK(tr.reason == StopReason::error);
  CHECK(tr.error_message.find("threshold eigenvalue") != std::string::npos);
  CHECK(tr.records.size() == 1);
}

TEST_CASE("non-finite iterates stop with a numerical failure") {
  auto inst = make_ols(40, 4, 37);
  Objective obj(inst.ds, ObjectiveKind::ols);
  NewSampConfig cfg = base_config(4, 2, 40, 37);
  cfg.step = StepMode::fixed(1e160);
  cfg.max_iters = 10;
  Trace tr = newsamp_run(obj, cfg, ConvexSet::unconstrained());
  CHECK(tr.reason == StopReason::error);
}

TEST_CASE("plain sub-sampled Newton matches exact Newton on the full sample") {
  auto inst = make_ols(50, 5, 41);
  Objective obj(inst.ds, ObjectiveKind::ols);
  NewSampConfig cfg = base_config(5, 4, 50, 41);
  Trace plain = plain_subsampled_newton_run(obj, cfg,
                                            ConvexSet::unconstrained(),
                                            inst.solution);
  Trace full = newsamp_run(obj, cfg, ConvexSet::unconstrained(),
                           inst.solution);
  REQUIRE(plain.records.size() == full.records.size());
  for (std::size_t i = 0; i < plain.records.size(); ++i)
    CHECK((plain.records[i].theta - full.records[i].theta).norm() < 1e-10);
}

TEST_CASE("plain sub-sampled Newton fails on rank-deficient sub-samples") {
  auto inst = make_ols(100, 8, 43);
  Objective obj(inst.ds, ObjectiveKind::ols);
  NewSampConfig cfg = base_config(8, 2, 4, 43);  // |S| = 4 < p = 8
  Trace tr = plain_subsampled_newton_run(obj, cfg,
                                         ConvexSet::unconstrained());
  CHECK(tr.reason == StopReason::error);
  CHECK(tr.error_message.find("singular") != std::string::npos);
}

TEST_CASE("max-iteration stop is reported") {
  auto inst = make_ols(50, 5, 47);
  Objective obj(inst.ds, ObjectiveKind::ols);
  NewSampConfig cfg = base_config(5, 2, 20, 47);
  cfg.step = StepMode::fixed(0.05);  // far too small to converge in 4 steps
  cfg.max_iters = 4;
  Trace tr = newsamp_run(obj, cfg, ConvexSet::unconstrained());
  CHECK(tr.reason == StopReason::max_iters);
  CHECK(tr.iterations == 4);
  CHECK(tr.records.size() == 5);
  for (std::size_t i = 1; i < tr.records.size(); ++i) {
    CHECK(tr.records[i].t == tr.records[i - 1].t + 1);
    CHECK(tr.records[i].elapsed_s >= tr.records[i - 1].elapsed_s);
  }
}
