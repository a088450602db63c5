#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "newsamp/baselines.hpp"
#include "oracles.hpp"

using namespace newsamp;

namespace {

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
  inst.ds.y = inst.ds.X * oracle::random_vector(p, seed + 1);
  for (Index i = 0; i < n; ++i) inst.ds.y[i] += 0.1 * rng.normal();
  Matrix gram = inst.ds.X.transpose() * inst.ds.X;
  inst.solution = gram.ldlt().solve(0.5 * inst.ds.X.transpose() * inst.ds.y);
  return inst;
}

// f(theta) = 0.5 ||theta||^2 realized as a least-squares objective:
// n = p samples with X = sqrt(p/2) I and zero responses.
Objective norm_squared_objective(Index p) {
  Dataset ds;
  ds.X = std::sqrt(static_cast<double>(p) / 2.0) *
         Matrix::Identity(p, p);
  ds.y = Vector::Zero(p);
  return Objective(ds, ObjectiveKind::ols);
}

// Logistic data in the interpolation regime: responses equal the conditional
// mean at theta_true, so every per-sample gradient vanishes at the optimum.
Dataset interpolating_logistic(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.X.resize(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) ds.X(i, j) = rng.normal();
  Vector theta_true = 0.7 * oracle::random_vector(p, seed + 5).normalized();
  Vector z = ds.X * theta_true;
  ds.y.resize(n);
  for (Index i = 0; i < n; ++i) ds.y[i] = 1.0 / (1.0 + std::exp(-z[i]));
  return ds;
}

BaselineConfig config_for(BaselineMethod m, Index p) {
  BaselineConfig cfg;
  cfg.method = m;
  cfg.theta0 = Vector::Zero(p);
  return cfg;
}

}  // namespace

TEST_CASE("gradient descent solves the unit quadratic in one step") {
  // p = 2 makes the identity scaling exact, so gradient(theta) == theta.
  Objective obj = norm_squared_objective(2);
  BaselineConfig cfg = config_for(BaselineMethod::gd, 2);
  cfg.step = 1.0;
  cfg.theta0 = oracle::random_vector(2, 2);
  Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained());
  REQUIRE(tr.records.size() >= 2);
  CHECK(tr.records[1].theta.norm() == 0.0);
}

TEST_CASE("newton reaches the least-squares solution in one iteration") {
  auto inst = make_ols(40, 6, 3);
  Objective obj(inst.ds, ObjectiveKind::ols);
  BaselineConfig cfg = config_for(BaselineMethod::newton, 6);
  Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained(),
                          inst.solution);
  CHECK(tr.reason == StopReason::eps_reached);
  CHECK(tr.iterations == 1);
  CHECK(*tr.records[1].dist < 1e-10);
}

TEST_CASE("bfgs with exact line steps terminates on quadratics") {
  auto inst = make_ols(60, 10, 5);
  Objective obj(inst.ds, ObjectiveKind::ols);
  BaselineConfig cfg = config_for(BaselineMethod::bfgs, 10);
  cfg.exact_line_step = true;
  cfg.max_iters = 11;
  cfg.eps = 1e-12;
  Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained(),
                          inst.solution);
  double best = 1e9;
  for (const auto& r : tr.records)
    if (r.dist) best = std::min(best, *r.dist);
  CHECK(best < 1e-8);
}

TEST_CASE("gd contraction matches the quadratic rate") {
  auto inst = make_ols(80, 5, 7);
  Objective obj(inst.ds, ObjectiveKind::ols);
  auto dec = full_eigen(obj.full_hessian(Vector::Zero(5)));
  double lam1 = dec.values[0];
  double lamp = dec.values[4];
  BaselineConfig cfg = config_for(BaselineMethod::gd, 5);
  cfg.step = 1.0 / lam1;
  cfg.max_iters = 50;
  cfg.theta0 = oracle::random_vector(5, 8);
  Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained(),
                          inst.solution);
  auto dist = tr.distances();
  double rate = 1.0 - lamp / lam1;
  for (std::size_t i = 1; i < dist.size(); ++i)
    CHECK(dist[i] <= rate * dist[i - 1] + 1e-12);
}

TEST_CASE("sgd follows the configured step schedule exactly") {
  Dataset ds = interpolating_logistic(50, 4, 9);
  Objective obj(ds, ObjectiveKind::logistic);
  BaselineConfig cfg = config_for(BaselineMethod::sgd, 4);
  cfg.sgd_step = 0.4;
  cfg.sgd_decay = 7.0;
  cfg.max_iters = 20;
  cfg.eps = 1e-14;
  Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained());
  for (const auto& rec : tr.records) {
    if (!rec.step) continue;
    double expected = 0.4 / (1.0 + static_cast<double>(rec.t) / 7.0);
    CHECK(*rec.step == expected);
  }
}

TEST_CASE("adagrad effective steps shrink per coordinate") {
  Dataset ds = interpolating_logistic(60, 3, 10);
  Objective obj(ds, ObjectiveKind::logistic);
  BaselineConfig cfg = config_for(BaselineMethod::adagrad, 3);
  cfg.ada_step = 0.2;
  cfg.max_iters = 200;
  cfg.eps = 1e-14;
  cfg.theta0 = 0.3 * Vector::Ones(3);
  Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained());
  CHECK(tr.records.size() > 10);
  // Movement per step is bounded by the (non-increasing) per-coordinate rates.
  for (std::size_t i = 2; i < tr.records.size(); ++i) {
    Vector d = tr.records[i].theta - tr.records[i - 1].theta;
    CHECK(d.norm() <= 0.2 * std::sqrt(3.0) + 1e-12);
  }
}

TEST_CASE("all baselines reach tiny gradients on a well-conditioned "
          "logistic problem") {
  Dataset ds = interpolating_logistic(5000, 20, 11);
  Objective obj(ds, ObjectiveKind::logistic);

  // Condition of the Hessian at the solution stays below 10.
  Vector star = newton_reference(obj, Vector::Zero(20), 1e-12, 100);
  auto dec = full_eigen(obj.full_hessian(star));
  CHECK(dec.values[0] / dec.values[19] < 10.0);
  double lam1 = dec.values[0];

  auto grad_at_best = [&](const Trace& tr) {
    double best = 1e18;
    for (const auto& r : tr.records) best = std::min(best, r.grad_norm);
    return best;
  };

  for (auto m : {BaselineMethod::gd, BaselineMethod::agd,
                 BaselineMethod::newton, BaselineMethod::bfgs,
                 BaselineMethod::lbfgs}) {
    BaselineConfig cfg = config_for(m, 20);
    cfg.step = m == BaselineMethod::newton ? 1.0 : 1.0 / lam1;
    if (m == BaselineMethod::bfgs || m == BaselineMethod::lbfgs)
      cfg.exact_line_step = true;
    cfg.max_iters = m == BaselineMethod::newton ? 30 : 400;
    cfg.eps = 1e-12;
    Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained());
    INFO("method ", baseline_name(m));
    CHECK(grad_at_best(tr) <= 1e-6);
  }

  for (auto m : {BaselineMethod::sgd, BaselineMethod::adagrad}) {
    BaselineConfig cfg = config_for(m, 20);
    cfg.sgd_step = 1.2;
    cfg.sgd_decay = 1e5;
    cfg.ada_step = 0.8;
    cfg.max_iters = 400000;
    cfg.record_every = 4000;
    cfg.record_iterates = false;
    cfg.eps = 1e-13;
    cfg.seed = 17;
    Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained());
    INFO("method ", baseline_name(m));
    CHECK(grad_at_best(tr) <= 1e-6);
  }
}

TEST_CASE("divergence is detected and reported") {
  auto inst = make_ols(30, 4, 13);
  Objective obj(inst.ds, ObjectiveKind::ols);
  BaselineConfig cfg = config_for(BaselineMethod::gd, 4);
  cfg.step = 50.0;  // far beyond 2 / lam_1
  cfg.max_iters = 200;
  Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained());
  CHECK(tr.reason == StopReason::error);
  CHECK(tr.error_message.find("divergence") != std::string::npos);
}

TEST_CASE("curvature-pair guard survives a zero first step") {
  auto inst = make_ols(30, 4, 15);
  Objective obj(inst.ds, ObjectiveKind::ols);
  BaselineConfig cfg = config_for(BaselineMethod::bfgs, 4);
  cfg.theta0 = inst.solution;  // start at the optimum: s = y = 0
  cfg.exact_line_step = true;
  Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained());
  CHECK(tr.reason == StopReason::eps_reached);
  CHECK(tr.iterations == 0);
  for (const auto& rec : tr.records) CHECK(rec.theta.allFinite());
}

TEST_CASE("projection applies after every baseline update") {
  auto inst = make_ols(40, 3, 19);
  Objective obj(inst.ds, ObjectiveKind::ols);
  ConvexSet ball = ConvexSet::l2_ball(Vector::Zero(3), 0.2);
  for (auto m : {BaselineMethod::gd, BaselineMethod::agd,
                 BaselineMethod::sgd}) {
    BaselineConfig cfg = config_for(m, 3);
    cfg.step = 0.05;
    cfg.sgd_step = 0.05;
    cfg.max_iters = 40;
    Trace tr = run_baseline(obj, cfg, ball);
    for (const auto& rec : tr.records) CHECK(ball.contains(rec.theta, 1e-10));
  }
}

TEST_CASE("newton flags singular hessians") {
  Dataset ds;
  ds.X = Matrix::Zero(10, 3);
  Rng rng(21);
  for (Index i = 0; i < 10; ++i) ds.X(i, 0) = rng.normal();
  ds.y = ds.X * Vector::Ones(3);
  Objective obj(ds, ObjectiveKind::ols);
  BaselineConfig cfg = config_for(BaselineMethod::newton, 3);
  Trace tr = run_baseline(obj, cfg, ConvexSet::unconstrained());
  CHECK(tr.reason == StopReason::error);
  CHECK(tr.error_message.find("singular") != std::string::npos);
}

TEST_CASE("reference solver reaches machine-precision gradients") {
  Dataset ds = interpolating_logistic(500, 8, 23);
  Objective obj(ds, ObjectiveKind::logistic);
  Vector star = newton_reference(obj, Vector::Zero(8), 1e-12, 100);
  CHECK(obj.gradient(star).norm() <= 1e-12);
}
