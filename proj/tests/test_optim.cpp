#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "hawkes/model.hpp"
#include "hawkes/optim.hpp"
#include "oracles.hpp"

using namespace hawkes;
using optim::BoxProjection;
using optim::Objective;
using optim::OptimConfig;
using optim::ProxKind;
using optim::ProxSpec;

namespace {

double soft(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

/// Diagonal quadratic F(x) = sum w_i (x_i - c_i)^2.
Objective quadratic(const Vector& w, const Vector& c) {
  return {[w, c](const Vector& x) { return (w.array() * (x - c).array().square()).sum(); },
          [w, c](const Vector& x) { return Vector(2.0 * w.array() * (x - c).array()); }};
}

OptimConfig config_of(optim::Optimizer opt, optim::Scheduler sched, std::size_t max_iter,
                      double tol) {
  OptimConfig config;
  config.optimizer = opt;
  config.scheduler = sched;
  config.max_iter = max_iter;
  config.tol = tol;
  return config;
}

}  // namespace

TEST_CASE("proximal operators in closed form") {
  const Vector v = Vector::Constant(1, 1.0);
  SUBCASE("lasso soft-thresholds") {
    ProxSpec lasso{ProxKind::Lasso, 0.3, 0.5};
    CHECK(optim::prox(lasso, Vector::Constant(1, 1.0), 1.0)[0] == doctest::Approx(0.7));
    CHECK(optim::prox(lasso, Vector::Constant(1, -0.2), 1.0)[0] == doctest::Approx(0.0));
  }
  SUBCASE("kappa = 0 is the identity for every kind") {
    for (ProxKind kind : {ProxKind::None, ProxKind::Lasso, ProxKind::Ridge, ProxKind::ElasticNet}) {
      ProxSpec spec{kind, 0.0, 0.4};
      CHECK(optim::prox(spec, v, 0.7)[0] == doctest::Approx(1.0));
    }
  }
  SUBCASE("ridge shrinks multiplicatively") {
    ProxSpec ridge{ProxKind::Ridge, 0.5, 0.5};
    CHECK(optim::prox(ridge, v, 1.0)[0] == doctest::Approx(1.0 / 2.0));
  }
  SUBCASE("elastic net composes both") {
    ProxSpec elastic{ProxKind::ElasticNet, 0.5, 0.6};
    const double expected = soft(1.0, 0.5 * 0.6) / (1.0 + 2.0 * 0.5 * 0.4);
    CHECK(optim::prox(elastic, v, 1.0)[0] == doctest::Approx(expected));
  }
}

TEST_CASE("prox is nonexpansive for every kind") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> sym(-3.0, 3.0);
  for (ProxKind kind : {ProxKind::None, ProxKind::Lasso, ProxKind::Ridge, ProxKind::ElasticNet}) {
    ProxSpec spec{kind, 0.7, 0.3};
    for (int trial = 0; trial < 50; ++trial) {
      const Vector u = Vector::NullaryExpr(6, [&]() { return sym(rng); });
      const Vector v = Vector::NullaryExpr(6, [&]() { return sym(rng); });
      const double lhs = (optim::prox(spec, u, 0.9) - optim::prox(spec, v, 0.9)).norm();
      CHECK(lhs <= (u - v).norm() + 1e-12);
    }
  }
}

TEST_CASE("one-dimensional lasso problems solve to the soft threshold") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> a_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> k_dist(0.0, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = a_dist(rng);
    const double kappa = k_dist(rng);
    const Objective objective = quadratic(Vector::Constant(1, 0.5), Vector::Constant(1, a));
    for (optim::Optimizer opt : {optim::Optimizer::GD, optim::Optimizer::AGD}) {
      const auto result =
          optim::minimize(objective, ProxSpec{ProxKind::Lasso, kappa, 0.5},
                          config_of(opt, optim::Scheduler::Backtracking, 5000, 1e-13),
                          Vector::Zero(1));
      CHECK(result.minimizer[0] == doctest::Approx(soft(a, kappa)).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("acceleration wins on an ill-conditioned quadratic") {
  // Smallest curvature weight is 1, so F(x) <= 1e-12 forces ||x - c|| <= 1e-6.
  const Eigen::Index d = 100;
  Vector w(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    w[i] = std::pow(1000.0, static_cast<double>(i) / static_cast<double>(d - 1));
  }
  const Vector c = Vector::LinSpaced(d, -1.0, 2.0);
  const Objective objective = quadratic(w, c);

  auto first_hit = [&](optim::Optimizer opt) {
    OptimConfig config = config_of(opt, optim::Scheduler::Lipschitz, 60000, 1e-300);
    config.lipschitz_constant = 2.0 * w.maxCoeff();
    config.record_every = 1;
    const auto result = optim::minimize(objective, ProxSpec{}, config, Vector::Zero(d));
    for (const optim::TraceRecord& rec : result.trace.records) {
      if (rec.objective <= 1e-12) return rec.iteration;
    }
    return result.trace.n_iterations + 1;  // never reached
  };
  const std::size_t gd_hit = first_hit(optim::Optimizer::GD);
  const std::size_t agd_hit = first_hit(optim::Optimizer::AGD);
  CHECK(agd_hit <= 60000);
  CHECK(gd_hit <= 60000);
  CHECK(agd_hit < gd_hit);
}

TEST_CASE("starting at the optimum converges immediately") {
  const Vector c = Vector::Constant(3, 1.5);
  const Objective objective = quadratic(Vector::Constant(3, 1.0), c);
  const auto result = optim::minimize(objective, ProxSpec{},
                                      config_of(optim::Optimizer::GD,
                                                optim::Scheduler::Backtracking, 100, 1e-10),
                                      c);
  CHECK(result.trace.status == optim::Termination::Converged);
  CHECK(result.trace.n_iterations <= 1);
  CHECK(result.trace.records.size() >= 1);
}

TEST_CASE("GD with backtracking has a non-increasing objective trace") {
  std::mt19937_64 rng(56);
  const oracles::RandomInstance instance = oracles::random_instance(rng, 3, 3, 6);
  const model::SufficientStats stats = model::precompute(instance.data, instance.params.beta);
  const Eigen::Index d = instance.data.dim();
  const Objective objective{
      [&](const Vector& v) { return model::ls_loss(stats, model::unpack(v, d)); },
      [&](const Vector& v) { return model::pack(model::ls_grad(stats, model::unpack(v, d))); }};
  OptimConfig config = config_of(optim::Optimizer::GD, optim::Scheduler::Backtracking, 300, 1e-10);
  config.record_every = 1;
  const auto result = optim::minimize(objective, ProxSpec{ProxKind::Lasso, 0.05, 0.5}, config,
                                      Vector::Zero(d * (d + 1)));
  for (std::size_t i = 1; i < result.trace.records.size(); ++i) {
    CHECK(result.trace.records[i].objective <= result.trace.records[i - 1].objective + 1e-12);
  }
}

TEST_CASE("least-squares lasso solution satisfies the proximal fixed point") {
  std::mt19937_64 rng(78);
  const oracles::RandomInstance instance = oracles::random_instance(rng, 3, 3, 6);
  const model::SufficientStats stats = model::precompute(instance.data, instance.params.beta);
  const Eigen::Index d = instance.data.dim();
  const Objective objective{
      [&](const Vector& v) { return model::ls_loss(stats, model::unpack(v, d)); },
      [&](const Vector& v) { return model::pack(model::ls_grad(stats, model::unpack(v, d))); }};
  const ProxSpec spec{ProxKind::Lasso, 0.03, 0.5};
  BoxProjection nonneg;
  nonneg.lower = Vector::Zero(d * (d + 1));

  const auto result = optim::minimize(
      objective, spec,
      config_of(optim::Optimizer::AGD, optim::Scheduler::Backtracking, 20000, 1e-14),
      Vector::Zero(d * (d + 1)), nonneg);

  const double step = 1.0 / model::ls_hessian(stats).max_eigenvalue();
  Vector fixed_point =
      optim::prox(spec, result.minimizer - step * objective.gradient(result.minimizer), step);
  nonneg.apply(fixed_point);
  CHECK((fixed_point - result.minimizer).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("unpenalized unconstrained least squares reaches a small gradient") {
  std::mt19937_64 rng(90);
  const oracles::RandomInstance instance = oracles::random_instance(rng, 2, 3, 6);
  const model::SufficientStats stats = model::precompute(instance.data, instance.params.beta);
  const Eigen::Index d = instance.data.dim();
  const Objective objective{
      [&](const Vector& v) { return model::ls_loss(stats, model::unpack(v, d)); },
      [&](const Vector& v) { return model::pack(model::ls_grad(stats, model::unpack(v, d))); }};

  const double tol = 1e-2;
  const Vector init = Vector::Constant(d * (d + 1), 20.0);  // far start, large initial gradient
  const auto result =
      optim::minimize(objective, ProxSpec{},
                      config_of(optim::Optimizer::GD, optim::Scheduler::Backtracking, 50000, tol),
                      init);
  const double grad_norm = objective.gradient(result.minimizer).norm();
  const double init_grad_norm = objective.gradient(init).norm();
  CHECK(grad_norm <= 10.0 * tol * (1.0 + init_grad_norm));
}

TEST_CASE("lipschitz scheduler needs a constant; matches backtracking on least squares") {
  std::mt19937_64 rng(42);
  const oracles::RandomInstance instance = oracles::random_instance(rng, 3, 3, 6);
  const model::SufficientStats stats = model::precompute(instance.data, instance.params.beta);
  const Eigen::Index d = instance.data.dim();
  const Objective objective{
      [&](const Vector& v) { return model::ls_loss(stats, model::unpack(v, d)); },
      [&](const Vector& v) { return model::pack(model::ls_grad(stats, model::unpack(v, d))); }};

  CHECK_THROWS_AS(optim::minimize(objective, ProxSpec{},
                                  config_of(optim::Optimizer::GD, optim::Scheduler::Lipschitz,
                                            10, 1e-6),
                                  Vector::Zero(d * (d + 1))),
                  std::invalid_argument);

  OptimConfig with_l = config_of(optim::Optimizer::AGD, optim::Scheduler::Lipschitz, 5000, 1e-12);
  with_l.lipschitz_constant = model::ls_hessian(stats).max_eigenvalue();
  const auto fixed = optim::minimize(objective, ProxSpec{}, with_l, Vector::Zero(d * (d + 1)));
  const auto searched = optim::minimize(
      objective, ProxSpec{},
      config_of(optim::Optimizer::AGD, optim::Scheduler::Backtracking, 5000, 1e-12),
      Vector::Zero(d * (d + 1)));
  CHECK(fixed.trace.final_objective ==
        doctest::Approx(searched.trace.final_objective).epsilon(1e-8));
}

TEST_CASE("the line search gives up after sixty halvings") {
  // An objective whose domain is empty away from the start: every trial step
  // is rejected, so the search must fail rather than loop.
  Objective hostile{[](const Vector& x) -> double {
                      if (x.cwiseAbs().maxCoeff() > 0.0) throw std::domain_error("outside");
                      return 0.0;
                    },
                    [](const Vector&) { return Vector::Constant(1, 1.0).eval(); }};
  CHECK_THROWS_AS(optim::minimize(hostile, ProxSpec{},
                                  config_of(optim::Optimizer::GD,
                                            optim::Scheduler::Backtracking, 5, 1e-6),
                                  Vector::Zero(1)),
                  std::runtime_error);
}

TEST_CASE("free adagrad minimizes a quadratic without tuning") {
  const Objective objective = quadratic(Vector::Constant(5, 1.0), Vector::Zero(5));
  const auto result = optim::free_adagrad_minimize(objective, BoxProjection{}, 0.1, 500, 0.0,
                                                   Vector::Constant(5, 1.0));
  CHECK(result.minimizer.norm() <= 1e-3);
}

TEST_CASE("free adagrad keeps iterates feasible under an outward gradient") {
  // f(x) = sum x_i has gradient 1 everywhere; from the boundary the descent
  // direction points outside the box, so the projection must hold the line.
  Objective linear{[](const Vector& x) {
                     CHECK(x.minCoeff() >= -1e-15);
                     return x.sum();
                   },
                   [](const Vector& x) {
                     CHECK(x.minCoeff() >= -1e-15);
                     return Vector::Constant(x.size(), 1.0).eval();
                   }};
  BoxProjection box;
  box.lower = Vector::Zero(4);
  const auto result =
      optim::free_adagrad_minimize(linear, box, 0.1, 100, 0.0, Vector::Zero(4));
  CHECK(result.minimizer.minCoeff() >= 0.0);
  CHECK(result.minimizer.maxCoeff() <= 1e-12);
}

TEST_CASE("free adagrad is robust to the initial distance guess") {
  const Objective objective = quadratic(Vector::Constant(5, 1.0), Vector::Zero(5));
  const auto small = optim::free_adagrad_minimize(objective, BoxProjection{}, 0.1, 500, 0.0,
                                                  Vector::Constant(5, 1.0));
  const auto large = optim::free_adagrad_minimize(objective, BoxProjection{}, 1.0, 500, 0.0,
                                                  Vector::Constant(5, 1.0));
  CHECK(std::abs(small.trace.final_objective - large.trace.final_objective) <= 1e-2);
}

TEST_CASE("free adagrad aborts on a non-finite gradient") {
  Objective bad{[](const Vector& x) { return x.sum(); },
                [](const Vector& x) {
                  return Vector::Constant(x.size(), std::numeric_limits<double>::quiet_NaN())
                      .eval();
                }};
  CHECK_THROWS_AS(
      optim::free_adagrad_minimize(bad, BoxProjection{}, 0.1, 10, 0.0, Vector::Zero(2)),
      std::runtime_error);
}

TEST_CASE("free adagrad records a non-increasing best objective") {
  const Objective objective = quadratic(Vector::Constant(3, 2.0), Vector::Constant(3, 0.7));
  const auto result = optim::free_adagrad_minimize(objective, BoxProjection{}, 0.1, 200, 0.0,
                                                   Vector::Zero(3));
  for (std::size_t i = 1; i < result.trace.records.size(); ++i) {
    CHECK(result.trace.records[i].objective <= result.trace.records[i - 1].objective + 1e-15);
  }
}
