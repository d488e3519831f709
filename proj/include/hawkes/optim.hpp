#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hawkes/core.hpp"

// First-order proximal solvers over packed parameter vectors: plain and
// accelerated proximal gradient (ISTA / FISTA), a fixed 1/L step or a
// backtracking line search, closed-form proximal operators for the three
// penalties, an optional lower-bound box constraint, and a parameter-free
// projected adaptive-gradient method for non-smooth non-convex refitting.

namespace hawkes::optim {

enum class ProxKind { None, Lasso, Ridge, ElasticNet };

struct ProxSpec {
  ProxKind kind = ProxKind::None;
  double kappa = 0.0;
  double zeta = 0.5;  // elastic-net l1 weight, used only by ElasticNet
  // First penalized coordinate: entries below `begin` pass through both the
  // operator and the penalty untouched (an unpenalized leading block).
  Eigen::Index begin = 0;
};

enum class Optimizer { GD, AGD };
enum class Scheduler { Lipschitz, Backtracking };

struct OptimConfig {
  Optimizer optimizer = Optimizer::AGD;
  Scheduler scheduler = Scheduler::Backtracking;
  std::size_t max_iter = 200;
  double tol = 1e-5;
  std::size_t record_every = 10;
  std::size_t print_every = 10;
  // Gradient Lipschitz constant; must be set when scheduler == Lipschitz.
  double lipschitz_constant = 0.0;
};

enum class Termination { Converged, MaxIterReached };

struct TraceRecord {
  std::size_t iteration = 0;
  double objective = 0.0;
  double tol_measure = 0.0;
};

struct OptimTrace {
  std::vector<TraceRecord> records;
  Termination status = Termination::MaxIterReached;
  std::size_t n_iterations = 0;
  double final_objective = 0.0;
};

/// Smooth part of the objective. value/gradient may throw std::domain_error
/// at infeasible points; the solvers treat that as a rejected step.
struct Objective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

/// Componentwise lower-bound projection. An empty bound vector is the
/// identity (unconstrained).
struct BoxProjection {
  Vector lower;

  bool active() const { return lower.size() > 0; }
  void apply(Vector& x) const {
    if (active()) x = x.cwiseMax(lower);
  }
};

/// Proximal operator of step * kappa * Omega at v.
Vector prox(const ProxSpec& spec, const Vector& v, double step);

/// kappa * Omega(v) for the penalized objective.
double penalty_value(const ProxSpec& spec, const Vector& v);

struct MinimizeResult {
  Vector minimizer;
  OptimTrace trace;
};

/// Proximal gradient descent on F + kappa * Omega (+ box constraint).
/// GD iterates x <- prox(x - s grad F(x)); AGD adds FISTA momentum. The
/// backtracking search halves the step until the quadratic upper bound
/// F(x+) <= F(y) + <grad, x+ - y> + ||x+ - y||^2 / (2s) holds, and throws
/// std::runtime_error after 60 halvings. Stops when the relative objective
/// change drops below tol or after max_iter iterations.
MinimizeResult minimize(const Objective& objective, const ProxSpec& prox_spec,
                        const OptimConfig& config, const Vector& init,
                        const BoxProjection& constraint = {});

/// Projected adaptive-gradient descent whose only tuning input is gamma0, an
/// initial guess for the distance between the start point and the optimum.
/// The scalar step is gamma / sqrt(sum of squared gradient norms) and gamma
/// doubles whenever the iterate travels beyond the current bound. Returns the
/// best-objective feasible iterate; the recorded objective sequence is the
/// running best, hence non-increasing.
MinimizeResult free_adagrad_minimize(const Objective& objective, const BoxProjection& projection,
                                     double gamma0, std::size_t max_iter, double tol,
                                     const Vector& init);

/// Renders the recorded iterations as an aligned text table
/// (Iteration | Loss | Tolerance), keeping rows whose iteration index is a
/// multiple of print_every (the first and last recorded rows always print).
std::string format_trace_table(const OptimTrace& trace, std::size_t print_every = 1);

}  // namespace hawkes::optim
