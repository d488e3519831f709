#include "hawkes/optim.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace hawkes::optim {

namespace {

constexpr int kMaxHalvings = 60;

double soft_threshold(double v, double threshold) {
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

double rel_change(double current, double previous) {
  return std::abs(current - previous) / std::max(1.0, std::abs(current));
}

}  // namespace

Vector prox(const ProxSpec& spec, const Vector& v, double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("prox step must be positive");
  }
  if (spec.begin < 0 || spec.begin > v.size()) {
    throw std::invalid_argument("prox range start out of bounds");
  }
  Vector out = v;
  auto tail = out.tail(v.size() - spec.begin);
  switch (spec.kind) {
    case ProxKind::None:
      return out;
    case ProxKind::Lasso: {
      const double t = step * spec.kappa;
      for (Eigen::Index i = 0; i < tail.size(); ++i) tail[i] = soft_threshold(tail[i], t);
      return out;
    }
    case ProxKind::Ridge:
      tail /= 1.0 + 2.0 * step * spec.kappa;
      return out;
    case ProxKind::ElasticNet: {
      const double t = step * spec.kappa * spec.zeta;
      const double shrink = 1.0 + 2.0 * step * spec.kappa * (1.0 - spec.zeta);
      for (Eigen::Index i = 0; i < tail.size(); ++i) tail[i] = soft_threshold(tail[i], t) / shrink;
      return out;
    }
  }
  throw std::logic_error("unreachable prox kind");
}

double penalty_value(const ProxSpec& spec, const Vector& v) {
  const auto tail = v.tail(v.size() - spec.begin);
  switch (spec.kind) {
    case ProxKind::None:
      return 0.0;
    case ProxKind::Lasso:
      return spec.kappa * tail.lpNorm<1>();
    case ProxKind::Ridge:
      return spec.kappa * tail.squaredNorm();
    case ProxKind::ElasticNet:
      return spec.kappa * (spec.zeta * tail.lpNorm<1>() + (1.0 - spec.zeta) * tail.squaredNorm());
  }
  throw std::logic_error("unreachable prox kind");
}

MinimizeResult minimize(const Objective& objective, const ProxSpec& prox_spec,
                        const OptimConfig& config, const Vector& init,
                        const BoxProjection& constraint) {
  if (!(config.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (config.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (config.scheduler == Scheduler::Lipschitz && !(config.lipschitz_constant > 0.0)) {
    throw std::invalid_argument("lipschitz scheduler requires a positive Lipschitz constant");
  }
  const std::size_t record_every = std::max<std::size_t>(1, config.record_every);

  Vector x = init;
  constraint.apply(x);
  Vector y = x;  // AGD extrapolation point; equals x for GD
  double momentum_t = 1.0;

  double objective_x = objective.value(x) + penalty_value(prox_spec, x);

  MinimizeResult result;
  result.trace.records.push_back({0, objective_x, std::numeric_limits<double>::infinity()});

  const double fixed_step = config.scheduler == Scheduler::Lipschitz
                                ? 1.0 / config.lipschitz_constant
                                : 0.0;
  double search_step = 0.5;  // doubled before the first trial, so it starts at 1

  auto step_from = [&](const Vector& at, const Vector& grad_at, double f_at,
                       double& step) -> Vector {
    if (config.scheduler == Scheduler::Lipschitz) {
      step = fixed_step;
      Vector next = prox(prox_spec, at - step * grad_at, step);
      constraint.apply(next);
      return next;
    }
    // Backtracking: allow the step to grow, then halve until the quadratic
    // upper bound holds; a domain error counts as a violated bound.
    step = std::min(search_step * 2.0, 1e12);
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      Vector next = prox(prox_spec, at - step * grad_at, step);
      constraint.apply(next);
      const Vector diff = next - at;
      double f_next;
      bool ok = true;
      try {
        f_next = objective.value(next);
      } catch (const std::domain_error&) {
        ok = false;
        f_next = 0.0;
      }
      if (ok &&
          f_next <= f_at + grad_at.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-14) {
        search_step = step;
        return next;
      }
      step *= 0.5;
    }
    throw std::runtime_error("line search failed after 60 step halvings");
  };

  for (std::size_t k = 1; k <= config.max_iter; ++k) {
    Vector grad_y;
    double f_y;
    if (config.optimizer == Optimizer::AGD) {
      try {
        f_y = objective.value(y);
        grad_y = objective.gradient(y);
      } catch (const std::domain_error&) {
        // Momentum extrapolated outside the domain: restart from x.
        y = x;
        momentum_t = 1.0;
        f_y = objective.value(y);
        grad_y = objective.gradient(y);
      }
    } else {
      y = x;
      f_y = objective_x - penalty_value(prox_spec, x);
      grad_y = objective.gradient(y);
    }

    double step = 0.0;
    Vector x_next = step_from(y, grad_y, f_y, step);

    if (config.optimizer == Optimizer::AGD) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
      y = x_next + ((momentum_t - 1.0) / t_next) * (x_next - x);
      momentum_t = t_next;
    }
    x = x_next;

    const double objective_next = objective.value(x) + penalty_value(prox_spec, x);
    const double measure = rel_change(objective_next, objective_x);
    objective_x = objective_next;
    result.trace.n_iterations = k;

    const bool converged = measure < config.tol;
    if (k % record_every == 0 || converged || k == config.max_iter) {
      result.trace.records.push_back({k, objective_x, measure});
    }
    if (converged) {
      result.trace.status = Termination::Converged;
      break;
    }
  }
  if (result.trace.n_iterations == config.max_iter &&
      result.trace.status != Termination::Converged) {
    result.trace.status = Termination::MaxIterReached;
  }
  result.trace.final_objective = objective_x;
  result.minimizer = std::move(x);
  return result;
}

MinimizeResult free_adagrad_minimize(const Objective& objective, const BoxProjection& projection,
                                     double gamma0, std::size_t max_iter, double tol,
                                     const Vector& init) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be positive");

  Vector x = init;
  projection.apply(x);
  const Vector origin = x;

  double f_x = objective.value(x);
  MinimizeResult result;
  result.minimizer = x;
  double best = f_x;
  result.trace.records.push_back({0, best, std::numeric_limits<double>::infinity()});

  double gamma = gamma0;
  double grad_norm_sum = 0.0;
  double f_prev = f_x;

  for (std::size_t k = 1; k <= max_iter; ++k) {
    Vector grad = objective.gradient(x);
    if (!grad.allFinite()) {
      throw std::runtime_error("non-finite gradient in adaptive descent at iteration " +
                               std::to_string(k));
    }
    const double grad_sq = grad.squaredNorm();
    result.trace.n_iterations = k;
    if (grad_sq == 0.0) {
      result.trace.records.push_back({k, best, 0.0});
      result.trace.status = Termination::Converged;
      break;
    }
    grad_norm_sum += grad_sq;
    const double step = gamma / std::sqrt(grad_norm_sum);
    x -= step * grad;
    projection.apply(x);
    // Traveling past the current distance estimate means it was too small.
    const double traveled = (x - origin).norm();
    while (traveled > gamma) gamma *= 2.0;

    f_x = objective.value(x);
    if (f_x < best) {
      best = f_x;
      result.minimizer = x;
    }
    const double measure = rel_change(f_x, f_prev);
    f_prev = f_x;
    result.trace.records.push_back({k, best, measure});
    if (measure < tol) {
      result.trace.status = Termination::Converged;
      break;
    }
  }
  result.trace.final_objective = best;
  return result;
}

std::string format_trace_table(const OptimTrace& trace, std::size_t print_every) {
  const char* separator = "+-------------+--------------+--------------+\n";
  std::string out = separator;
  out += "|   Iteration |         Loss |    Tolerance |\n";
  out += "+=============+==============+==============+\n";
  char line[96];
  const std::size_t stride = std::max<std::size_t>(1, print_every);
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const TraceRecord& rec = trace.records[i];
    const bool edge = i == 0 || i + 1 == trace.records.size();
    if (!edge && rec.iteration % stride != 0) continue;
    std::snprintf(line, sizeof(line), "| %11zu | %12.6g | %12.6g |\n", rec.iteration,
                  rec.objective, rec.tol_measure);
    out += line;
    out += separator;
  }
  return out;
}

}  // namespace hawkes::optim
