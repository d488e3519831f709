#include "hawkes/learner.hpp"

#include <iostream>
#include <stdexcept>

namespace hawkes::learner {

namespace {

calibrate::SolverSpec solver_spec(const FitConfig& config) {
  calibrate::SolverSpec spec;
  spec.beta = config.decay;
  spec.loss = config.loss;
  spec.penalty = config.penalty;
  spec.zeta = config.zeta;
  spec.optim = config.optim;
  spec.n_threads = config.n_threads;
  return spec;
}

}  // namespace

FitResult fit(const Dataset& dataset, const FitConfig& config) {
  if (!(config.decay > 0.0)) {
    throw std::invalid_argument("decay must be positive");
  }
  if (config.loss == model::LossKind::LogLikelihood &&
      config.optim.scheduler == optim::Scheduler::Lipschitz) {
    throw std::invalid_argument(
        "lipschitz scheduler requires an L-smooth loss; use backtracking with log-likelihood");
  }

  const calibrate::SolverSpec spec = solver_spec(config);
  const model::SufficientStats stats = model::precompute(dataset, config.decay, config.n_threads);

  double kappa = 0.0;
  if (config.penalty != optim::ProxKind::None) {
    if (config.kappa) {
      if (*config.kappa < 0.0) throw std::invalid_argument("kappa must be non-negative");
      kappa = *config.kappa;
    } else {
      const calibrate::KappaGrid grid =
          calibrate::default_grid(stats, config.grid_size, config.loss);
      const calibrate::SelectionResult chosen =
          config.kappa_choice.method == calibrate::CalibrationMethod::CV
              ? calibrate::select_cv(dataset, spec, grid, config.kappa_choice.folds,
                                     config.kappa_choice.seed)
              : calibrate::select_ebic(dataset, spec, grid,
                                       config.kappa_choice.method ==
                                               calibrate::CalibrationMethod::BIC
                                           ? 0.0
                                           : config.kappa_choice.gamma);
      kappa = chosen.kappa;
    }
  }

  calibrate::PenalizedFit solved = calibrate::penalized_fit(stats, spec, kappa);

  FitResult result;
  result.theta_hat = std::move(solved.theta);
  result.selected_kappa = kappa;
  result.trace = std::move(solved.trace);
  result.config = config;
  result.n_paths = dataset.n_paths();
  result.dim = dataset.dim();
  result.end_time = dataset.end_time();

  if (config.verbose) {
    std::cout << (result.converged()
                      ? "Optimization completed. Convergence achieved after " +
                            std::to_string(result.trace.n_iterations) + " iterations."
                      : "Optimization stopped at the iteration cap (" +
                            std::to_string(result.trace.n_iterations) + " iterations).")
              << "\n\n"
              << optim::format_trace_table(result.trace, config.optim.print_every);
  }
  return result;
}

double score(const FitResult& fit, const Dataset& dataset) {
  if (dataset.dim() != fit.dim) {
    throw std::invalid_argument("dataset dimension does not match the fitted model");
  }
  const model::SufficientStats stats =
      model::precompute(dataset, fit.config.decay, fit.config.n_threads);
  return fit.config.loss == model::LossKind::LeastSquares
             ? model::ls_loss(stats, fit.theta_hat)
             : model::loglik_loss(stats, fit.theta_hat);
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> estimated_support(const FitResult& fit,
                                                                     double threshold) {
  return fit.theta_hat.alpha_hat.array() > threshold;
}

}  // namespace hawkes::learner
