#include "hawkes/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hawkes/parallel.hpp"

namespace hawkes::calibrate {

namespace {

optim::Objective make_objective(const model::SufficientStats& stats, model::LossKind loss) {
  const Eigen::Index d = stats.dim();
  if (loss == model::LossKind::LeastSquares) {
    return {
        [&stats, d](const Vector& v) { return model::ls_loss(stats, model::unpack(v, d)); },
        [&stats, d](const Vector& v) {
          return model::pack(model::ls_grad(stats, model::unpack(v, d)));
        }};
  }
  return {
      [&stats, d](const Vector& v) { return model::loglik_loss(stats, model::unpack(v, d)); },
      [&stats, d](const Vector& v) {
        return model::pack(model::loglik_grad(stats, model::unpack(v, d)));
      }};
}

// Start from the interaction-free optimum (mu at the empirical rate, alpha
// zero). At a penalty at or above the zero-support threshold this point is
// already the solution, so the sparsest fits come out with exact zeros
// instead of creeping toward them.
Vector default_init(const model::SufficientStats& stats) {
  const Eigen::Index d = stats.dim();
  const double total_time = static_cast<double>(stats.n_paths()) * stats.end_time();
  Vector packed = Vector::Zero(d * (d + 1));
  packed.head(d) = stats.counts_sum() / total_time;
  return packed;
}

optim::BoxProjection nonneg_projection(Eigen::Index d, double mu_floor) {
  optim::BoxProjection projection;
  projection.lower = Vector::Zero(d * (d + 1));
  projection.lower.head(d).setConstant(mu_floor);
  return projection;
}

double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Larger kappa wins ties; the grid is strictly decreasing, so the first
// minimal index scanning in grid order is the right pick.
std::size_t argmin_first(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

}  // namespace

KappaGrid KappaGrid::from_values(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("kappa grid must not be empty");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) {
      throw std::invalid_argument("kappa grid values must be positive");
    }
    if (i > 0 && !(values[i] < values[i - 1])) {
      throw std::invalid_argument("kappa grid must be strictly decreasing");
    }
  }
  return KappaGrid{std::move(values)};
}

PenalizedFit penalized_fit(const model::SufficientStats& stats, const SolverSpec& spec,
                           double kappa, const Vector* init) {
  if (spec.loss == model::LossKind::LogLikelihood &&
      spec.optim.scheduler == optim::Scheduler::Lipschitz) {
    throw std::invalid_argument(
        "lipschitz scheduler requires an L-smooth loss; use backtracking with log-likelihood");
  }
  const Eigen::Index d = stats.dim();
  optim::OptimConfig config = spec.optim;
  if (config.scheduler == optim::Scheduler::Lipschitz) {
    config.lipschitz_constant = model::ls_hessian(stats).max_eigenvalue();
  }
  const optim::Objective objective = make_objective(stats, spec.loss);
  // The penalty acts on the interaction block only; the baselines stay
  // unpenalized (they are constrained, not selected).
  const optim::ProxSpec prox_spec{spec.penalty, kappa, spec.zeta, d};
  const Vector start = init ? *init : default_init(stats);
  optim::MinimizeResult solved =
      optim::minimize(objective, prox_spec, config, start, nonneg_projection(d, spec.mu_floor()));
  return PenalizedFit{model::unpack(solved.minimizer, d), std::move(solved.trace)};
}

KappaGrid default_grid(const model::SufficientStats& stats, std::size_t size,
                       model::LossKind loss) {
  if (size < 2) {
    throw std::invalid_argument("grid size must be at least 2");
  }
  if (stats.counts_sum().sum() == 0.0) {
    throw std::invalid_argument("cannot build a kappa grid from an event-free dataset");
  }
  const Eigen::Index d = stats.dim();
  const double total_time = static_cast<double>(stats.n_paths()) * stats.end_time();

  // With the baselines unpenalized, (mu*, 0) with mu* the per-dimension rate
  // optimum is the solution at large kappa for either loss, so the sup-norm
  // of the interaction gradient there is the smallest kappa that zeroes the
  // whole lasso interaction block. At that exact value the stationarity
  // margin is zero and iterates only approach zero asymptotically; the 1%
  // inflation makes the margin strict so the all-zero interaction candidate
  // is realized with exact zeros at the top of the grid.
  ThetaEstimate origin;
  origin.mu_hat = stats.counts_sum() / total_time;
  origin.alpha_hat = Matrix::Zero(d, d);
  const model::Gradient grad = loss == model::LossKind::LeastSquares
                                   ? model::ls_grad(stats, origin)
                                   : model::loglik_grad(stats, origin);
  const double kappa_max = 1.01 * grad.alpha.cwiseAbs().maxCoeff();
  if (!(kappa_max > 0.0)) {
    throw std::invalid_argument("penalty gradient is flat; no meaningful kappa grid exists");
  }

  std::vector<double> values(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double exponent = -4.0 * static_cast<double>(i) / static_cast<double>(size - 1);
    values[i] = kappa_max * std::pow(10.0, exponent);
  }
  return KappaGrid::from_values(std::move(values));
}

SelectionResult select_cv(const Dataset& dataset, const SolverSpec& spec, const KappaGrid& grid,
                          int folds, std::uint64_t seed) {
  const std::size_t n = dataset.n_paths();
  if (folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(folds) > n) {
    throw std::invalid_argument("more folds than paths");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> mean_valid_loss(grid.size(), 0.0);
  for (int fold = 0; fold < folds; ++fold) {
    std::vector<Path> train_paths;
    std::vector<Path> valid_paths;
    for (std::size_t pos = 0; pos < n; ++pos) {
      if (static_cast<int>(pos % static_cast<std::size_t>(folds)) == fold) {
        valid_paths.push_back(dataset.path(order[pos]));
      } else {
        train_paths.push_back(dataset.path(order[pos]));
      }
    }
    const Dataset train(std::move(train_paths), dataset.end_time());
    const Dataset valid(std::move(valid_paths), dataset.end_time());
    const model::SufficientStats train_stats = model::precompute(train, spec.beta);
    const model::SufficientStats valid_stats = model::precompute(valid, spec.beta);

    std::vector<double> fold_loss(grid.size());
    parallel_for(grid.size(), spec.n_threads, [&](std::size_t g) {
      const PenalizedFit fitted = penalized_fit(train_stats, spec, grid.values[g]);
      fold_loss[g] = spec.loss == model::LossKind::LeastSquares
                         ? model::ls_loss(valid_stats, fitted.theta)
                         : model::loglik_loss(valid_stats, fitted.theta);
    });
    for (std::size_t g = 0; g < grid.size(); ++g) {
      mean_valid_loss[g] += fold_loss[g] / static_cast<double>(folds);
    }
  }

  SelectionResult result;
  result.criterion = std::move(mean_valid_loss);
  result.index = argmin_first(result.criterion);
  result.kappa = grid.values[result.index];
  return result;
}

SelectionResult select_ebic(const Dataset& dataset, const SolverSpec& spec, const KappaGrid& grid,
                            double gamma) {
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("ebic gamma must lie in [0, 1]");
  }
  const model::SufficientStats stats = model::precompute(dataset, spec.beta, spec.n_threads);
  const double d_sq = static_cast<double>(stats.dim()) * static_cast<double>(stats.dim());
  const double log_n = std::log(static_cast<double>(dataset.n_paths()));

  std::vector<double> criterion(grid.size());
  parallel_for(grid.size(), spec.n_threads, [&](std::size_t g) {
    const PenalizedFit fitted = penalized_fit(stats, spec, grid.values[g]);
    // Exact zeros come straight out of the proximal step; no thresholding.
    const auto nonzero_mu = (fitted.theta.mu_hat.array() != 0.0).count();
    const auto nonzero_alpha = (fitted.theta.alpha_hat.array() != 0.0).count();
    double value;
    try {
      // Sum over paths of the per-path loss (which carries the 1/T
      // normalization); only the average over paths is undone here.
      const double nll = model::loglik_total(stats, fitted.theta) / stats.end_time();
      value = 2.0 * nll + static_cast<double>(nonzero_mu + nonzero_alpha) * log_n +
              2.0 * gamma * log_binomial(d_sq, static_cast<double>(nonzero_alpha));
    } catch (const std::domain_error&) {
      value = std::numeric_limits<double>::infinity();
    }
    criterion[g] = value;
  });

  SelectionResult result;
  result.criterion = std::move(criterion);
  result.index = argmin_first(result.criterion);
  result.kappa = grid.values[result.index];
  return result;
}

}  // namespace hawkes::calibrate
