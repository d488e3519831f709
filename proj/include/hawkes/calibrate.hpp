#pragma once

#include <cstdint>
#include <vector>

#include "hawkes/core.hpp"
#include "hawkes/model.hpp"
#include "hawkes/optim.hpp"

// Penalty-constant selection over a decreasing grid of kappa values, by
// K-fold cross-validation on whole paths or by the (extended) Bayesian
// information criterion. Also hosts the single penalized fit these searches
// repeat, so the facade and the searches solve the exact same problem.

namespace hawkes::calibrate {

/// Strictly decreasing positive penalty constants.
struct KappaGrid {
  std::vector<double> values;

  static KappaGrid from_values(std::vector<double> values);
  std::size_t size() const { return values.size(); }
};

enum class CalibrationMethod { CV, BIC, EBIC };

struct CalibrationChoice {
  CalibrationMethod method = CalibrationMethod::EBIC;
  int folds = 5;            // CV only, >= 2
  double gamma = 1.0;       // EBIC only, in [0, 1]; BIC behaves as gamma = 0
  std::uint64_t seed = 0;   // CV fold shuffle
};

/// Everything one penalized fit needs except the penalty constant.
struct SolverSpec {
  double beta = 1.0;
  model::LossKind loss = model::LossKind::LeastSquares;
  optim::ProxKind penalty = optim::ProxKind::Lasso;
  double zeta = 0.5;
  optim::OptimConfig optim;
  unsigned n_threads = 1;

  /// The likelihood diverges at mu = 0, so its feasible set keeps mu away
  /// from the boundary; the quadratic loss only needs non-negativity.
  double mu_floor() const {
    return loss == model::LossKind::LogLikelihood ? 1e-8 : 0.0;
  }
};

struct PenalizedFit {
  ThetaEstimate theta;
  optim::OptimTrace trace;
};

/// Solves min F(theta) + kappa * Omega(theta) over the non-negative box from
/// the given start (default: mu at half the empirical rate, alpha zero).
/// Throws std::invalid_argument when the Lipschitz scheduler is requested for
/// the log-likelihood loss, which is not L-smooth.
PenalizedFit penalized_fit(const model::SufficientStats& stats, const SolverSpec& spec,
                           double kappa, const Vector* init = nullptr);

/// Log-spaced grid of `size` values from kappa_max down to 1e-4 * kappa_max,
/// where kappa_max is the sup-norm over alpha coordinates of the loss
/// gradient at (mu = per-dimension optimum, alpha = 0) — the smallest
/// constant for which the lasso alpha-solution collapses to zero, up to the
/// mu coupling. Throws std::invalid_argument for an event-free dataset.
KappaGrid default_grid(const model::SufficientStats& stats, std::size_t size,
                       model::LossKind loss);

struct SelectionResult {
  double kappa = 0.0;
  std::size_t index = 0;
  /// Per-grid-value criterion, in grid order: mean held-out loss for CV,
  /// criterion value for (E)BIC.
  std::vector<double> criterion;
};

/// K-fold cross-validation: paths are shuffled once with the given seed and
/// dealt into `folds` groups; each kappa is refit on every training split and
/// scored by the unpenalized loss on the held-out paths. Ties prefer the
/// larger kappa. Throws std::invalid_argument when folds < 2 or folds exceeds
/// the number of paths.
SelectionResult select_cv(const Dataset& dataset, const SolverSpec& spec, const KappaGrid& grid,
                          int folds, std::uint64_t seed);

/// EBIC_gamma(kappa) = 2 * NLL(theta_hat) + |S| log n + 2 gamma log C(d^2, |S_alpha|),
/// with NLL the unaveraged negative log-likelihood, |S| the number of nonzero
/// coefficients of theta_hat and |S_alpha| the nonzero interaction count.
/// gamma = 0 recovers BIC. Ties prefer the larger kappa. A fit whose
/// likelihood is undefined scores +infinity.
SelectionResult select_ebic(const Dataset& dataset, const SolverSpec& spec, const KappaGrid& grid,
                            double gamma);

}  // namespace hawkes::calibrate
