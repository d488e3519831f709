#pragma once

#include <optional>

#include "hawkes/calibrate.hpp"
#include "hawkes/core.hpp"
#include "hawkes/model.hpp"
#include "hawkes/optim.hpp"

// Unified inference facade: one fit() call precomputes the sufficient
// statistics, calibrates the penalty constant when asked to, and solves the
// penalized problem from a deterministic start (mu at half the empirical
// rate, alpha zero). Fits are fully deterministic: refitting the same data
// with the same config reproduces the result bit for bit.

namespace hawkes::learner {

struct FitConfig {
  double decay = 1.0;
  model::LossKind loss = model::LossKind::LeastSquares;
  optim::ProxKind penalty = optim::ProxKind::None;
  double zeta = 0.5;
  /// Explicit penalty constant; when absent and a penalty is set, the
  /// constant is calibrated per kappa_choice over a default grid.
  std::optional<double> kappa;
  calibrate::CalibrationChoice kappa_choice;
  std::size_t grid_size = 10;
  optim::OptimConfig optim;
  unsigned n_threads = 1;
  bool verbose = false;
};

struct FitResult {
  ThetaEstimate theta_hat;
  double selected_kappa = 0.0;
  optim::OptimTrace trace;
  FitConfig config;
  std::size_t n_paths = 0;
  Eigen::Index dim = 0;
  double end_time = 0.0;

  bool converged() const { return trace.status == optim::Termination::Converged; }
};

/// Fits the model. Throws std::invalid_argument for inconsistent
/// configurations (e.g. the Lipschitz step rule with the log-likelihood
/// loss, which is not L-smooth).
FitResult fit(const Dataset& dataset, const FitConfig& config);

/// Unpenalized loss of the fitted parameters on the given data, under the
/// fit's loss kind and normalization (per path, per unit time). Lower is
/// better.
double score(const FitResult& fit, const Dataset& dataset);

/// Boolean interaction support: entry (j, k) is true iff alpha_hat(j, k)
/// exceeds the threshold. The default threshold 0 reads the exact zeros
/// produced by the proximal step.
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> estimated_support(const FitResult& fit,
                                                                     double threshold = 0.0);

}  // namespace hawkes::learner
