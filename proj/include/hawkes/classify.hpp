#pragma once

#include <cstdint>
#include <vector>

#include "hawkes/core.hpp"
#include "hawkes/model.hpp"
#include "hawkes/optim.hpp"

// Supervised K-class classification of Hawkes paths. A fitted model consists
// of empirical class weights p_hat and per-class parameters theta_hat; its
// score function is built from the class-posterior of the path,
//
//   pi_k proportional to p_hat_k * exp(path log-likelihood under theta_k),
//   f_k = 2 pi_k - 1 in [-1, 1],
//
// so that at the true parameters the argmax of f is the plug-in Bayes rule
// and f matches the {-1, +1} coding of the labels. Two fitting procedures are
// provided: plain empirical L2-risk minimization (fit_erm), and a two-stage
// variant (fit_ermlr) that first recovers each class's interaction support
// with an EBIC-tuned lasso and then refits the risk on that support only.

namespace hawkes::classify {

/// Class-conditional parameters sharing one decay, plus class weights.
struct ClassBank {
  std::vector<HawkesParams> classes;
  Vector weights;

  std::size_t n_classes() const { return classes.size(); }
  double beta() const { return classes.front().beta; }
};

/// Throws std::invalid_argument when shapes disagree, the weights leave the
/// simplex, the decays differ, or a class is invalid/super-critical.
void validate_bank(const ClassBank& bank);

struct LabeledDataset {
  Dataset data;
  std::vector<int> labels;

  LabeledDataset(Dataset data, std::vector<int> labels, std::size_t n_classes);
  std::size_t n_classes() const { return n_classes_; }

 private:
  std::size_t n_classes_;
};

struct ClassifierModel {
  Vector p_hat;
  std::vector<ThetaEstimate> theta_hat;
  /// Per-class interaction support; filled by fit_ermlr, empty for fit_erm.
  std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> supports;
  double beta = 1.0;
  optim::OptimTrace refit_trace;

  std::size_t n_classes() const { return theta_hat.size(); }
  Eigen::Index dim() const { return theta_hat.front().dim(); }
};

/// Draws labels i.i.d. from the bank weights and simulates each path from its
/// class parameters via the cluster sampler. Reproducible per sample index.
LabeledDataset make_classification(const ClassBank& bank, std::size_t n_samples, double end_time,
                                   std::uint64_t seed, unsigned n_threads = 1);

/// Posterior class probabilities pi of one path under the model.
Vector posterior(const ClassifierModel& model, const Path& path);

/// Score vector f = 2 pi - 1, one entry per class, each in [-1, 1].
Vector score_function(const ClassifierModel& model, const Path& path);

/// Empirical L2-risk (1/n) sum_i sum_k (Z_k^i - f_k(path_i))^2 with
/// Z_k = 2*1{Y=k} - 1. Lies in [0, 4K].
double empirical_l2_risk(const ClassifierModel& model, const LabeledDataset& data);

/// The same risk for arbitrary class weights/parameters, plus its gradient
/// with respect to every class's (mu, alpha). This is the objective the ERM
/// refit minimizes; exposed so the derivative can be verified and custom
/// optimizers plugged in. Requires mu > 0 and alpha >= 0 per class.
double l2_risk(const LabeledDataset& data, double beta, const Vector& p_hat,
               const std::vector<ThetaEstimate>& thetas);
std::vector<model::Gradient> l2_risk_gradient(const LabeledDataset& data, double beta,
                                              const Vector& p_hat,
                                              const std::vector<ThetaEstimate>& thetas);

struct ClassifierOptions {
  double gamma0 = 0.1;
  std::size_t max_iter = 500;
  double tol = 1e-6;
  double ebic_gamma = 1.0;    // support recovery stage of fit_ermlr
  std::size_t grid_size = 10; // kappa grid of the support recovery stage
  unsigned n_threads = 1;
};

/// Minimizes the empirical L2-risk over all class parameters under
/// non-negativity (mu >= 1e-8), warm-started from per-class unpenalized
/// least-squares fits. Throws std::invalid_argument when a class is absent
/// from the training labels.
ClassifierModel fit_erm(const LabeledDataset& train, double beta,
                        const ClassifierOptions& options = {});

/// Two-stage procedure: per-class EBIC-tuned lasso least-squares fits give
/// the interaction supports, then the L2-risk is refit over the supported
/// coordinates only (all mu stay free, off-support alpha stay exactly zero),
/// starting from the lasso estimates.
ClassifierModel fit_ermlr(const LabeledDataset& train, double beta,
                          const ClassifierOptions& options = {});

/// Argmax-of-score prediction, ties to the smallest class index.
std::vector<int> predict(const ClassifierModel& model, const std::vector<Path>& paths);

/// Rows are the posterior probabilities of each path; each row sums to 1.
Matrix predict_proba(const ClassifierModel& model, const std::vector<Path>& paths);

double accuracy(const ClassifierModel& model, const LabeledDataset& data);

/// Row-normalized K x K confusion matrix: row = true class, column =
/// predicted class. Rows of classes absent from the data are zero.
Matrix confusion(const ClassifierModel& model, const LabeledDataset& data);

}  // namespace hawkes::classify
