#pragma once

#include <vector>

#include "hawkes/core.hpp"

// Exact evaluation of the two inference losses for exponential Hawkes models
// observed as repeated paths: the negative log-likelihood and the
// least-squares contrast. Everything that depends only on the event times is
// computed once by precompute(); afterwards the least-squares loss, gradient
// and Hessian cost O(d^3) regardless of the number of events, and the
// log-likelihood costs O(m d).
//
// Reported values are averaged over paths and divided by the horizon T, so a
// homogeneous Poisson fit with rate mu on an empty window scores mu (log-lik)
// or mu^2 (least squares).

namespace hawkes::model {

enum class LossKind { LogLikelihood, LeastSquares };

/// Event-independent statistics of one path.
///
/// With events t_{k,h} of source dimension k on [0, T) and decay beta:
///   excitation[j](l, k) = sum_{h: t_{k,h} < t_{j,l}} beta e^{-beta (t_{j,l} - t_{k,h})}
///   int_kernel[k]       = sum_h (1 - e^{-beta (T - t_{k,h})})
///   int_kernel_sq[k]    = sum_h (beta/2) (1 - e^{-2 beta (T - t_{k,h})})
///   gram_cross(k, k')   = sum_h (1 - e^{-2 beta (T - t_{k,h})}) excitation_{k'}(t_{k,h})
///   excite_events(j, k) = sum_l excitation[j](l, k)
/// The excitation values are filled by the exponential-decay recursion in one
/// sweep over the merged event sequence; events sharing a timestamp across
/// dimensions do not see each other (strict past).
struct PathStats {
  Vector counts;
  Vector int_kernel;
  Vector int_kernel_sq;
  Matrix gram_cross;
  Matrix excite_events;
  std::vector<Matrix> excitation;
};

/// Precomputed statistics of a dataset: the per-path pieces plus their sums,
/// which are all the quadratic loss ever touches. Immutable once built.
class SufficientStats {
 public:
  SufficientStats(std::vector<PathStats> per_path, double end_time, double beta);

  Eigen::Index dim() const { return counts_sum_.size(); }
  std::size_t n_paths() const { return per_path_.size(); }
  double end_time() const { return end_time_; }
  double beta() const { return beta_; }

  const PathStats& path(std::size_t i) const { return per_path_[i]; }
  const Vector& counts_sum() const { return counts_sum_; }
  const Vector& int_kernel_sum() const { return int_kernel_sum_; }
  const Vector& int_kernel_sq_sum() const { return int_kernel_sq_sum_; }
  const Matrix& gram_cross_sum() const { return gram_cross_sum_; }
  const Matrix& excite_events_sum() const { return excite_events_sum_; }

 private:
  std::vector<PathStats> per_path_;
  double end_time_;
  double beta_;
  Vector counts_sum_;
  Vector int_kernel_sum_;
  Vector int_kernel_sq_sum_;
  Matrix gram_cross_sum_;
  Matrix excite_events_sum_;
};

/// Statistics of a single path (used on its own when scoring new paths).
PathStats precompute_path(const Path& path, double beta);

/// Builds the sufficient statistics of a dataset in O(m d), optionally
/// parallel over paths. Throws std::invalid_argument for beta <= 0.
SufficientStats precompute(const Dataset& dataset, double beta, unsigned n_threads = 1);

/// Negative log-likelihood of one path, unnormalized (not divided by T).
/// Throws std::domain_error naming the dimension/event (and the path when
/// path_index >= 0) if the intensity at an event is not positive.
double path_negloglik(const PathStats& stats, double end_time, const Vector& mu,
                      const Matrix& alpha, long path_index = -1);

/// Gradient counterpart of path_negloglik; accumulates into mu_grad/alpha_grad.
void path_negloglik_grad_accumulate(const PathStats& stats, double end_time, const Vector& mu,
                                    const Matrix& alpha, double weight, Vector& mu_grad,
                                    Matrix& alpha_grad, long path_index = -1);

struct Gradient {
  Vector mu;
  Matrix alpha;
};

/// Averaged negative log-likelihood: (1/(n T)) sum over paths and dimensions.
double loglik_loss(const SufficientStats& stats, const ThetaEstimate& theta);

/// Unaveraged negative log-likelihood (the sum over paths), as consumed by
/// information criteria.
double loglik_total(const SufficientStats& stats, const ThetaEstimate& theta);

Gradient loglik_grad(const SufficientStats& stats, const ThetaEstimate& theta);

/// Averaged least-squares contrast. Defined on all of R^{d x (d+1)}; the
/// evaluation touches only aggregated statistics, never individual events.
double ls_loss(const SufficientStats& stats, const ThetaEstimate& theta);

Gradient ls_grad(const SufficientStats& stats, const ThetaEstimate& theta);

/// The constant Hessian of ls_loss. It is block diagonal over rows of
/// (mu_j, alpha_j.), with one identical symmetric PSD block shared by all
/// rows; both the gradient and this operator are derived from the assembled
/// quadratic form (the cross-source Gram term enters symmetrized).
class LsHessian {
 public:
  explicit LsHessian(Matrix row_block);

  const Matrix& row_block() const { return row_block_; }
  Eigen::Index dim() const { return row_block_.cols() - 1; }

  /// Hessian-vector product in packed coordinates.
  Vector apply(const Vector& packed_theta) const;

  /// Largest eigenvalue; the Lipschitz constant of the ls gradient.
  double max_eigenvalue() const;

 private:
  Matrix row_block_;
};

LsHessian ls_hessian(const SufficientStats& stats);

/// Packed coordinate layout used by the optimizers:
/// [mu_0 .. mu_{d-1}, alpha(0,0) .. alpha(0,d-1), alpha(1,0), ...].
Vector pack(const ThetaEstimate& theta);
Vector pack(const Gradient& grad);
ThetaEstimate unpack(const Vector& packed, Eigen::Index d);

}  // namespace hawkes::model
