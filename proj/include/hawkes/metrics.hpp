#pragma once

#include "hawkes/core.hpp"

// Support-recovery and ranking metrics comparing an estimated interaction
// matrix against a ground truth. All functions are pure and throw
// std::invalid_argument on shape mismatch.

namespace hawkes::metrics {

struct MetricReport {
  double hamming = 0.0;
  double rel_err = 0.0;
  double rank_corr = 0.0;
};

/// Proportion of entries whose zero/nonzero pattern disagrees, in [0, 1].
double hamming(const Matrix& truth, const Matrix& estimate);

/// Proportion of entries whose values differ exactly (the literal
/// disagreement count, not the support comparison).
double hamming_values(const Matrix& truth, const Matrix& estimate);

/// Mean over entries of |truth - estimate| / |truth| where truth is nonzero,
/// and of |estimate| where truth is zero.
double rel_err(const Matrix& truth, const Matrix& estimate);

/// Tie-corrected Kendall rank correlation (tau_b) between two sequences;
/// zero when either sequence has no variation.
double kendall_tau_b(const Vector& x, const Vector& y);

/// Mean of kendall_tau_b over matching rows, in [-1, 1]. Requires at least
/// two columns.
double rank_corr(const Matrix& truth, const Matrix& estimate);

MetricReport report(const Matrix& truth, const Matrix& estimate);

}  // namespace hawkes::metrics
