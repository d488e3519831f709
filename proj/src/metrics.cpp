#include "hawkes/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace hawkes::metrics {

namespace {

void check_shapes(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrices must share the same shape");
  }
  if (a.size() == 0) {
    throw std::invalid_argument("matrices must be non-empty");
  }
}

}  // namespace

double hamming(const Matrix& truth, const Matrix& estimate) {
  check_shapes(truth, estimate);
  const auto disagreements =
      ((truth.array() != 0.0) != (estimate.array() != 0.0)).count();
  return static_cast<double>(disagreements) / static_cast<double>(truth.size());
}

double hamming_values(const Matrix& truth, const Matrix& estimate) {
  check_shapes(truth, estimate);
  const auto disagreements = (truth.array() != estimate.array()).count();
  return static_cast<double>(disagreements) / static_cast<double>(truth.size());
}

double rel_err(const Matrix& truth, const Matrix& estimate) {
  check_shapes(truth, estimate);
  double total = 0.0;
  for (Eigen::Index j = 0; j < truth.rows(); ++j) {
    for (Eigen::Index k = 0; k < truth.cols(); ++k) {
      const double t = truth(j, k);
      const double e = estimate(j, k);
      total += t != 0.0 ? std::abs(t - e) / std::abs(t) : std::abs(e);
    }
  }
  return total / static_cast<double>(truth.size());
}

double kendall_tau_b(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("sequences must share the same length");
  }
  const Eigen::Index n = x.size();
  long concordant = 0;
  long discordant = 0;
  long tied_only_x = 0;  // dx == 0, dy != 0
  long tied_only_y = 0;  // dx != 0, dy == 0
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++tied_only_x;
      } else if (dy == 0.0) {
        ++tied_only_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double pairs_x = static_cast<double>(concordant + discordant + tied_only_y);
  const double pairs_y = static_cast<double>(concordant + discordant + tied_only_x);
  if (pairs_x == 0.0 || pairs_y == 0.0) return 0.0;  // a constant sequence carries no ranking
  return static_cast<double>(concordant - discordant) / std::sqrt(pairs_x * pairs_y);
}

double rank_corr(const Matrix& truth, const Matrix& estimate) {
  check_shapes(truth, estimate);
  if (truth.cols() < 2) {
    throw std::invalid_argument("rank correlation needs at least two columns");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < truth.rows(); ++j) {
    total += kendall_tau_b(truth.row(j).transpose(), estimate.row(j).transpose());
  }
  return total / static_cast<double>(truth.rows());
}

MetricReport report(const Matrix& truth, const Matrix& estimate) {
  return MetricReport{hamming(truth, estimate), rel_err(truth, estimate),
                      rank_corr(truth, estimate)};
}

}  // namespace hawkes::metrics
