#include "hawkes/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hawkes/parallel.hpp"

namespace hawkes::model {

namespace {

constexpr double kLogFloor = 1e-300;

void check_shapes(const SufficientStats& stats, const ThetaEstimate& theta) {
  const Eigen::Index d = stats.dim();
  if (theta.mu_hat.size() != d || theta.alpha_hat.rows() != d || theta.alpha_hat.cols() != d) {
    throw std::invalid_argument("theta shape does not match the dataset dimension");
  }
}

[[noreturn]] void throw_nonpositive_intensity(long path_index, Eigen::Index dim,
                                              Eigen::Index event) {
  std::string where = "dimension " + std::to_string(dim) + ", event " + std::to_string(event);
  if (path_index >= 0) where = "path " + std::to_string(path_index) + ", " + where;
  throw std::domain_error("non-positive intensity at an event (" + where + ")");
}

}  // namespace

PathStats precompute_path(const Path& path, double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("beta must be positive");
  }
  const Eigen::Index d = path.dim();
  const double end_time = path.end_time();

  PathStats s;
  s.counts = Vector::Zero(d);
  s.int_kernel = Vector::Zero(d);
  s.int_kernel_sq = Vector::Zero(d);
  s.gram_cross = Matrix::Zero(d, d);
  s.excite_events = Matrix::Zero(d, d);
  s.excitation.resize(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    s.excitation[static_cast<std::size_t>(j)] =
        Matrix::Zero(static_cast<Eigen::Index>(path.events(j).size()), d);
  }

  struct Item {
    double t;
    Eigen::Index dim;
    Eigen::Index index;
  };
  std::vector<Item> merged;
  merged.reserve(path.total_events());
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& ts = path.events(j);
    for (std::size_t l = 0; l < ts.size(); ++l) {
      merged.push_back({ts[l], j, static_cast<Eigen::Index>(l)});
    }
  }
  std::sort(merged.begin(), merged.end(), [](const Item& a, const Item& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.dim < b.dim;
  });

  // One sweep: g[k] carries the excitation of source k just after the
  // previous timestamp. Events sharing a timestamp are processed as a group
  // so that none of them sees the others (strict past convention).
  Vector g = Vector::Zero(d);
  double t_prev = 0.0;
  std::size_t i = 0;
  while (i < merged.size()) {
    const double t = merged[i].t;
    if (t > t_prev) {
      g *= std::exp(-beta * (t - t_prev));
      t_prev = t;
    }
    std::size_t group_end = i;
    while (group_end < merged.size() && merged[group_end].t == t) ++group_end;

    const double tail = std::exp(-beta * (end_time - t));
    const double w = 1.0 - tail * tail;  // 1 - e^{-2 beta (T - t)}
    for (std::size_t e = i; e < group_end; ++e) {
      const Item& item = merged[e];
      s.excitation[static_cast<std::size_t>(item.dim)].row(item.index) = g.transpose();
      s.excite_events.row(item.dim) += g.transpose();
      s.gram_cross.row(item.dim) += w * g.transpose();
      s.counts[item.dim] += 1.0;
      s.int_kernel[item.dim] += 1.0 - tail;
      s.int_kernel_sq[item.dim] += 0.5 * beta * w;
    }
    for (std::size_t e = i; e < group_end; ++e) {
      g[merged[e].dim] += beta;
    }
    i = group_end;
  }
  return s;
}

SufficientStats::SufficientStats(std::vector<PathStats> per_path, double end_time, double beta)
    : per_path_(std::move(per_path)), end_time_(end_time), beta_(beta) {
  if (per_path_.empty()) {
    throw std::invalid_argument("sufficient statistics need at least one path");
  }
  const Eigen::Index d = per_path_.front().counts.size();
  counts_sum_ = Vector::Zero(d);
  int_kernel_sum_ = Vector::Zero(d);
  int_kernel_sq_sum_ = Vector::Zero(d);
  gram_cross_sum_ = Matrix::Zero(d, d);
  excite_events_sum_ = Matrix::Zero(d, d);
  for (const PathStats& s : per_path_) {
    counts_sum_ += s.counts;
    int_kernel_sum_ += s.int_kernel;
    int_kernel_sq_sum_ += s.int_kernel_sq;
    gram_cross_sum_ += s.gram_cross;
    excite_events_sum_ += s.excite_events;
  }
}

SufficientStats precompute(const Dataset& dataset, double beta, unsigned n_threads) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("beta must be positive");
  }
  std::vector<PathStats> per_path(dataset.n_paths());
  parallel_for(dataset.n_paths(), n_threads,
               [&](std::size_t i) { per_path[i] = precompute_path(dataset.path(i), beta); });
  return SufficientStats(std::move(per_path), dataset.end_time(), beta);
}

double path_negloglik(const PathStats& stats, double end_time, const Vector& mu,
                      const Matrix& alpha, long path_index) {
  const Eigen::Index d = mu.size();
  double value = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    value += mu[j] * end_time + alpha.row(j).dot(stats.int_kernel);
    const Matrix& psi = stats.excitation[static_cast<std::size_t>(j)];
    for (Eigen::Index l = 0; l < psi.rows(); ++l) {
      const double lam = mu[j] + alpha.row(j).dot(psi.row(l));
      if (!(lam > 0.0)) throw_nonpositive_intensity(path_index, j, l);
      value -= std::log(std::max(lam, kLogFloor));
    }
  }
  return value;
}

void path_negloglik_grad_accumulate(const PathStats& stats, double end_time, const Vector& mu,
                                    const Matrix& alpha, double weight, Vector& mu_grad,
                                    Matrix& alpha_grad, long path_index) {
  const Eigen::Index d = mu.size();
  for (Eigen::Index j = 0; j < d; ++j) {
    mu_grad[j] += weight * end_time;
    alpha_grad.row(j) += weight * stats.int_kernel.transpose();
    const Matrix& psi = stats.excitation[static_cast<std::size_t>(j)];
    for (Eigen::Index l = 0; l < psi.rows(); ++l) {
      const double lam = mu[j] + alpha.row(j).dot(psi.row(l));
      if (!(lam > 0.0)) throw_nonpositive_intensity(path_index, j, l);
      const double inv = weight / std::max(lam, kLogFloor);
      mu_grad[j] -= inv;
      alpha_grad.row(j) -= inv * psi.row(l);
    }
  }
}

double loglik_total(const SufficientStats& stats, const ThetaEstimate& theta) {
  check_shapes(stats, theta);
  double total = 0.0;
  for (std::size_t i = 0; i < stats.n_paths(); ++i) {
    total += path_negloglik(stats.path(i), stats.end_time(), theta.mu_hat, theta.alpha_hat,
                            static_cast<long>(i));
  }
  return total;
}

double loglik_loss(const SufficientStats& stats, const ThetaEstimate& theta) {
  return loglik_total(stats, theta) /
         (static_cast<double>(stats.n_paths()) * stats.end_time());
}

Gradient loglik_grad(const SufficientStats& stats, const ThetaEstimate& theta) {
  check_shapes(stats, theta);
  const Eigen::Index d = stats.dim();
  Gradient g{Vector::Zero(d), Matrix::Zero(d, d)};
  const double scale = 1.0 / (static_cast<double>(stats.n_paths()) * stats.end_time());
  for (std::size_t i = 0; i < stats.n_paths(); ++i) {
    path_negloglik_grad_accumulate(stats.path(i), stats.end_time(), theta.mu_hat,
                                   theta.alpha_hat, scale, g.mu, g.alpha,
                                   static_cast<long>(i));
  }
  return g;
}

double ls_loss(const SufficientStats& stats, const ThetaEstimate& theta) {
  check_shapes(stats, theta);
  const Eigen::Index d = stats.dim();
  const double total_time = static_cast<double>(stats.n_paths()) * stats.end_time();
  double value = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto a = theta.alpha_hat.row(j);
    const double mu_j = theta.mu_hat[j];
    value += mu_j * mu_j * total_time;
    value += 2.0 * mu_j * a.dot(stats.int_kernel_sum());
    value += a.cwiseProduct(a).dot(stats.int_kernel_sq_sum());
    value += a * stats.gram_cross_sum() * a.transpose();
    value -= 2.0 * mu_j * stats.counts_sum()[j];
    value -= 2.0 * a.dot(stats.excite_events_sum().row(j));
  }
  return value / total_time;
}

Gradient ls_grad(const SufficientStats& stats, const ThetaEstimate& theta) {
  check_shapes(stats, theta);
  const Eigen::Index d = stats.dim();
  const double total_time = static_cast<double>(stats.n_paths()) * stats.end_time();
  Gradient g{Vector::Zero(d), Matrix::Zero(d, d)};
  const Matrix gram_sym = stats.gram_cross_sum() + stats.gram_cross_sum().transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto a = theta.alpha_hat.row(j);
    const double mu_j = theta.mu_hat[j];
    g.mu[j] = 2.0 * mu_j * total_time + 2.0 * a.dot(stats.int_kernel_sum()) -
              2.0 * stats.counts_sum()[j];
    g.alpha.row(j) = 2.0 * mu_j * stats.int_kernel_sum().transpose() +
                     2.0 * a.cwiseProduct(stats.int_kernel_sq_sum().transpose()) +
                     a * gram_sym.transpose() -
                     2.0 * stats.excite_events_sum().row(j);
  }
  g.mu /= total_time;
  g.alpha /= total_time;
  return g;
}

LsHessian::LsHessian(Matrix row_block) : row_block_(std::move(row_block)) {}

Vector LsHessian::apply(const Vector& packed_theta) const {
  const Eigen::Index d = dim();
  if (packed_theta.size() != d * (d + 1)) {
    throw std::invalid_argument("packed theta has the wrong size");
  }
  Vector out(packed_theta.size());
  Vector block_in(d + 1);
  for (Eigen::Index j = 0; j < d; ++j) {
    block_in[0] = packed_theta[j];
    block_in.tail(d) = packed_theta.segment(d + j * d, d);
    const Vector block_out = row_block_ * block_in;
    out[j] = block_out[0];
    out.segment(d + j * d, d) = block_out.tail(d);
  }
  return out;
}

double LsHessian::max_eigenvalue() const {
  // Symmetric non-negative block: its spectral radius is the top eigenvalue.
  return spectral_radius(row_block_);
}

LsHessian ls_hessian(const SufficientStats& stats) {
  const Eigen::Index d = stats.dim();
  const double total_time = static_cast<double>(stats.n_paths()) * stats.end_time();
  Matrix block = Matrix::Zero(d + 1, d + 1);
  block(0, 0) = 2.0 * total_time;
  block.block(0, 1, 1, d) = 2.0 * stats.int_kernel_sum().transpose();
  block.block(1, 0, d, 1) = 2.0 * stats.int_kernel_sum();
  block.block(1, 1, d, d) = stats.gram_cross_sum() + stats.gram_cross_sum().transpose() +
                            Matrix(2.0 * stats.int_kernel_sq_sum().asDiagonal());
  block /= total_time;
  return LsHessian(std::move(block));
}

Vector pack(const ThetaEstimate& theta) {
  const Eigen::Index d = theta.mu_hat.size();
  Vector packed(d * (d + 1));
  packed.head(d) = theta.mu_hat;
  for (Eigen::Index j = 0; j < d; ++j) {
    packed.segment(d + j * d, d) = theta.alpha_hat.row(j).transpose();
  }
  return packed;
}

Vector pack(const Gradient& grad) {
  return pack(ThetaEstimate{grad.mu, grad.alpha});
}

ThetaEstimate unpack(const Vector& packed, Eigen::Index d) {
  if (packed.size() != d * (d + 1)) {
    throw std::invalid_argument("packed theta has the wrong size");
  }
  ThetaEstimate theta;
  theta.mu_hat = packed.head(d);
  theta.alpha_hat.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    theta.alpha_hat.row(j) = packed.segment(d + j * d, d).transpose();
  }
  return theta;
}

}  // namespace hawkes::model
