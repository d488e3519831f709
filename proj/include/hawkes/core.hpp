#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

// Core domain types for linear multivariate Hawkes processes with a single
// exponential kernel. All types are immutable after construction and every
// operation here is pure, so concurrent use from multiple threads is safe.

namespace hawkes {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Parameters (mu, alpha, beta) of a d-dimensional exponential Hawkes model.
/// alpha(j, k) is the expected number of events of component j triggered by
/// one event of component k; beta is the common decay rate.
struct HawkesParams {
  Vector mu;
  Matrix alpha;
  double beta = 1.0;

  Eigen::Index dim() const { return mu.size(); }
};

/// Estimated parameter pair (mu_hat, alpha_hat); the decay is not estimated.
struct ThetaEstimate {
  Vector mu_hat;
  Matrix alpha_hat;

  Eigen::Index dim() const { return mu_hat.size(); }
};

/// One realization of a d-dimensional point process on [0, end_time).
/// Per-dimension event times are strictly increasing; construction validates.
class Path {
 public:
  Path(std::vector<std::vector<double>> events, double end_time);

  Eigen::Index dim() const { return static_cast<Eigen::Index>(events_.size()); }
  double end_time() const { return end_time_; }
  const std::vector<double>& events(Eigen::Index j) const { return events_[static_cast<std::size_t>(j)]; }
  const std::vector<std::vector<double>>& events() const { return events_; }

  std::size_t total_events() const;
  bool operator==(const Path& other) const = default;

 private:
  std::vector<std::vector<double>> events_;
  double end_time_;
};

/// n independent paths observed on a common window [0, end_time).
class Dataset {
 public:
  Dataset(std::vector<Path> paths, double end_time);

  Eigen::Index dim() const { return paths_.front().dim(); }
  double end_time() const { return end_time_; }
  std::size_t n_paths() const { return paths_.size(); }
  const Path& path(std::size_t i) const { return paths_[i]; }
  const std::vector<Path>& paths() const { return paths_; }

  std::size_t total_events() const;
  bool operator==(const Dataset& other) const = default;

 private:
  std::vector<Path> paths_;
  double end_time_;
};

/// Outcome of parameter validation. Positivity violations are errors;
/// super-criticality is a warning (evaluation tolerates it, simulation
/// refuses it).
struct ValidationReport {
  bool shapes_ok = false;
  bool positivity_ok = false;
  bool sub_critical = false;
  double spectral_radius = 0.0;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return shapes_ok && positivity_ok; }
  bool simulation_ready() const { return ok() && sub_critical; }
};

/// Conditional intensity lambda_j(t) given the strict past of the path:
/// events at exactly time t are excluded (left-limit convention).
/// Throws std::out_of_range for a bad dimension index and
/// std::invalid_argument for t outside [0, end_time].
double intensity(const HawkesParams& params, const Path& path, Eigen::Index j, double t);

/// Integrated intensity int_0^t lambda_j(s) ds, in closed form.
double compensator(const HawkesParams& params, const Path& path, Eigen::Index j, double t);

/// Largest eigenvalue modulus of a non-negative square matrix (its Perron
/// root), by shifted power iteration to relative tolerance 1e-10 with a
/// 1000-iteration cap and a deflation fallback. Throws std::invalid_argument
/// for non-square input.
double spectral_radius(const Matrix& alpha);

ValidationReport validate(const HawkesParams& params);

}  // namespace hawkes
