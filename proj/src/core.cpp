#include "hawkes/core.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hawkes {

namespace {

void check_time(double t, double end_time) {
  if (!(t >= 0.0 && t <= end_time)) {
    throw std::invalid_argument("time " + std::to_string(t) + " outside [0, " +
                                std::to_string(end_time) + "]");
  }
}

void check_dim(Eigen::Index j, Eigen::Index d) {
  if (j < 0 || j >= d) {
    throw std::out_of_range("dimension index " + std::to_string(j) +
                            " out of range for d=" + std::to_string(d));
  }
}

}  // namespace

Path::Path(std::vector<std::vector<double>> events, double end_time)
    : events_(std::move(events)), end_time_(end_time) {
  if (!(end_time_ > 0.0)) {
    throw std::invalid_argument("end_time must be positive");
  }
  for (std::size_t j = 0; j < events_.size(); ++j) {
    const auto& ts = events_[j];
    for (std::size_t l = 0; l < ts.size(); ++l) {
      if (!std::isfinite(ts[l]) || ts[l] < 0.0 || ts[l] >= end_time_) {
        throw std::invalid_argument("event time outside [0, end_time) in dimension " +
                                    std::to_string(j));
      }
      if (l > 0 && !(ts[l] > ts[l - 1])) {
        throw std::invalid_argument("event times must be strictly increasing in dimension " +
                                    std::to_string(j));
      }
    }
  }
}

std::size_t Path::total_events() const {
  std::size_t m = 0;
  for (const auto& ts : events_) m += ts.size();
  return m;
}

Dataset::Dataset(std::vector<Path> paths, double end_time)
    : paths_(std::move(paths)), end_time_(end_time) {
  if (paths_.empty()) {
    throw std::invalid_argument("dataset needs at least one path");
  }
  const Eigen::Index d = paths_.front().dim();
  for (const auto& p : paths_) {
    if (p.end_time() != end_time_) {
      throw std::invalid_argument("all paths must share the dataset end_time");
    }
    if (p.dim() != d) {
      throw std::invalid_argument("all paths must share the same dimension");
    }
  }
}

std::size_t Dataset::total_events() const {
  std::size_t m = 0;
  for (const auto& p : paths_) m += p.total_events();
  return m;
}

double intensity(const HawkesParams& params, const Path& path, Eigen::Index j, double t) {
  check_dim(j, path.dim());
  check_time(t, path.end_time());
  double lam = params.mu[j];
  for (Eigen::Index k = 0; k < path.dim(); ++k) {
    const double a = params.alpha(j, k);
    if (a == 0.0) continue;
    double g = 0.0;
    for (double s : path.events(k)) {
      if (s >= t) break;  // strict past only
      g += params.beta * std::exp(-params.beta * (t - s));
    }
    lam += a * g;
  }
  return lam;
}

double compensator(const HawkesParams& params, const Path& path, Eigen::Index j, double t) {
  check_dim(j, path.dim());
  check_time(t, path.end_time());
  double value = params.mu[j] * t;
  for (Eigen::Index k = 0; k < path.dim(); ++k) {
    const double a = params.alpha(j, k);
    if (a == 0.0) continue;
    double mass = 0.0;
    for (double s : path.events(k)) {
      if (s >= t) break;
      mass += 1.0 - std::exp(-params.beta * (t - s));
    }
    value += a * mass;
  }
  return value;
}

namespace {

// One round of power iteration on the shifted matrix B = A + shift*I.
// Returns the Rayleigh estimate and whether tolerance was met; v holds the
// final iterate so a caller can deflate with it.
bool power_iterate(const Matrix& b, Vector& v, double& rayleigh, int max_iter, double rel_tol) {
  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = b * v;
    const double norm = w.norm();
    if (norm == 0.0) {  // v in the null space: restart from a perturbed vector
      v = Vector::Constant(v.size(), 1.0 / std::sqrt(double(v.size())));
      rayleigh = 0.0;
      prev = 0.0;
      continue;
    }
    v = w / norm;
    rayleigh = v.dot(b * v);
    if (it > 0 && std::abs(rayleigh - prev) <= rel_tol * std::max(1.0, std::abs(rayleigh))) {
      return true;
    }
    prev = rayleigh;
  }
  return false;
}

}  // namespace

double spectral_radius(const Matrix& alpha) {
  if (alpha.rows() != alpha.cols()) {
    throw std::invalid_argument("spectral_radius requires a square matrix");
  }
  const Eigen::Index d = alpha.rows();
  if (d == 0) return 0.0;
  if (d == 1) return std::abs(alpha(0, 0));

  // A non-negative matrix has spectral radius zero exactly when it is
  // nilpotent, i.e. A^d maps the all-ones vector to zero; detect that case
  // exactly before iterating.
  {
    Vector v = Vector::Ones(d);
    for (Eigen::Index k = 0; k <= d; ++k) {
      v = alpha.cwiseAbs() * v;
      const double top = v.maxCoeff();
      if (top == 0.0) return 0.0;
      v /= top;
    }
  }

  // The shift separates the Perron root from other eigenvalues of equal
  // modulus (periodic interaction graphs), keeping the iteration convergent:
  // rho(A) = rho(A + c I) - c for entrywise non-negative A.
  const double shift = 1e-2 * (1.0 + alpha.cwiseAbs().maxCoeff());
  const Matrix b = alpha + shift * Matrix::Identity(d, d);

  constexpr int kMaxIter = 1000;
  constexpr double kRelTol = 1e-10;

  Vector v = Vector::Constant(d, 1.0 / std::sqrt(double(d)));
  double rayleigh = 0.0;
  if (power_iterate(b, v, rayleigh, kMaxIter, kRelTol)) {
    return std::max(0.0, rayleigh - shift);
  }

  // Fallback: deflate the best estimate with its left/right pair and take the
  // larger of the two stage estimates.
  Vector w = v;
  double left_rayleigh = 0.0;
  power_iterate(b.transpose(), w, left_rayleigh, kMaxIter, kRelTol);
  const double denom = w.dot(v);
  double second = 0.0;
  if (std::abs(denom) > 1e-12) {
    const Matrix deflated = b - (rayleigh / denom) * (v * w.transpose());
    Vector u = Vector::Constant(d, 1.0 / std::sqrt(double(d)));
    power_iterate(deflated, u, second, kMaxIter, kRelTol);
  }
  return std::max(0.0, std::max(rayleigh, second) - shift);
}

ValidationReport validate(const HawkesParams& params) {
  ValidationReport report;
  const Eigen::Index d = params.mu.size();

  report.shapes_ok = d > 0 && params.alpha.rows() == d && params.alpha.cols() == d;
  if (!report.shapes_ok) {
    report.errors.push_back("alpha must be d x d with d = len(mu) > 0");
    return report;
  }

  report.positivity_ok = true;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(params.mu[j] > 0.0) || !std::isfinite(params.mu[j])) {
      report.positivity_ok = false;
      report.errors.push_back("mu[" + std::to_string(j) + "] must be strictly positive");
    }
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      if (params.alpha(j, k) < 0.0 || !std::isfinite(params.alpha(j, k))) {
        report.positivity_ok = false;
        report.errors.push_back("alpha(" + std::to_string(j) + "," + std::to_string(k) +
                                ") must be non-negative");
      }
    }
  }
  if (!(params.beta > 0.0) || !std::isfinite(params.beta)) {
    report.positivity_ok = false;
    report.errors.push_back("beta must be strictly positive");
  }

  if (params.alpha.cwiseAbs().maxCoeff() == 0.0) {
    report.spectral_radius = 0.0;
  } else {
    report.spectral_radius = spectral_radius(params.alpha.cwiseAbs());
  }
  report.sub_critical = report.spectral_radius < 1.0;
  if (!report.sub_critical) {
    report.warnings.push_back("spectral radius " + std::to_string(report.spectral_radius) +
                              " >= 1: process is not sub-critical");
  }
  return report;
}

}  // namespace hawkes
