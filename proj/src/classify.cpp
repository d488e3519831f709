#include "hawkes/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "hawkes/calibrate.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/simulate.hpp"

namespace hawkes::classify {

namespace {

constexpr double kMuFloor = 1e-8;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log p_hat_k + log-likelihood of the path under class k; -inf for an
/// infeasible class (non-positive intensity at an event) or zero weight.
Vector class_log_scores(const ClassifierModel& model, const model::PathStats& stats,
                        double end_time) {
  const std::size_t K = model.n_classes();
  Vector scores(static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    if (!(model.p_hat[static_cast<Eigen::Index>(k)] > 0.0)) {
      scores[static_cast<Eigen::Index>(k)] = kNegInf;
      continue;
    }
    double loglik;
    try {
      loglik = -model::path_negloglik(stats, end_time, model.theta_hat[k].mu_hat,
                                      model.theta_hat[k].alpha_hat);
    } catch (const std::domain_error&) {
      loglik = kNegInf;
    }
    scores[static_cast<Eigen::Index>(k)] =
        std::log(model.p_hat[static_cast<Eigen::Index>(k)]) + loglik;
  }
  return scores;
}

Vector softmax(const Vector& scores, const Vector& fallback) {
  const double top = scores.maxCoeff();
  if (!std::isfinite(top)) return fallback;  // every class infeasible
  Vector out = (scores.array() - top).exp();
  return out / out.sum();
}

std::size_t infer_classes(const std::vector<int>& labels) {
  int top = -1;
  for (int y : labels) {
    if (y < 0) throw std::invalid_argument("labels must be non-negative");
    top = std::max(top, y);
  }
  return static_cast<std::size_t>(top + 1);
}

int argmax_smallest_tie(const Vector& values) {
  int best = 0;
  for (Eigen::Index k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = static_cast<int>(k);
  }
  return best;
}

struct TrainContext {
  std::vector<model::PathStats> stats;
  std::vector<Vector> z;  // per sample: Z_k = 2*1{Y=k} - 1
  double end_time = 0.0;
  Eigen::Index d = 0;
  std::size_t K = 0;
};

/// Empirical L2-risk and its gradient over the packed class-major parameter
/// vector [theta_0; theta_1; ...]. Feasibility (mu >= floor, alpha >= 0) is
/// the caller's responsibility; the projection maintains it.
struct RiskObjective {
  const TrainContext* ctx;
  Vector p_hat;

  std::size_t block() const { return static_cast<std::size_t>(ctx->d * (ctx->d + 1)); }

  std::vector<ThetaEstimate> unpack_all(const Vector& packed) const {
    std::vector<ThetaEstimate> thetas(ctx->K);
    for (std::size_t k = 0; k < ctx->K; ++k) {
      thetas[k] = model::unpack(
          packed.segment(static_cast<Eigen::Index>(k * block()), static_cast<Eigen::Index>(block())),
          ctx->d);
    }
    return thetas;
  }

  // Per-sample posterior pieces shared by value and gradient.
  struct SampleEval {
    Vector pi;
    Vector f;
  };

  SampleEval eval_sample(const std::vector<ThetaEstimate>& thetas, std::size_t i) const {
    Vector scores(static_cast<Eigen::Index>(ctx->K));
    for (std::size_t k = 0; k < ctx->K; ++k) {
      if (!(p_hat[static_cast<Eigen::Index>(k)] > 0.0)) {
        scores[static_cast<Eigen::Index>(k)] = kNegInf;
        continue;
      }
      const double loglik = -model::path_negloglik(ctx->stats[i], ctx->end_time,
                                                   thetas[k].mu_hat, thetas[k].alpha_hat);
      scores[static_cast<Eigen::Index>(k)] =
          std::log(p_hat[static_cast<Eigen::Index>(k)]) + loglik;
    }
    SampleEval eval;
    eval.pi = softmax(scores, p_hat);
    eval.f = 2.0 * eval.pi.array() - 1.0;
    return eval;
  }

  double value(const Vector& packed) const {
    const auto thetas = unpack_all(packed);
    const double n = static_cast<double>(ctx->stats.size());
    double risk = 0.0;
    for (std::size_t i = 0; i < ctx->stats.size(); ++i) {
      const SampleEval eval = eval_sample(thetas, i);
      risk += (ctx->z[i] - eval.f).squaredNorm();
    }
    return risk / n;
  }

  Vector gradient(const Vector& packed) const {
    const auto thetas = unpack_all(packed);
    const double n = static_cast<double>(ctx->stats.size());
    std::vector<model::Gradient> grads(ctx->K);
    for (std::size_t k = 0; k < ctx->K; ++k) {
      grads[k] = model::Gradient{Vector::Zero(ctx->d), Matrix::Zero(ctx->d, ctx->d)};
    }
    for (std::size_t i = 0; i < ctx->stats.size(); ++i) {
      const SampleEval eval = eval_sample(thetas, i);
      const Vector residual = eval.f - ctx->z[i];
      const double mix = residual.dot(eval.pi);
      for (std::size_t k = 0; k < ctx->K; ++k) {
        const auto ki = static_cast<Eigen::Index>(k);
        const double coeff = (4.0 / n) * eval.pi[ki] * (residual[ki] - mix);
        if (coeff == 0.0) continue;
        // d(log-lik)/d(theta_k) = -d(negloglik)/d(theta_k), hence -coeff.
        model::path_negloglik_grad_accumulate(ctx->stats[i], ctx->end_time, thetas[k].mu_hat,
                                              thetas[k].alpha_hat, -coeff, grads[k].mu,
                                              grads[k].alpha);
      }
    }
    Vector packed_grad(packed.size());
    for (std::size_t k = 0; k < ctx->K; ++k) {
      packed_grad.segment(static_cast<Eigen::Index>(k * block()),
                          static_cast<Eigen::Index>(block())) = model::pack(grads[k]);
    }
    return packed_grad;
  }
};

/// Restriction of an objective to an active coordinate subset; inactive
/// coordinates stay frozen at their values in `base`.
struct MaskedObjective {
  optim::Objective full;
  Vector base;
  std::vector<Eigen::Index> active;

  Vector expand(const Vector& reduced) const {
    Vector x = base;
    for (std::size_t i = 0; i < active.size(); ++i) x[active[i]] = reduced[static_cast<Eigen::Index>(i)];
    return x;
  }

  Vector restrict(const Vector& x) const {
    Vector out(static_cast<Eigen::Index>(active.size()));
    for (std::size_t i = 0; i < active.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[active[i]];
    return out;
  }

  optim::Objective reduced() const {
    return {[this](const Vector& r) { return full.value(expand(r)); },
            [this](const Vector& r) { return restrict(full.gradient(expand(r))); }};
  }
};

Vector empirical_weights(const std::vector<int>& labels, std::size_t K) {
  Vector p = Vector::Zero(static_cast<Eigen::Index>(K));
  for (int y : labels) p[y] += 1.0;
  return p / static_cast<double>(labels.size());
}

std::vector<Dataset> split_by_class(const LabeledDataset& train) {
  const std::size_t K = train.n_classes();
  std::vector<std::vector<Path>> buckets(K);
  for (std::size_t i = 0; i < train.data.n_paths(); ++i) {
    buckets[static_cast<std::size_t>(train.labels[i])].push_back(train.data.path(i));
  }
  std::vector<Dataset> out;
  out.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (buckets[k].empty()) {
      throw std::invalid_argument("class " + std::to_string(k) +
                                  " is absent from the training labels");
    }
    out.emplace_back(std::move(buckets[k]), train.data.end_time());
  }
  return out;
}

TrainContext make_context(const LabeledDataset& train, double beta) {
  TrainContext ctx;
  ctx.end_time = train.data.end_time();
  ctx.d = train.data.dim();
  ctx.K = train.n_classes();
  ctx.stats.resize(train.data.n_paths());
  for (std::size_t i = 0; i < train.data.n_paths(); ++i) {
    ctx.stats[i] = model::precompute_path(train.data.path(i), beta);
  }
  ctx.z.resize(train.data.n_paths());
  for (std::size_t i = 0; i < train.data.n_paths(); ++i) {
    Vector z = Vector::Constant(static_cast<Eigen::Index>(ctx.K), -1.0);
    z[train.labels[i]] = 1.0;
    ctx.z[i] = std::move(z);
  }
  return ctx;
}

Vector pack_classes(const std::vector<ThetaEstimate>& thetas) {
  const Eigen::Index d = thetas.front().dim();
  const Eigen::Index block = d * (d + 1);
  Vector packed(static_cast<Eigen::Index>(thetas.size()) * block);
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    packed.segment(static_cast<Eigen::Index>(k) * block, block) = model::pack(thetas[k]);
  }
  return packed;
}

ClassifierModel finalize_model(const TrainContext& ctx, Vector p_hat, const Vector& packed,
                               double beta, optim::OptimTrace trace) {
  ClassifierModel model;
  model.p_hat = std::move(p_hat);
  model.beta = beta;
  model.refit_trace = std::move(trace);
  const std::size_t block = static_cast<std::size_t>(ctx.d * (ctx.d + 1));
  for (std::size_t k = 0; k < ctx.K; ++k) {
    model.theta_hat.push_back(model::unpack(
        packed.segment(static_cast<Eigen::Index>(k * block), static_cast<Eigen::Index>(block)),
        ctx.d));
  }
  return model;
}

}  // namespace

void validate_bank(const ClassBank& bank) {
  if (bank.classes.empty()) {
    throw std::invalid_argument("class bank must contain at least one class");
  }
  if (bank.weights.size() != static_cast<Eigen::Index>(bank.classes.size())) {
    throw std::invalid_argument("class weights and classes disagree in length");
  }
  if ((bank.weights.array() < 0.0).any() || std::abs(bank.weights.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("class weights must be a probability vector");
  }
  const double beta = bank.classes.front().beta;
  const Eigen::Index d = bank.classes.front().dim();
  for (std::size_t k = 0; k < bank.classes.size(); ++k) {
    const auto& params = bank.classes[k];
    if (params.beta != beta) {
      throw std::invalid_argument("all classes must share one decay");
    }
    if (params.dim() != d) {
      throw std::invalid_argument("all classes must share one dimension");
    }
    const ValidationReport report = validate(params);
    if (!report.simulation_ready()) {
      const std::string why = report.errors.empty() ? report.warnings.front()
                                                    : report.errors.front();
      throw std::invalid_argument("class " + std::to_string(k) + " invalid: " + why);
    }
  }
}

LabeledDataset::LabeledDataset(Dataset data, std::vector<int> labels, std::size_t n_classes)
    : data(std::move(data)), labels(std::move(labels)), n_classes_(n_classes) {
  if (this->labels.size() != this->data.n_paths()) {
    throw std::invalid_argument("one label per path required");
  }
  for (int y : this->labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes_) {
      throw std::invalid_argument("label out of range");
    }
  }
}

LabeledDataset make_classification(const ClassBank& bank, std::size_t n_samples, double end_time,
                                   std::uint64_t seed, unsigned n_threads) {
  validate_bank(bank);
  if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");

  // Labels first, from their own substream, by inverse-CDF of the weights.
  std::vector<int> labels(n_samples);
  {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n_samples; ++i) {
      double u = unit(rng);
      int k = 0;
      while (k + 1 < static_cast<int>(bank.n_classes()) && u >= bank.weights[k]) {
        u -= bank.weights[k];
        ++k;
      }
      labels[i] = k;
    }
  }

  std::vector<std::optional<Path>> slots(n_samples);
  parallel_for(n_samples, n_threads, [&](std::size_t i) {
    slots[i] = sim::simulate_cluster_path(bank.classes[static_cast<std::size_t>(labels[i])],
                                          end_time, seed, i);
  });
  std::vector<Path> paths;
  paths.reserve(n_samples);
  for (auto& slot : slots) paths.push_back(std::move(*slot));
  return LabeledDataset(Dataset(std::move(paths), end_time), std::move(labels),
                        bank.n_classes());
}

Vector posterior(const ClassifierModel& model, const Path& path) {
  const model::PathStats stats = model::precompute_path(path, model.beta);
  return softmax(class_log_scores(model, stats, path.end_time()), model.p_hat);
}

Vector score_function(const ClassifierModel& model, const Path& path) {
  return 2.0 * posterior(model, path).array() - 1.0;
}

double empirical_l2_risk(const ClassifierModel& model, const LabeledDataset& data) {
  if (data.data.dim() != model.dim()) {
    throw std::invalid_argument("data dimension does not match the model");
  }
  if (data.n_classes() != model.n_classes()) {
    throw std::invalid_argument("label range does not match the model");
  }
  const std::size_t K = model.n_classes();
  double risk = 0.0;
  for (std::size_t i = 0; i < data.data.n_paths(); ++i) {
    const Vector f = score_function(model, data.data.path(i));
    Vector z = Vector::Constant(static_cast<Eigen::Index>(K), -1.0);
    z[data.labels[i]] = 1.0;
    risk += (z - f).squaredNorm();
  }
  return risk / static_cast<double>(data.data.n_paths());
}

double l2_risk(const LabeledDataset& data, double beta, const Vector& p_hat,
               const std::vector<ThetaEstimate>& thetas) {
  const TrainContext ctx = make_context(data, beta);
  const RiskObjective risk{&ctx, p_hat};
  return risk.value(pack_classes(thetas));
}

std::vector<model::Gradient> l2_risk_gradient(const LabeledDataset& data, double beta,
                                              const Vector& p_hat,
                                              const std::vector<ThetaEstimate>& thetas) {
  const TrainContext ctx = make_context(data, beta);
  const RiskObjective risk{&ctx, p_hat};
  const Vector packed = risk.gradient(pack_classes(thetas));
  std::vector<model::Gradient> out;
  const Eigen::Index block = ctx.d * (ctx.d + 1);
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const ThetaEstimate part =
        model::unpack(packed.segment(static_cast<Eigen::Index>(k) * block, block), ctx.d);
    out.push_back(model::Gradient{part.mu_hat, part.alpha_hat});
  }
  return out;
}

namespace {

/// Per-class warm-start fits: unpenalized least squares for fit_erm, or
/// EBIC-tuned lasso for fit_ermlr (kappa > 0 selected per class).
std::vector<ThetaEstimate> per_class_ls_fits(const std::vector<Dataset>& by_class, double beta,
                                             const ClassifierOptions& options, bool lasso,
                                             std::vector<Eigen::Array<bool, Eigen::Dynamic,
                                                                      Eigen::Dynamic>>* supports) {
  const std::size_t K = by_class.size();
  std::vector<ThetaEstimate> thetas(K);
  if (supports) supports->resize(K);
  parallel_for(K, options.n_threads, [&](std::size_t k) {
    calibrate::SolverSpec spec;
    spec.beta = beta;
    spec.loss = model::LossKind::LeastSquares;
    spec.penalty = lasso ? optim::ProxKind::Lasso : optim::ProxKind::None;
    spec.optim.optimizer = optim::Optimizer::AGD;
    spec.optim.scheduler = optim::Scheduler::Backtracking;
    spec.optim.max_iter = 1000;
    spec.optim.tol = 1e-8;

    const model::SufficientStats stats = model::precompute(by_class[k], beta);
    double kappa = 0.0;
    if (lasso) {
      const calibrate::KappaGrid grid =
          calibrate::default_grid(stats, options.grid_size, spec.loss);
      kappa = calibrate::select_ebic(by_class[k], spec, grid, options.ebic_gamma).kappa;
    }
    calibrate::PenalizedFit fitted = calibrate::penalized_fit(stats, spec, kappa);
    // The risk refit evaluates likelihoods, so keep mu off the boundary.
    fitted.theta.mu_hat = fitted.theta.mu_hat.cwiseMax(kMuFloor);
    if (supports) (*supports)[k] = fitted.theta.alpha_hat.array() != 0.0;
    thetas[k] = std::move(fitted.theta);
  });
  return thetas;
}

}  // namespace

ClassifierModel fit_erm(const LabeledDataset& train, double beta,
                        const ClassifierOptions& options) {
  const std::vector<Dataset> by_class = split_by_class(train);
  const TrainContext ctx = make_context(train, beta);
  const Vector p_hat = empirical_weights(train.labels, ctx.K);

  const std::vector<ThetaEstimate> warm =
      per_class_ls_fits(by_class, beta, options, /*lasso=*/false, nullptr);
  const Vector init = pack_classes(warm);

  RiskObjective risk{&ctx, p_hat};
  optim::Objective objective{
      [risk](const Vector& v) { return risk.value(v); },
      [risk](const Vector& v) { return risk.gradient(v); }};

  optim::BoxProjection projection;
  projection.lower = Vector::Zero(init.size());
  const std::size_t block = static_cast<std::size_t>(ctx.d * (ctx.d + 1));
  for (std::size_t k = 0; k < ctx.K; ++k) {
    projection.lower.segment(static_cast<Eigen::Index>(k * block), ctx.d).setConstant(kMuFloor);
  }

  optim::MinimizeResult refit = optim::free_adagrad_minimize(
      objective, projection, options.gamma0, options.max_iter, options.tol, init);
  return finalize_model(ctx, p_hat, refit.minimizer, beta, std::move(refit.trace));
}

ClassifierModel fit_ermlr(const LabeledDataset& train, double beta,
                          const ClassifierOptions& options) {
  const std::vector<Dataset> by_class = split_by_class(train);
  const TrainContext ctx = make_context(train, beta);
  const Vector p_hat = empirical_weights(train.labels, ctx.K);

  std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> supports;
  const std::vector<ThetaEstimate> lasso_fits =
      per_class_ls_fits(by_class, beta, options, /*lasso=*/true, &supports);
  const Vector base = pack_classes(lasso_fits);

  RiskObjective risk{&ctx, p_hat};
  MaskedObjective masked;
  masked.full = optim::Objective{[risk](const Vector& v) { return risk.value(v); },
                                 [risk](const Vector& v) { return risk.gradient(v); }};
  masked.base = base;

  // Free coordinates: every mu, plus the supported alpha entries per class.
  const std::size_t block = static_cast<std::size_t>(ctx.d * (ctx.d + 1));
  Vector lower_full = Vector::Zero(base.size());
  for (std::size_t k = 0; k < ctx.K; ++k) {
    const auto offset = static_cast<Eigen::Index>(k * block);
    lower_full.segment(offset, ctx.d).setConstant(kMuFloor);
    for (Eigen::Index j = 0; j < ctx.d; ++j) {
      masked.active.push_back(offset + j);
    }
    for (Eigen::Index j = 0; j < ctx.d; ++j) {
      for (Eigen::Index c = 0; c < ctx.d; ++c) {
        if (supports[k](j, c)) {
          masked.active.push_back(offset + ctx.d + j * ctx.d + c);
        }
      }
    }
  }
  std::sort(masked.active.begin(), masked.active.end());

  optim::BoxProjection projection;
  projection.lower = masked.restrict(lower_full);

  optim::MinimizeResult refit =
      optim::free_adagrad_minimize(masked.reduced(), projection, options.gamma0,
                                   options.max_iter, options.tol, masked.restrict(base));

  ClassifierModel model =
      finalize_model(ctx, p_hat, masked.expand(refit.minimizer), beta, std::move(refit.trace));
  model.supports = std::move(supports);
  return model;
}

std::vector<int> predict(const ClassifierModel& model, const std::vector<Path>& paths) {
  std::vector<int> labels(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    labels[i] = argmax_smallest_tie(score_function(model, paths[i]));
  }
  return labels;
}

Matrix predict_proba(const ClassifierModel& model, const std::vector<Path>& paths) {
  Matrix proba(static_cast<Eigen::Index>(paths.size()),
               static_cast<Eigen::Index>(model.n_classes()));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    proba.row(static_cast<Eigen::Index>(i)) = posterior(model, paths[i]).transpose();
  }
  return proba;
}

double accuracy(const ClassifierModel& model, const LabeledDataset& data) {
  const std::vector<int> predicted = predict(model, data.data.paths());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == data.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

Matrix confusion(const ClassifierModel& model, const LabeledDataset& data) {
  const std::size_t K = model.n_classes();
  Matrix counts = Matrix::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
  const std::vector<int> predicted = predict(model, data.data.paths());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    counts(data.labels[i], predicted[i]) += 1.0;
  }
  for (Eigen::Index row = 0; row < counts.rows(); ++row) {
    const double total = counts.row(row).sum();
    if (total > 0.0) counts.row(row) /= total;
  }
  return counts;
}

}  // namespace hawkes::classify
