#include "hawkes/cli.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <stdexcept>

#include <CLI11.hpp>

#include "hawkes/calibrate.hpp"
#include "hawkes/classify.hpp"
#include "hawkes/io.hpp"
#include "hawkes/learner.hpp"
#include "hawkes/metrics.hpp"
#include "hawkes/model.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/simulate.hpp"

namespace hawkes::cli {

namespace {

struct SimulateArgs {
  std::string params_file;
  double end_time = 0.0;
  std::size_t n_samples = 1;
  std::optional<std::uint64_t> seed;
  bool allow_degenerate = false;
  unsigned threads = 0;
  std::string out;
};

struct FitArgs {
  std::string data_file;
  double decay = 1.0;
  std::string loss = "least-squares";
  std::string penalty = "none";
  std::optional<double> kappa;
  std::string kappa_choice = "ebic";
  int cv_folds = 5;
  std::uint64_t cv_seed = 0;
  double ebic_gamma = 1.0;
  double zeta = 0.5;
  std::string optimizer = "agd";
  std::string scheduler = "backtracking";
  std::size_t max_iter = 200;
  double tol = 1e-5;
  std::size_t grid_size = 10;
  std::size_t record_every = 10;
  std::size_t print_every = 10;
  unsigned threads = 0;
  bool verbose = false;
  std::string out;
  std::string values_csv;
  std::string support_csv;
};

struct ClassifyArgs {
  std::string train_file;
  std::string test_file;
  double decay = 1.0;
  std::string method = "ermlr";
  double gamma0 = 0.1;
  double ebic_gamma = 1.0;
  std::size_t max_iter = 500;
  double tol = 1e-6;
  unsigned threads = 0;
  std::string out;
  std::string confusion_csv;
};

struct EvalArgs {
  std::string truth_file;
  std::string estimate_file;
};

unsigned resolve_threads(unsigned requested) {
  return requested > 0 ? requested : default_thread_count();
}

model::LossKind parse_loss(const std::string& name) {
  if (name == "least-squares") return model::LossKind::LeastSquares;
  if (name == "log-likelihood") return model::LossKind::LogLikelihood;
  throw std::invalid_argument("unknown loss '" + name + "'");
}

optim::ProxKind parse_penalty(const std::string& name) {
  if (name == "none") return optim::ProxKind::None;
  if (name == "lasso") return optim::ProxKind::Lasso;
  if (name == "ridge") return optim::ProxKind::Ridge;
  if (name == "elasticnet") return optim::ProxKind::ElasticNet;
  throw std::invalid_argument("unknown penalty '" + name + "'");
}

int run_simulate(const SimulateArgs& args) {
  const std::string params_text = io::read_file(args.params_file);

  // A class-bank parameter file produces a labeled classification problem;
  // a plain parameter file produces repeated paths of one process.
  if (io::document_type(params_text) == "class_bank") {
    const classify::ClassBank bank = io::class_bank_from_json(params_text);
    const classify::LabeledDataset dataset = classify::make_classification(
        bank, args.n_samples, args.end_time,
        args.seed ? *args.seed : std::random_device{}(), resolve_threads(args.threads));
    io::write_file(args.out, io::labeled_dataset_to_json(dataset));
    const double mean_events = static_cast<double>(dataset.data.total_events()) /
                               static_cast<double>(dataset.data.n_paths());
    std::printf(
        "simulated %zu labeled paths (%zu classes), dim %td, %zu events (%.6g per path), "
        "written to %s\n",
        dataset.data.n_paths(), dataset.n_classes(), dataset.data.dim(),
        dataset.data.total_events(), mean_events, args.out.c_str());
    return kExitOk;
  }

  sim::SimulationConfig config;
  config.params = io::params_from_json(params_text);
  config.end_time = args.end_time;
  config.n_samples = args.n_samples;
  config.seed = args.seed;
  config.allow_degenerate = args.allow_degenerate;
  config.n_threads = resolve_threads(args.threads);

  const Dataset dataset = sim::simulate_cluster(config);
  io::write_file(args.out, io::dataset_to_json(dataset));

  const double mean_events =
      static_cast<double>(dataset.total_events()) / static_cast<double>(dataset.n_paths());
  std::printf("simulated %zu paths, dim %td, %zu events (%.6g per path), written to %s\n",
              dataset.n_paths(), dataset.dim(), dataset.total_events(), mean_events,
              args.out.c_str());
  return kExitOk;
}

int run_fit(const FitArgs& args) {
  const Dataset dataset = io::dataset_from_json(io::read_file(args.data_file));

  learner::FitConfig config;
  config.decay = args.decay;
  config.loss = parse_loss(args.loss);
  config.penalty = parse_penalty(args.penalty);
  config.zeta = args.zeta;
  config.kappa = args.kappa;
  if (args.kappa_choice == "cv") {
    config.kappa_choice.method = calibrate::CalibrationMethod::CV;
  } else if (args.kappa_choice == "bic") {
    config.kappa_choice.method = calibrate::CalibrationMethod::BIC;
  } else if (args.kappa_choice == "ebic") {
    config.kappa_choice.method = calibrate::CalibrationMethod::EBIC;
  } else {
    throw std::invalid_argument("unknown kappa choice '" + args.kappa_choice + "'");
  }
  config.kappa_choice.folds = args.cv_folds;
  config.kappa_choice.seed = args.cv_seed;
  config.kappa_choice.gamma = args.ebic_gamma;
  config.grid_size = args.grid_size;
  config.optim.optimizer = args.optimizer == "gd" ? optim::Optimizer::GD : optim::Optimizer::AGD;
  if (args.optimizer != "gd" && args.optimizer != "agd") {
    throw std::invalid_argument("unknown optimizer '" + args.optimizer + "'");
  }
  if (args.scheduler == "lipschitz") {
    config.optim.scheduler = optim::Scheduler::Lipschitz;
  } else if (args.scheduler == "backtracking") {
    config.optim.scheduler = optim::Scheduler::Backtracking;
  } else {
    throw std::invalid_argument("unknown lr scheduler '" + args.scheduler + "'");
  }
  config.optim.max_iter = args.max_iter;
  config.optim.tol = args.tol;
  config.optim.record_every = args.record_every;
  config.optim.print_every = args.print_every;
  config.n_threads = resolve_threads(args.threads);
  config.verbose = args.verbose;

  const learner::FitResult result = learner::fit(dataset, config);
  const double fit_score = learner::score(result, dataset);

  if (!args.out.empty()) {
    io::write_file(args.out, io::fit_result_to_json(result, fit_score));
  }
  if (!args.values_csv.empty()) {
    Matrix values(result.dim, result.dim + 1);
    values.col(0) = result.theta_hat.mu_hat;
    values.rightCols(result.dim) = result.theta_hat.alpha_hat;
    io::write_file(args.values_csv, io::matrix_to_csv(values));
  }
  if (!args.support_csv.empty()) {
    const auto support = learner::estimated_support(result);
    io::write_file(args.support_csv, io::matrix_to_csv(support.cast<double>().matrix()));
  }

  std::printf("fit: n=%zu d=%td kappa=%.6g score=%.6g %s after %zu iterations\n",
              result.n_paths, result.dim, result.selected_kappa, fit_score,
              result.converged() ? "converged" : "not converged", result.trace.n_iterations);
  return result.converged() ? kExitOk : kExitNoConvergence;
}

int run_classify(const ClassifyArgs& args) {
  const classify::LabeledDataset train =
      io::labeled_dataset_from_json(io::read_file(args.train_file));
  const classify::LabeledDataset test =
      io::labeled_dataset_from_json(io::read_file(args.test_file));

  classify::ClassifierOptions options;
  options.gamma0 = args.gamma0;
  options.ebic_gamma = args.ebic_gamma;
  options.max_iter = args.max_iter;
  options.tol = args.tol;
  options.n_threads = resolve_threads(args.threads);

  classify::ClassifierModel model;
  if (args.method == "erm") {
    model = classify::fit_erm(train, args.decay, options);
  } else if (args.method == "ermlr") {
    model = classify::fit_ermlr(train, args.decay, options);
  } else {
    throw std::invalid_argument("unknown method '" + args.method + "'");
  }

  const std::vector<int> predicted = classify::predict(model, test.data.paths());
  const Matrix proba = classify::predict_proba(model, test.data.paths());
  const double test_accuracy = classify::accuracy(model, test);
  const Matrix cm = classify::confusion(model, test);

  if (!args.out.empty()) {
    std::string csv = "label,predicted";
    for (std::size_t k = 0; k < model.n_classes(); ++k) {
      csv += ",proba_" + std::to_string(k);
    }
    csv += "\n";
    char cell[64];
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      csv += std::to_string(test.labels[i]) + "," + std::to_string(predicted[i]);
      for (Eigen::Index k = 0; k < proba.cols(); ++k) {
        std::snprintf(cell, sizeof(cell), ",%.17g", proba(static_cast<Eigen::Index>(i), k));
        csv += cell;
      }
      csv += "\n";
    }
    io::write_file(args.out, csv);
  }
  if (!args.confusion_csv.empty()) {
    io::write_file(args.confusion_csv, io::matrix_to_csv(cm));
  }

  std::printf("%s accuracy: %.6g on %zu test paths\n", args.method.c_str(), test_accuracy,
              predicted.size());
  return kExitOk;
}

int run_eval(const EvalArgs& args) {
  const Matrix truth = io::alpha_from_json(io::read_file(args.truth_file));
  const Matrix estimate = io::alpha_from_json(io::read_file(args.estimate_file));
  const metrics::MetricReport report = metrics::report(truth, estimate);
  std::printf("%-12s %-12s %-12s\n", "hamming", "rel_err", "rank_corr");
  std::printf("%-12.6g %-12.6g %-12.6g\n", report.hamming, report.rel_err, report.rank_corr);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Statistical learning toolkit for multivariate Hawkes processes", "hawkes"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* cmd_simulate = app.add_subcommand("simulate", "Sample repeated paths");
  cmd_simulate->add_option("--params", sim_args.params_file, "Parameter file (JSON)")->required();
  cmd_simulate->add_option("--end-time", sim_args.end_time, "Horizon T")->required();
  cmd_simulate->add_option("--n-samples", sim_args.n_samples, "Number of paths")->required();
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt = cmd_simulate->add_option("--seed", seed_value, "Root seed");
  cmd_simulate->add_flag("--allow-degenerate", sim_args.allow_degenerate,
                         "Accept mu entries equal to zero");
  cmd_simulate->add_option("--threads", sim_args.threads, "Worker threads (default: auto)");
  cmd_simulate->add_option("--out", sim_args.out, "Output dataset file")->required();

  FitArgs fit_args;
  CLI::App* cmd_fit = app.add_subcommand("fit", "Fit a model to a dataset");
  cmd_fit->add_option("--data", fit_args.data_file, "Dataset file")->required();
  cmd_fit->add_option("--decay", fit_args.decay, "Decay beta")->required();
  cmd_fit->add_option("--loss", fit_args.loss, "least-squares | log-likelihood");
  cmd_fit->add_option("--penalty", fit_args.penalty, "none | lasso | ridge | elasticnet");
  double kappa_value = 0.0;
  CLI::Option* kappa_opt = cmd_fit->add_option("--kappa", kappa_value, "Explicit penalty constant");
  cmd_fit->add_option("--kappa-choice", fit_args.kappa_choice, "cv | bic | ebic");
  cmd_fit->add_option("--cv-folds", fit_args.cv_folds, "Cross-validation folds");
  cmd_fit->add_option("--cv-seed", fit_args.cv_seed, "Cross-validation shuffle seed");
  cmd_fit->add_option("--ebic-gamma", fit_args.ebic_gamma, "EBIC gamma in [0,1]");
  cmd_fit->add_option("--elastic-zeta", fit_args.zeta, "Elastic-net l1 weight in [0,1]");
  cmd_fit->add_option("--optimizer", fit_args.optimizer, "gd | agd");
  cmd_fit->add_option("--lr-scheduler", fit_args.scheduler, "lipschitz | backtracking");
  cmd_fit->add_option("--max-iter", fit_args.max_iter, "Iteration cap");
  cmd_fit->add_option("--tol", fit_args.tol, "Relative objective-change tolerance");
  cmd_fit->add_option("--grid-size", fit_args.grid_size, "Kappa grid size");
  cmd_fit->add_option("--record-every", fit_args.record_every, "Trace recording stride");
  cmd_fit->add_option("--print-every", fit_args.print_every, "Trace printing stride");
  cmd_fit->add_option("--threads", fit_args.threads, "Worker threads (default: auto)");
  cmd_fit->add_flag("--verbose", fit_args.verbose, "Print the optimization trace");
  cmd_fit->add_option("--out", fit_args.out, "Output fit-result file");
  cmd_fit->add_option("--values-csv", fit_args.values_csv, "Estimated (mu | alpha) matrix CSV");
  cmd_fit->add_option("--support-csv", fit_args.support_csv, "Estimated support matrix CSV");

  ClassifyArgs classify_args;
  CLI::App* cmd_classify = app.add_subcommand("classify", "Train and evaluate a path classifier");
  cmd_classify->add_option("--train", classify_args.train_file, "Labeled training file")->required();
  cmd_classify->add_option("--test", classify_args.test_file, "Labeled test file")->required();
  cmd_classify->add_option("--decay", classify_args.decay, "Decay beta")->required();
  cmd_classify->add_option("--method", classify_args.method, "erm | ermlr");
  cmd_classify->add_option("--gamma0", classify_args.gamma0, "Initial distance guess");
  cmd_classify->add_option("--ebic-gamma", classify_args.ebic_gamma, "EBIC gamma of the lasso stage");
  cmd_classify->add_option("--max-iter", classify_args.max_iter, "Refit iteration cap");
  cmd_classify->add_option("--tol", classify_args.tol, "Refit tolerance");
  cmd_classify->add_option("--threads", classify_args.threads, "Worker threads (default: auto)");
  cmd_classify->add_option("--out", classify_args.out, "Predictions CSV");
  cmd_classify->add_option("--confusion-csv", classify_args.confusion_csv, "Confusion matrix CSV");

  EvalArgs eval_args;
  CLI::App* cmd_eval = app.add_subcommand("eval", "Compare an estimate to ground truth");
  cmd_eval->add_option("--truth", eval_args.truth_file, "Ground-truth params file")->required();
  cmd_eval->add_option("--estimate", eval_args.estimate_file, "Estimate (params or fit result)")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cmd_simulate) {
      if (*seed_opt) sim_args.seed = seed_value;
      return run_simulate(sim_args);
    }
    if (*cmd_fit) {
      if (*kappa_opt) fit_args.kappa = kappa_value;
      return run_fit(fit_args);
    }
    if (*cmd_classify) return run_classify(classify_args);
    if (*cmd_eval) return run_eval(eval_args);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitUsage;
}

}  // namespace hawkes::cli
