#include "hawkes/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hawkes::io {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/true);
  if (!doc.is_object()) {
    throw std::invalid_argument("expected a JSON object document");
  }
  const int schema = doc.value("schema", -1);
  if (schema != kSchemaVersion) {
    throw std::invalid_argument("unsupported schema version");
  }
  return doc;
}

void expect_type(const json& doc, const std::string& type) {
  if (doc.value("type", "") != type) {
    throw std::invalid_argument("expected a document of type '" + type + "'");
  }
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(j, k));
    out.push_back(row);
  }
  return out;
}

Vector vector_from_json(const json& arr) {
  if (!arr.is_array()) throw std::invalid_argument("expected a numeric array");
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

Matrix matrix_from_json(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw std::invalid_argument("expected a matrix");
  const std::size_t rows = arr.size();
  const std::size_t cols = arr[0].is_array() ? arr[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t j = 0; j < rows; ++j) {
    if (!arr[j].is_array() || arr[j].size() != cols) {
      throw std::invalid_argument("matrix rows must share one length");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = arr[j][k].get<double>();
    }
  }
  return m;
}

json dataset_to_json_doc(const Dataset& dataset) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["type"] = "dataset";
  doc["end_time"] = dataset.end_time();
  doc["dim"] = dataset.dim();
  json paths = json::array();
  for (const Path& p : dataset.paths()) {
    json path = json::array();
    for (Eigen::Index j = 0; j < p.dim(); ++j) path.push_back(p.events(j));
    paths.push_back(std::move(path));
  }
  doc["paths"] = std::move(paths);
  return doc;
}

Dataset dataset_from_json_doc(const json& doc) {
  expect_type(doc, "dataset");
  const double end_time = doc.at("end_time").get<double>();
  const auto d = doc.at("dim").get<std::size_t>();
  std::vector<Path> paths;
  for (const json& path : doc.at("paths")) {
    if (!path.is_array() || path.size() != d) {
      throw std::invalid_argument("each path must list one event array per dimension");
    }
    std::vector<std::vector<double>> events;
    events.reserve(d);
    for (const json& seq : path) events.push_back(seq.get<std::vector<double>>());
    paths.emplace_back(std::move(events), end_time);
  }
  return Dataset(std::move(paths), end_time);
}

json params_to_json_doc(const HawkesParams& params) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["type"] = "params";
  doc["mu"] = vector_to_json(params.mu);
  doc["alpha"] = matrix_to_json(params.alpha);
  doc["beta"] = params.beta;
  return doc;
}

HawkesParams params_from_json_doc(const json& doc) {
  HawkesParams params;
  params.mu = vector_from_json(doc.at("mu"));
  params.alpha = matrix_from_json(doc.at("alpha"));
  params.beta = doc.at("beta").get<double>();
  if (params.alpha.rows() != params.mu.size() || params.alpha.cols() != params.mu.size()) {
    throw std::invalid_argument("alpha must be d x d with d = len(mu)");
  }
  return params;
}

}  // namespace

std::string dataset_to_json(const Dataset& dataset) {
  return dataset_to_json_doc(dataset).dump(2) + "\n";
}

Dataset dataset_from_json(const std::string& text) {
  return dataset_from_json_doc(parse(text));
}

std::string labeled_dataset_to_json(const classify::LabeledDataset& dataset) {
  json doc = dataset_to_json_doc(dataset.data);
  doc["labels"] = dataset.labels;
  doc["n_classes"] = dataset.n_classes();
  return doc.dump(2) + "\n";
}

classify::LabeledDataset labeled_dataset_from_json(const std::string& text) {
  const json doc = parse(text);
  Dataset data = dataset_from_json_doc(doc);
  if (!doc.contains("labels")) {
    throw std::invalid_argument("document has no labels; a labeled dataset is required");
  }
  std::vector<int> labels = doc.at("labels").get<std::vector<int>>();
  std::size_t n_classes = 0;
  if (doc.contains("n_classes")) {
    n_classes = doc.at("n_classes").get<std::size_t>();
  } else {
    for (int y : labels) n_classes = std::max<std::size_t>(n_classes, static_cast<std::size_t>(y) + 1);
  }
  return classify::LabeledDataset(std::move(data), std::move(labels), n_classes);
}

std::string params_to_json(const HawkesParams& params) {
  return params_to_json_doc(params).dump(2) + "\n";
}

std::string document_type(const std::string& text) {
  return parse(text).value("type", "");
}

HawkesParams params_from_json(const std::string& text) {
  const json doc = parse(text);
  expect_type(doc, "params");
  return params_from_json_doc(doc);
}

std::string class_bank_to_json(const classify::ClassBank& bank) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["type"] = "class_bank";
  doc["beta"] = bank.beta();
  doc["weights"] = vector_to_json(bank.weights);
  json classes = json::array();
  for (const HawkesParams& params : bank.classes) {
    json entry;
    entry["mu"] = vector_to_json(params.mu);
    entry["alpha"] = matrix_to_json(params.alpha);
    classes.push_back(std::move(entry));
  }
  doc["classes"] = std::move(classes);
  return doc.dump(2) + "\n";
}

classify::ClassBank class_bank_from_json(const std::string& text) {
  const json doc = parse(text);
  expect_type(doc, "class_bank");
  classify::ClassBank bank;
  const double beta = doc.at("beta").get<double>();
  for (const json& entry : doc.at("classes")) {
    HawkesParams params;
    params.mu = vector_from_json(entry.at("mu"));
    params.alpha = matrix_from_json(entry.at("alpha"));
    params.beta = beta;
    bank.classes.push_back(std::move(params));
  }
  if (doc.contains("weights")) {
    bank.weights = vector_from_json(doc.at("weights"));
  } else {
    bank.weights = Vector::Constant(static_cast<Eigen::Index>(bank.classes.size()),
                                    1.0 / static_cast<double>(bank.classes.size()));
  }
  return bank;
}

std::string fit_result_to_json(const learner::FitResult& result, double score) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["type"] = "fit_result";
  doc["loss"] = result.config.loss == model::LossKind::LeastSquares ? "least-squares"
                                                                    : "log-likelihood";
  doc["decay"] = result.config.decay;
  doc["kappa"] = result.selected_kappa;
  doc["n_paths"] = result.n_paths;
  doc["dim"] = result.dim;
  doc["end_time"] = result.end_time;
  doc["converged"] = result.converged();
  doc["iterations"] = result.trace.n_iterations;
  doc["score"] = score;
  doc["mu"] = vector_to_json(result.theta_hat.mu_hat);
  doc["alpha"] = matrix_to_json(result.theta_hat.alpha_hat);
  json trace = json::array();
  for (const optim::TraceRecord& rec : result.trace.records) {
    trace.push_back({{"iteration", rec.iteration},
                     {"objective", rec.objective},
                     {"tolerance", rec.tol_measure}});
  }
  doc["trace"] = std::move(trace);
  return doc.dump(2) + "\n";
}

Matrix alpha_from_json(const std::string& text) {
  const json doc = parse(text);
  if (!doc.contains("alpha")) {
    throw std::invalid_argument("document carries no interaction matrix");
  }
  return matrix_from_json(doc.at("alpha"));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  char cell[64];
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      std::snprintf(cell, sizeof(cell), "%.17g", m(j, k));
      out += cell;
      out += (k + 1 < m.cols()) ? "," : "\n";
    }
  }
  return out;
}

}  // namespace hawkes::io
