#pragma once

#include <optional>
#include <string>

#include "hawkes/classify.hpp"
#include "hawkes/core.hpp"
#include "hawkes/learner.hpp"

// On-disk formats: versioned JSON documents for datasets, parameters, class
// banks and fit results. Doubles are written in shortest round-trip decimal
// form, so serialize/parse is bit-exact for finite values.

namespace hawkes::io {

inline constexpr int kSchemaVersion = 1;

std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const std::string& text);

/// A labeled dataset is a dataset document with a "labels" array. Reading a
/// labeled dataset from a document without labels throws.
std::string labeled_dataset_to_json(const classify::LabeledDataset& dataset);
classify::LabeledDataset labeled_dataset_from_json(const std::string& text);

std::string params_to_json(const HawkesParams& params);
HawkesParams params_from_json(const std::string& text);

/// "type" field of a document ("params", "class_bank", "dataset", ...).
std::string document_type(const std::string& text);

std::string class_bank_to_json(const classify::ClassBank& bank);
classify::ClassBank class_bank_from_json(const std::string& text);

std::string fit_result_to_json(const learner::FitResult& result, double score);

/// Interaction matrix of either a params document or a fit-result document.
Matrix alpha_from_json(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Full-precision CSV rendering of a matrix.
std::string matrix_to_csv(const Matrix& m);

}  // namespace hawkes::io
