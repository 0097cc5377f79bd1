#pragma once

// CSV ingestion, seeded train/test splitting, and train-statistics
// standardization for the experiment harness.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cvstab/dataset.hpp"

namespace cvstab {

// Describes how to read a CSV file into a Dataset. The target column may be
// named (requires a header) or given as a 0-based column index; by default
// the last column is the target. Classification targets are mapped onto
// {-1, +1}: cells equal to positive_label become +1 and everything else -1,
// or, when positive_label is unset, cells must already be numeric +-1.
struct CsvSchema {
    enum class Task { regression, classification };

    bool has_header = true;
    std::optional<std::string> target_name;
    std::optional<int> target_index; // 0-based; default: last column
    Task task = Task::regression;
    std::optional<std::string> positive_label;
};

// Parses the file into a Dataset with d = column count - 1, preserving row
// order. Throws DataError for unreadable files, non-numeric or non-finite
// cells (naming the 1-based data row and column), missing target columns,
// and classification targets outside {-1, +1}; throws std::invalid_argument
// when the schema itself is contradictory (name and index both set, or a
// name without a header).
Dataset load_csv(const std::string& path, const CsvSchema& schema);

// Seeded shuffle-then-split. The first round(n * test_fraction) shuffled rows
// become the test set. Throws std::invalid_argument unless
// 0 < test_fraction < 1, the test set is nonempty, and at least two training
// rows remain.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double test_fraction,
                                             std::uint64_t seed);

// Per-feature location and scale learned from the training rows only. sd is
// the population standard deviation; zero_variance marks features that were
// constant in training and are zeroed in both sets.
struct StandardizeParams {
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<bool> zero_variance;
};

struct StandardizeResult {
    Dataset train;
    Dataset test;
    StandardizeParams params;
    std::vector<std::string> warnings; // one entry per zero-variance feature
};

// Z-scores every feature of both sets using statistics computed from train
// alone; targets are left untouched. Constant features map to 0 with a
// warning rather than an error. Throws std::invalid_argument when train is
// empty or the dimensions differ.
StandardizeResult standardize(const Dataset& train, const Dataset& test);

// Serializes the parameters for the run artifact (JSON text).
std::string params_to_json(const StandardizeParams& params);

} // namespace cvstab
