#pragma once

// Hyper-parameter selection over a regularization grid, scored either by the
// standard K-fold risk estimate or by the bias-corrected one, plus the
// bookkeeping needed to compare the two choices on held-out data.

#include <cstddef>
#include <optional>
#include <vector>

#include "cvstab/dataset.hpp"
#include "cvstab/folds.hpp"
#include "cvstab/learners.hpp"
#include "cvstab/oracles.hpp"

namespace cvstab {

// A finite menu of learner specifications that differ only in their
// regularization strength, built from an inclusive arithmetic progression
// a, a + step, ..., up to b.
struct ModelGrid {
    std::vector<LearnerSpec> specs;
    double a = 0.0;
    double b = 0.0;
    double step = 0.0;
};

// Builds the grid by stamping base with each regularization value. Throws
// std::invalid_argument when a <= 0, step <= 0, or b < a. a == b yields a
// single-model grid.
ModelGrid build_grid(const LearnerSpec& base, double a, double b, double step);

// Outcome of scoring every grid model by cross-validation on the training
// rows and evaluating the two winners on a disjoint test set.
struct SelectionResult {
    int chosen_standard = -1;             // grid index picked by the standard scores
    int chosen_corrected = -1;            // grid index picked by the corrected scores
    std::vector<double> per_model_standard;
    std::vector<double> per_model_corrected;
    double test_risk_standard = 0.0;      // test-set mean loss of the standard pick
    double test_se_standard = 0.0;
    double test_risk_corrected = 0.0;     // test-set mean loss of the corrected pick
    double test_se_corrected = 0.0;
    std::vector<int> failed_models;       // grid indices whose estimate threw FitError
    std::optional<int> oracle_index;      // filled by excess_risk (synthetic data only)
    std::optional<double> oracle_risk;
};

// Index of the smallest entry among non-failed models, resolving ties toward
// the smaller index (and hence the smaller regularization value). Returns -1
// when every model failed. Exposed for direct testing: subtracting one
// constant from every score must not change the winner.
int argmin_model(const std::vector<double>& scores, const std::vector<int>& failed);

// Scores each grid model with one corrected K-fold pass over train (the plain
// estimate is read from the same pass), picks the argmin under each score,
// refits both winners on all training rows, and reports their mean loss and
// standard error on test. Models whose estimate throws FitError are recorded
// in failed_models, get NaN per-model scores, and are excluded from the
// argmin. Throws FitError when every model fails and std::invalid_argument
// when the grid is empty or the scheme does not match train.
SelectionResult select(const ModelGrid& grid, const Dataset& train, const FoldScheme& scheme,
                       const Dataset& test, int workers = 1);

// True-risk comparison of the two picks against the best model in the grid,
// all refit on the full training rows and scored by the oracle.
struct ExcessRisk {
    double standard = 0.0;        // R(pick by standard score) - R(best in grid)
    double corrected = 0.0;       // R(pick by corrected score) - R(best in grid)
    double sup_gap_corrected = 0.0; // max over models of |corrected score - true risk|
};

// Refits every non-failed grid model on all rows of full_train, evaluates
// each with the oracle, and measures how far the two selected models fall
// short of the in-grid optimum. Fills result.oracle_index and
// result.oracle_risk as a side effect. result must come from select() on the
// same grid. Both excess values are nonnegative by construction.
ExcessRisk excess_risk(SelectionResult& result, const RiskOracle& oracle, const ModelGrid& grid,
                       const Dataset& full_train);

} // namespace cvstab
