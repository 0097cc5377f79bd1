#include "cvstab/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cvstab/errors.hpp"
#include "cvstab/estimators.hpp"
#include "cvstab/numeric.hpp"
#include "cvstab/parallel.hpp"

namespace cvstab {

ModelGrid build_grid(const LearnerSpec& base, double a, double b, double step) {
    if (!(a > 0.0)) throw std::invalid_argument("grid start must be positive");
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (b < a) throw std::invalid_argument("grid end must not be below its start");
    ModelGrid grid;
    grid.a = a;
    grid.b = b;
    grid.step = step;
    // Tolerate accumulated rounding at the top endpoint so that an exact
    // multiple of step lands inside the grid.
    for (int j = 0;; ++j) {
        double value = a + step * j;
        if (value > b + step * 1e-6) break;
        LearnerSpec spec = base;
        spec.regularization = value;
        grid.specs.push_back(spec);
    }
    return grid;
}

int argmin_model(const std::vector<double>& scores, const std::vector<int>& failed) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
        if (std::find(failed.begin(), failed.end(), i) != failed.end()) continue;
        if (best < 0 || scores[static_cast<std::size_t>(i)] < scores[static_cast<std::size_t>(best)]) {
            best = i;
        }
    }
    return best;
}

namespace {

IndexSet full_index_set(int n) {
    IndexSet all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    return all;
}

// Mean loss and its standard error for one fitted model over a test set.
void test_score(const Predictor& pred, const Dataset& test, double& risk, double& se) {
    std::vector<double> losses(test.rows.size());
    for (std::size_t i = 0; i < test.rows.size(); ++i) losses[i] = pred.loss(test.rows[i]);
    risk = mean(losses);
    se = standard_error(losses);
}

} // namespace

SelectionResult select(const ModelGrid& grid, const Dataset& train, const FoldScheme& scheme,
                       const Dataset& test, int workers) {
    if (grid.specs.empty()) throw std::invalid_argument("model grid is empty");
    if (test.rows.empty()) throw std::invalid_argument("test set is empty");
    if (test.d != train.d) throw std::invalid_argument("train and test dimensions differ");

    SelectionResult result;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.per_model_standard.assign(grid.specs.size(), nan);
    result.per_model_corrected.assign(grid.specs.size(), nan);

    // Worker budget spans the grid; each model's folds run serially inside
    // its slot so the total thread count stays at the requested level.
    std::vector<char> failed(grid.specs.size(), 0);
    parallel_for(static_cast<int>(grid.specs.size()), workers, [&](int i) {
        try {
            RiskEstimate est = corrected_kfold_estimate(
                grid.specs[static_cast<std::size_t>(i)], train, scheme, 1).estimate;
            result.per_model_standard[static_cast<std::size_t>(i)] = est.plain_value();
            result.per_model_corrected[static_cast<std::size_t>(i)] = est.value;
        } catch (const FitError&) {
            failed[static_cast<std::size_t>(i)] = 1;
        }
    });
    for (int i = 0; i < static_cast<int>(grid.specs.size()); ++i) {
        if (failed[static_cast<std::size_t>(i)]) result.failed_models.push_back(i);
    }

    result.chosen_standard = argmin_model(result.per_model_standard, result.failed_models);
    result.chosen_corrected = argmin_model(result.per_model_corrected, result.failed_models);
    if (result.chosen_standard < 0 || result.chosen_corrected < 0) {
        throw FitError("every model in the grid failed to fit");
    }

    IndexSet all = full_index_set(static_cast<int>(train.rows.size()));
    Predictor standard_pick =
        fit(grid.specs[static_cast<std::size_t>(result.chosen_standard)], train, all);
    Predictor corrected_pick =
        fit(grid.specs[static_cast<std::size_t>(result.chosen_corrected)], train, all);
    test_score(standard_pick, test, result.test_risk_standard, result.test_se_standard);
    test_score(corrected_pick, test, result.test_risk_corrected, result.test_se_corrected);
    return result;
}

ExcessRisk excess_risk(SelectionResult& result, const RiskOracle& oracle, const ModelGrid& grid,
                       const Dataset& full_train) {
    if (grid.specs.size() != result.per_model_corrected.size()) {
        throw std::invalid_argument("selection result does not match the grid");
    }
    if (result.chosen_standard < 0 || result.chosen_corrected < 0) {
        throw std::invalid_argument("selection result holds no chosen models");
    }

    IndexSet all = full_index_set(static_cast<int>(full_train.rows.size()));
    std::vector<double> true_risk(grid.specs.size(),
                                  std::numeric_limits<double>::quiet_NaN());
    ExcessRisk excess;
    int best = -1;
    double best_risk = 0.0;
    for (int i = 0; i < static_cast<int>(grid.specs.size()); ++i) {
        if (std::find(result.failed_models.begin(), result.failed_models.end(), i) !=
            result.failed_models.end()) {
            continue;
        }
        Predictor pred = fit(grid.specs[static_cast<std::size_t>(i)], full_train, all);
        double risk = oracle.risk(pred).value;
        true_risk[static_cast<std::size_t>(i)] = risk;
        if (best < 0 || risk < best_risk) {
            best = i;
            best_risk = risk;
        }
        double gap = std::abs(result.per_model_corrected[static_cast<std::size_t>(i)] - risk);
        if (gap > excess.sup_gap_corrected) excess.sup_gap_corrected = gap;
    }
    if (best < 0) {
        throw std::invalid_argument("every model in the selection result failed");
    }
    result.oracle_index = best;
    result.oracle_risk = best_risk;
    excess.standard = true_risk[static_cast<std::size_t>(result.chosen_standard)] - best_risk;
    excess.corrected = true_risk[static_cast<std::size_t>(result.chosen_corrected)] - best_risk;
    return excess;
}

} // namespace cvstab
