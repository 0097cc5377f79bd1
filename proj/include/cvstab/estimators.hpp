#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvstab/errors.hpp"
#include "cvstab/folds.hpp"
#include "cvstab/learners.hpp"
#include "cvstab/numeric.hpp"
#include "cvstab/oracles.hpp"
#include "cvstab/parallel.hpp"

namespace cvstab {

// A K-fold risk estimate with the per-fold quantities it was assembled from.
// In the plain variant, value is the mean over folds of the hold-out risk of
// the model trained on the fold complement. In the corrected variant, value is
//
//     (plain estimate) + (full model risk on all rows)
//                      - (mean over folds of fold model risk on all rows)
//
// and corrected_check holds the algebraically identical resubstitution form
//
//     (full model risk on all rows)
//         + (n_train / n) * mean over folds of (hold-out risk - training risk).
//
// The two forms are accumulated independently, so their agreement is a live
// consistency check on the arithmetic rather than a tautology; the estimator
// enforces it at a relative 1e-12.
struct RiskEstimate {
    double value = 0.0;
    std::vector<double> per_fold_validation; // fold model risk on its own fold
    std::vector<double> per_fold_train;      // fold model risk on its training rows
    std::vector<double> per_fold_full;       // fold model risk on all n rows
    std::optional<double> full_train;        // full model risk on all n rows (corrected)
    bool corrected = false;
    std::optional<double> corrected_check;   // resubstitution form (corrected)
    FoldScheme scheme;

    // Mean hold-out risk, which is the plain estimate in either variant.
    double plain_value() const { return mean(per_fold_validation); }
};

// Result of running the engine with a model-producing fit routine.
template <typename Model>
struct FittedEstimate {
    RiskEstimate estimate;
    std::vector<Model> fold_models;
    std::optional<Model> full_model;
};

namespace detail {

inline double subset_mean(const std::vector<double>& values, const IndexSet& subset) {
    double s = 0.0, comp = 0.0;
    for (int idx : subset) {
        double x = values[static_cast<std::size_t>(idx)];
        double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            comp += (s - t) + x;
        } else {
            comp += (x - t) + s;
        }
        s = t;
    }
    return (s + comp) / static_cast<double>(subset.size());
}

} // namespace detail

// Generic K-fold engine. fit_fn maps (training index set, job index) to a
// model, where job index j < k names the fold and j == k is the fit on all
// rows; loss_fn maps (model, row index) to a loss. The engine evaluates every
// fold model on all n rows so that the per-fold training and full sample
// means are available alongside the hold-out mean; with_correction
// additionally fits on the full index set and fills the corrected value. Jobs
// run under `workers` threads when workers > 1; fit_fn and loss_fn must then
// be safe to call concurrently. Exceptions from fit_fn are rethrown with the
// offending fold named. The caller is responsible for scheme validity.
template <typename Fit, typename Loss>
auto kfold_core(const FoldScheme& scheme, Fit&& fit_fn, Loss&& loss_fn, bool with_correction,
                int workers = 1) -> FittedEstimate<decltype(fit_fn(IndexSet{}, 0))> {
    using Model = decltype(fit_fn(IndexSet{}, 0));
    int k = scheme.k;
    int n = scheme.n;
    FittedEstimate<Model> out;
    out.estimate.scheme = scheme;
    out.estimate.per_fold_validation.assign(static_cast<std::size_t>(k), 0.0);
    out.estimate.per_fold_train.assign(static_cast<std::size_t>(k), 0.0);
    out.estimate.per_fold_full.assign(static_cast<std::size_t>(k), 0.0);
    out.fold_models.resize(static_cast<std::size_t>(k));

    IndexSet every(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) every[static_cast<std::size_t>(i)] = i;

    double full_mean = 0.0;
    Model full_model{};
    int jobs = with_correction ? k + 1 : k;
    parallel_for(jobs, workers, [&](int j) {
        const bool is_full = j == k;
        const IndexSet& train =
            is_full ? every : scheme.folds[static_cast<std::size_t>(j)].train;
        Model model;
        try {
            model = fit_fn(train, j);
        } catch (const std::exception& e) {
            if (is_full) throw FitError(std::string("full fit: ") + e.what());
            throw FitError("fold " + std::to_string(j) + ": " + e.what());
        }
        std::vector<double> losses(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            losses[static_cast<std::size_t>(i)] = loss_fn(model, i);
        }
        if (is_full) {
            full_mean = mean(losses);
            full_model = std::move(model);
        } else {
            const FoldPair& fold = scheme.folds[static_cast<std::size_t>(j)];
            out.estimate.per_fold_validation[static_cast<std::size_t>(j)] =
                detail::subset_mean(losses, fold.validation);
            out.estimate.per_fold_train[static_cast<std::size_t>(j)] =
                detail::subset_mean(losses, fold.train);
            out.estimate.per_fold_full[static_cast<std::size_t>(j)] = mean(losses);
            out.fold_models[static_cast<std::size_t>(j)] = std::move(model);
        }
    });

    double plain = mean(out.estimate.per_fold_validation);
    if (!with_correction) {
        out.estimate.value = plain;
        return out;
    }
    out.estimate.corrected = true;
    out.estimate.full_train = full_mean;
    out.estimate.value = plain + full_mean - mean(out.estimate.per_fold_full);
    std::vector<double> gaps(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        gaps[static_cast<std::size_t>(j)] =
            out.estimate.per_fold_validation[static_cast<std::size_t>(j)] -
            out.estimate.per_fold_train[static_cast<std::size_t>(j)];
    }
    double frac_train = static_cast<double>(scheme.n_train()) / static_cast<double>(n);
    out.estimate.corrected_check = full_mean + frac_train * mean(gaps);
    double drift = std::abs(out.estimate.value - *out.estimate.corrected_check);
    if (drift > 1e-12 * std::max(1.0, std::abs(out.estimate.value))) {
        throw FitError("corrected estimator forms disagree by " + std::to_string(drift));
    }
    out.full_model = std::move(full_model);
    return out;
}

// K-fold estimate for a learner on a dataset (the plain variant). Validates
// that the scheme is a balanced partition of exactly data.n() rows before any
// fitting happens. Stochastic learners get a distinct seed derived from
// (spec.seed, fold) so fold fits use independent streams.
FittedEstimate<Predictor> kfold_estimate(const LearnerSpec& spec, const Dataset& data,
                                         const FoldScheme& scheme, int workers = 1);

// The corrected variant; estimate.value is the corrected estimate and
// full_train / corrected_check are guaranteed to be set on return.
FittedEstimate<Predictor> corrected_kfold_estimate(const LearnerSpec& spec, const Dataset& data,
                                                   const FoldScheme& scheme, int workers = 1);

// Additive split of both estimators' errors against oracle truth:
//
//     plain value - true_risk_full     == d_cv + bias
//     corrected value - true_risk_full == d_all + (n_train/n) * (d_cv - d_train)
//
// with each identity holding to 1e-9. The oracle is consulted once per fold
// model and once for the full model.
struct Decomposition {
    double d_cv = 0.0;            // plain value minus mean true risk of fold models
    double bias = 0.0;            // mean true fold risk minus true full risk
    double d_all = 0.0;           // full-sample empirical risk minus true full risk
    double d_train = 0.0;         // mean over folds of (training risk minus true risk)
    double true_risk_full = 0.0;  // oracle risk of the model trained on all rows
    double standard_value = 0.0;  // plain estimate
    double corrected_value = 0.0; // corrected estimate
};

Decomposition decompose(const LearnerSpec& spec, const Dataset& data, const FoldScheme& scheme,
                        const RiskOracle& oracle, int workers = 1);

} // namespace cvstab
