#include "cvstab/estimators.hpp"

#include <stdexcept>

#include "cvstab/rng.hpp"

namespace cvstab {

namespace {

FittedEstimate<Predictor> run_learner(const LearnerSpec& spec, const Dataset& data,
                                      const FoldScheme& scheme, bool with_correction,
                                      int workers) {
    if (scheme.n != data.n()) {
        throw std::invalid_argument("fold scheme covers " + std::to_string(scheme.n) +
                                    " rows but the dataset has " + std::to_string(data.n()));
    }
    BalanceReport report = verify_balance(scheme);
    if (!report.ok) {
        throw std::invalid_argument("fold scheme rejected: " + report.violation);
    }
    auto fit_fn = [&spec, &data](const IndexSet& train, int job) {
        LearnerSpec local = spec;
        local.seed = Rng::derive(spec.seed, static_cast<std::uint64_t>(job)).next_u64();
        return fit(local, data, train);
    };
    auto loss_fn = [&data](const Predictor& model, int i) {
        return model.loss(data.rows[static_cast<std::size_t>(i)]);
    };
    return kfold_core(scheme, fit_fn, loss_fn, with_correction, workers);
}

} // namespace

FittedEstimate<Predictor> kfold_estimate(const LearnerSpec& spec, const Dataset& data,
                                         const FoldScheme& scheme, int workers) {
    return run_learner(spec, data, scheme, false, workers);
}

FittedEstimate<Predictor> corrected_kfold_estimate(const LearnerSpec& spec, const Dataset& data,
                                                   const FoldScheme& scheme, int workers) {
    return run_learner(spec, data, scheme, true, workers);
}

Decomposition decompose(const LearnerSpec& spec, const Dataset& data, const FoldScheme& scheme,
                        const RiskOracle& oracle, int workers) {
    FittedEstimate<Predictor> fitted = corrected_kfold_estimate(spec, data, scheme, workers);
    const RiskEstimate& est = fitted.estimate;
    std::size_t k = fitted.fold_models.size();
    std::vector<double> fold_true(k);
    std::vector<double> train_gap(k);
    for (std::size_t j = 0; j < k; ++j) {
        fold_true[j] = oracle.risk(fitted.fold_models[j]).value;
        train_gap[j] = est.per_fold_train[j] - fold_true[j];
    }
    Decomposition out;
    out.true_risk_full = oracle.risk(*fitted.full_model).value;
    out.standard_value = est.plain_value();
    out.corrected_value = est.value;
    double mean_fold_true = mean(fold_true);
    out.d_cv = out.standard_value - mean_fold_true;
    out.bias = mean_fold_true - out.true_risk_full;
    out.d_all = *est.full_train - out.true_risk_full;
    out.d_train = mean(train_gap);
    return out;
}

} // namespace cvstab
