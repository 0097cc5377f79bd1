#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvstab/dataset.hpp"
#include "cvstab/folds.hpp"

namespace cvstab {

enum class LearnerKind {
    constant,             // fixed loss everywhere, for diagnostics and tie tests
    rerm1d,               // one dimensional regularized least squares, closed form
    ridge,                // d dimensional ridge regression, squared loss
    kernel_ridge_sigmoid, // kernel ridge with k(x,x') = tanh(tau <x,x'>)
    hinge_sgd,            // projected stochastic subgradient on the hinge objective
    sgd_quadratic,        // plain SGD on 1/2 w'Aw - y x'w with a fixed PSD matrix A
};

std::string learner_kind_name(LearnerKind kind);
std::optional<LearnerKind> learner_kind_from_name(const std::string& name);

// Step size schedule for sgd_quadratic. log_over_t uses log(m)/t at every
// step, where m is the training set size of the fit at hand; fixed_list uses
// the supplied values (one per step).
struct StepSchedule {
    enum class Kind { log_over_t, fixed_list };
    Kind kind = Kind::log_over_t;
    std::vector<double> values;
};

struct LearnerSpec {
    LearnerKind kind = LearnerKind::ridge;
    double regularization = 1.0;              // lambda; must be > 0 where used
    std::optional<double> kernel_scale;       // tau; defaults to 1/d at fit time
    int sgd_steps = 1;                        // t, sgd_quadratic
    StepSchedule schedule;                    // sgd_quadratic
    int passes = 5;                           // hinge_sgd epochs over the training set
    std::uint64_t seed = 0;                   // index stream seed, stochastic kinds
    std::optional<double> stability_constant; // optional C with beta_t <= C/t
    std::optional<double> loss_bound;         // optional L with |loss| <= L
    std::optional<double> size_adaptive_m;    // rerm1d only: lambda(m) = 1/log(m) - 1/M^2
    double constant_loss = 0.0;               // kind constant
    std::vector<double> a_matrix;             // sgd_quadratic: row major d x d PSD matrix;
                                              // empty selects diag(0, 1, ..., 1)
};

// A trained model. Training state is immutable after fit, so predictors can
// be evaluated concurrently. Losses are nonnegative for every kind except
// sgd_quadratic, whose objective 1/2 w'Aw - y x'w is genuinely signed (it is
// only bounded in absolute value).
struct Predictor {
    LearnerKind kind = LearnerKind::constant;
    double scalar = 0.0;               // rerm1d coefficient, or the constant loss
    std::vector<double> weights;       // ridge theta / hinge w / sgd w
    std::vector<double> a_matrix;      // sgd_quadratic loss matrix
    std::vector<Observation> support;  // kernel ridge training points
    std::vector<double> alphas;        // kernel ridge dual coefficients
    double tau = 0.0;                  // kernel scale actually used
    std::optional<double> loss_bound;  // carried over from the spec, if declared

    double predict(const std::vector<double>& x) const;
    double loss(const Observation& o) const;
};

// Trains spec on the given rows of data. Deterministic given (spec, data,
// train): stochastic kinds derive their index stream from spec.seed alone.
// Throws FitError on numerical failure (for example a singular system) and
// std::invalid_argument on malformed inputs.
Predictor fit(const LearnerSpec& spec, const Dataset& data, const IndexSet& train);

// Mean loss of pred over the given rows. With subset disjoint from the
// training indices this is exactly the hold-out estimate.
double empirical_risk(const Predictor& pred, const Dataset& data, const IndexSet& subset);

// Sum of the step sizes a fit on m training points would use. Closed form
// bias and stability expressions for sgd_quadratic are phrased in terms of
// this sum.
double schedule_sum(const LearnerSpec& spec, int m);

} // namespace cvstab
