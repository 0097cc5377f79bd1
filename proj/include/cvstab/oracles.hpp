#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cvstab/dataset.hpp"
#include "cvstab/learners.hpp"
#include "cvstab/rng.hpp"

namespace cvstab {

struct RiskValue {
    double value = 0.0;
    double standard_error = 0.0; // zero in exact mode
};

// True generalization risk for a synthetic distribution, either in closed
// form or by Monte Carlo over fresh draws.
struct RiskOracle {
    enum class Mode { exact, monte_carlo };
    Mode mode = Mode::monte_carlo;
    std::function<double(const Predictor&)> closed_form; // exact mode
    std::function<Observation(Rng&)> sampler;            // the data distribution
    int mc_samples = 100000;
    std::uint64_t seed = 0;

    // Exact mode evaluates closed_form and reports a zero standard error.
    // Monte Carlo mode redraws the same seeded sample set on every call, so
    // repeated calls are identical and different predictors are compared on
    // common draws. Constant-loss predictors are answered directly in either
    // mode: their risk is that constant under any distribution.
    RiskValue risk(const Predictor& pred) const;
};

// Draws n observations into a Dataset; the dimension comes from the first draw.
Dataset sample_dataset(const std::function<Observation(Rng&)>& sampler, int n,
                       std::uint64_t seed);

// Generic Monte Carlo oracle over an arbitrary observation distribution.
RiskOracle make_mc_oracle(std::function<Observation(Rng&)> sampler, int mc_samples,
                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Deterministic regression family on which the plain K-fold estimate provably
// overshoots. Every row has x = e/M and y = M*e for a sign e, so x*y = 1 and
// x^2 = 1/M^2 always, and rerm1d with the size adaptive penalty
// lambda(m) = 1/log(m) - 1/M^2 fits beta = log(m) from any m rows. Every loss
// is then the spatial constant (M - log(m)/M)^2, which makes each
// cross-validation quantity computable in closed form.
// ---------------------------------------------------------------------------
struct RermConstruction {
    double m_bound = 10.0; // M > 1; requires n <= exp(M)
    int n = 100;
    int k = 5;
};

struct RermReport {
    double full_risk = 0.0;      // risk of the rule trained on all n rows
    double fold_risk = 0.0;      // risk of a rule trained on n - n/k rows
    double kfold_bias = 0.0;     // plain K-fold estimate minus full_risk
    double corrected_bias = 0.0; // corrected estimate minus full_risk
    double lower_bound = 0.0;    // 2 log(K/(K-1)) (1 - 1/M)
    double upper_bound = 0.0;    // 2 log(K/(K-1))
};

// Throws std::invalid_argument when the parameters leave the regime where
// the closed forms are valid (k >= 2, k | n, M > 1, n <= exp(M), and the
// penalty positive at every training size in play).
void validate_construction(const RermConstruction& c);

// The learner the construction trains: rerm1d with the size adaptive penalty.
LearnerSpec construction_spec(const RermConstruction& c);

// One row of the construction's distribution; the sign is Rademacher.
std::function<Observation(Rng&)> construction_sampler(const RermConstruction& c);

// Exact risk oracle for rerm1d predictors under this distribution:
// risk(beta) = (M - beta/M)^2.
RiskOracle make_rerm_oracle(double m_bound);

// Closed-form report: biases, the two-sided bounds they sit between, and the
// two risk levels involved.
RermReport rerm_exact_report(const RermConstruction& c);

// Same report measured end to end: draws the dataset, runs rerm1d through the
// plain and corrected estimators on a seeded fold scheme, and differences the
// results against the exact oracle applied to the fitted full model. Matches
// rerm_exact_report to 1e-9 because the construction is deterministic.
RermReport rerm_simulated_report(const RermConstruction& c, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Stochastic family showing the same overshoot for plain SGD on the signed
// quadratic objective 1/2 w'Aw - y x'w. Features are +/- v with
// P(X = v) = p_plus, targets are 1, A is PSD with A v = 0, and every fit runs
// t steps of size log(m)/t from w = 0, so the iterate stays on the line
// spanned by v and its coefficient is a sum of step sizes times sampled
// signs.
// ---------------------------------------------------------------------------
struct SgdConstruction {
    double m_bound = 10.0; // M > 1; requires n <= exp(M)
    int n = 100;
    int k = 5;
    int t = 10; // SGD steps per fit
    int d = 2;
    double p_plus = 2.0 / 3.0;
    std::vector<double> v;        // unit direction; empty selects e1
    std::vector<double> a_matrix; // row major PSD with A v = 0; empty selects diag(0,1,...,1)
};

struct SgdBiasReport {
    // Mean over replicates of the average fold-model loss minus full-model
    // loss at the canonical evaluation point (v, 1); in expectation this is
    // exactly the closed form below.
    double expected_bias_mc = 0.0;
    double mc_standard_error = 0.0;
    // (sum of step sizes at n - sum at n_T) * (2 p_plus - 1) = log(K/(K-1))/3
    // at the default p_plus.
    double expected_bias_closed_form = 0.0;
    double lower_bound = 0.0;     // (1/3) log(K/(K-1)), the distribution floor
    double stability_bound = 0.0; // 3 * (sum of step sizes at n) / (n - 1)
    long long replicates = 0;
};

void validate_construction(const SgdConstruction& c);
LearnerSpec construction_spec(const SgdConstruction& c);
std::function<Observation(Rng&)> construction_sampler(const SgdConstruction& c);

// Exact risk oracle for linear predictors under this distribution:
// risk(w) = 1/2 w'Aw - (2 p_plus - 1) v.w, with A taken from the predictor.
RiskOracle make_sgd_oracle(const SgdConstruction& c);

// Monte Carlo study of the fold-versus-full loss gap. Per replicate: draw a
// dataset, fit the K fold models and the full model (fresh derived seeds for
// each), and evaluate the loss gap at the canonical point (v, 1). Replicates
// run under `workers` threads with streams derived from (seed, replicate), so
// the result is independent of scheduling.
SgdBiasReport sgd_bias_report(const SgdConstruction& c, long long replicates, std::uint64_t seed,
                              int workers = 1);

// ---------------------------------------------------------------------------
// Synthetic regression family for the rate and selection experiments:
// x ~ N(0, I_d), y = theta*.x + sigma * eps. For a linear predictor w under
// squared loss the risk is |w - theta*|^2 + sigma^2 in closed form.
// ---------------------------------------------------------------------------
RiskOracle make_linear_gaussian_oracle(std::vector<double> theta_star, double sigma,
                                       RiskOracle::Mode mode = RiskOracle::Mode::exact,
                                       int mc_samples = 100000, std::uint64_t seed = 0);
std::function<Observation(Rng&)> linear_gaussian_sampler(std::vector<double> theta_star,
                                                         double sigma);

// Binary classification family: x ~ N(0, I_d), y = sign(theta*.x + sigma*eps),
// with sign(0) mapped to +1. Used to exercise the hinge learner.
std::function<Observation(Rng&)> sign_linear_sampler(std::vector<double> theta_star, double sigma);

} // namespace cvstab
