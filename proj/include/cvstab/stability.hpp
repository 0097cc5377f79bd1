#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cvstab/dataset.hpp"
#include "cvstab/learners.hpp"
#include "cvstab/rng.hpp"

namespace cvstab {

// One probed training size. beta_hat is the largest loss perturbation seen
// when deleting a single training point, maximized over sampled datasets,
// deletions, and evaluation points. It is a measured witness from below: the
// true uniform-stability constant is at least beta_hat (up to Monte Carlo
// noise in the randomized probe), never certified from above.
struct StabilityEntry {
    int n_t = 0;
    double beta_hat = 0.0;
    long long trials = 0;    // trials that completed without a fit failure
    double se_at_max = 0.0;  // randomized probe: standard error of the maximizing mean
};

struct StabilityProfile {
    std::vector<StabilityEntry> entries; // sorted by n_t
    double fit_exponent = 0.0;           // least squares slope of log beta_hat vs log n_t
    long long failures = 0;              // fit failures skipped along the way
};

// Deletion-stability probe for a learner. For each size m in sizes: draw
// `trials` datasets of m rows from sampler, fit on all m rows and on each of
// the m single-deletion subsets, and record the largest absolute loss
// difference across `eval_points` fresh evaluation draws. Fit failures are
// counted and skipped rather than fatal. The slope is fitted over entries
// with beta_hat > 0 (and is 0 when fewer than two such entries exist).
// Trials run under `workers` threads on streams derived from (seed, size,
// trial), so results do not depend on scheduling.
StabilityProfile probe_stability(const LearnerSpec& spec,
                                 const std::function<Observation(Rng&)>& sampler,
                                 const std::vector<int>& sizes, int trials, int eval_points,
                                 std::uint64_t seed, int workers = 1);

// Same probe for learners with internal randomness: the loss difference is a
// difference of means over inner_reps independent re-fits (fresh derived
// seeds per re-fit) before the absolute value, matching a definition of
// stability in expectation over the algorithm. se_at_max records the standard
// error of the difference that achieved the maximum, so callers can allow for
// Monte Carlo noise when comparing against a proved ceiling. With
// inner_reps = 1 and a deterministic learner this reduces to probe_stability.
StabilityProfile probe_randomized_stability(const LearnerSpec& spec,
                                            const std::function<Observation(Rng&)>& sampler,
                                            const std::vector<int>& sizes, int trials,
                                            int inner_reps, int eval_points, std::uint64_t seed,
                                            int workers = 1);

// CSV rows "n_T,beta_hat,trials" with a header line.
std::string profile_to_csv(const StabilityProfile& profile);

} // namespace cvstab
