#include "cvstab/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cvstab/errors.hpp"
#include "cvstab/numeric.hpp"
#include "cvstab/parallel.hpp"

namespace cvstab {

namespace {

struct TrialOutcome {
    bool ok = false;
    double max_diff = -1.0;
    double se_at_max = 0.0;
};

void validate_probe_args(const std::vector<int>& sizes, int trials, int eval_points) {
    if (sizes.empty()) throw std::invalid_argument("probe needs at least one size");
    for (int m : sizes) {
        if (m < 2) throw std::invalid_argument("probe sizes must be at least 2");
    }
    std::vector<int> sorted = sizes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("probe sizes must be distinct");
    }
    if (trials < 1) throw std::invalid_argument("probe needs at least one trial");
    if (eval_points < 1) throw std::invalid_argument("probe needs at least one evaluation point");
}

Dataset draw_rows(const std::function<Observation(Rng&)>& sampler, int m, Rng& rng) {
    Dataset data;
    data.rows.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) data.rows.push_back(sampler(rng));
    data.d = static_cast<int>(data.rows.front().x.size());
    return data;
}

IndexSet all_but(int m, int removed) {
    IndexSet out;
    out.reserve(static_cast<std::size_t>(m - 1));
    for (int i = 0; i < m; ++i) {
        if (i != removed) out.push_back(i);
    }
    return out;
}

StabilityProfile assemble(const std::vector<int>& spread_sizes, int trials,
                          const std::vector<TrialOutcome>& outcomes, long long failures) {
    // spread_sizes is sorted; job (s, t) sits at slot s*trials + t.
    StabilityProfile profile;
    profile.failures = failures;
    for (std::size_t s = 0; s < spread_sizes.size(); ++s) {
        StabilityEntry entry;
        entry.n_t = spread_sizes[s];
        for (int t = 0; t < trials; ++t) {
            const TrialOutcome& o = outcomes[s * static_cast<std::size_t>(trials) +
                                             static_cast<std::size_t>(t)];
            if (!o.ok) continue;
            ++entry.trials;
            if (o.max_diff > entry.beta_hat) {
                entry.beta_hat = o.max_diff;
                entry.se_at_max = o.se_at_max;
            }
        }
        profile.entries.push_back(entry);
    }
    std::vector<double> log_m, log_beta;
    for (const StabilityEntry& e : profile.entries) {
        if (e.trials > 0 && e.beta_hat > 0.0) {
            log_m.push_back(std::log(static_cast<double>(e.n_t)));
            log_beta.push_back(std::log(e.beta_hat));
        }
    }
    profile.fit_exponent = log_m.size() >= 2 ? lsq_slope(log_m, log_beta) : 0.0;
    return profile;
}

// Shared driver. With inner_reps = 0 the probe is the plain one: every fit
// uses spec.seed verbatim, so for learners with internal randomness the base
// and deletion fits are coupled on one realization. With inner_reps >= 1 the
// probe measures a difference of means over that many independently seeded
// re-fits per side.
StabilityProfile run_probe(const LearnerSpec& spec,
                           const std::function<Observation(Rng&)>& sampler,
                           const std::vector<int>& sizes, int trials, int inner_reps,
                           int eval_points, std::uint64_t seed, int workers) {
    validate_probe_args(sizes, trials, eval_points);
    std::vector<int> sorted_sizes = sizes;
    std::sort(sorted_sizes.begin(), sorted_sizes.end());

    int jobs = static_cast<int>(sorted_sizes.size()) * trials;
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(jobs));
    std::atomic<long long> failures{0};

    parallel_for(jobs, workers, [&](int job) {
        int size_idx = job / trials;
        int m = sorted_sizes[static_cast<std::size_t>(size_idx)];
        Rng stream = Rng::derive(seed, static_cast<std::uint64_t>(job));
        Dataset data = draw_rows(sampler, m, stream);
        std::vector<Observation> evals;
        evals.reserve(static_cast<std::size_t>(eval_points));
        for (int e = 0; e < eval_points; ++e) evals.push_back(sampler(stream));

        IndexSet full(static_cast<std::size_t>(m));
        std::iota(full.begin(), full.end(), 0);

        TrialOutcome& out = outcomes[static_cast<std::size_t>(job)];
        const int reps = inner_reps > 0 ? inner_reps : 1;
        const bool randomized = inner_reps > 0;

        // Mean and standard error of the loss at each evaluation point over
        // re-fits on the given rows. ok comes back false when every re-fit
        // failed; individual failures are counted and skipped.
        auto mean_losses = [&](const IndexSet& train, std::vector<double>& means,
                               std::vector<double>& sems) -> bool {
            std::vector<std::vector<double>> per_rep;
            per_rep.reserve(static_cast<std::size_t>(reps));
            for (int r = 0; r < reps; ++r) {
                LearnerSpec local = spec;
                if (randomized) local.seed = stream.next_u64();
                try {
                    Predictor pred = fit(local, data, train);
                    std::vector<double> losses(evals.size());
                    for (std::size_t e = 0; e < evals.size(); ++e) {
                        losses[e] = pred.loss(evals[e]);
                    }
                    per_rep.push_back(std::move(losses));
                } catch (const std::exception&) {
                    failures.fetch_add(1, std::memory_order_relaxed);
                }
            }
            if (per_rep.empty()) return false;
            double r_eff = static_cast<double>(per_rep.size());
            means.assign(evals.size(), 0.0);
            sems.assign(evals.size(), 0.0);
            std::vector<double> column(per_rep.size());
            for (std::size_t e = 0; e < evals.size(); ++e) {
                for (std::size_t r = 0; r < per_rep.size(); ++r) column[r] = per_rep[r][e];
                means[e] = mean(column);
                if (per_rep.size() > 1) {
                    sems[e] = sample_sd(column) / std::sqrt(r_eff);
                }
            }
            return true;
        };

        std::vector<double> base_mean, base_sem;
        if (!mean_losses(full, base_mean, base_sem)) return; // outcome stays failed

        bool any = false;
        std::vector<double> minus_mean, minus_sem;
        for (int i = 0; i < m; ++i) {
            if (!mean_losses(all_but(m, i), minus_mean, minus_sem)) continue;
            for (std::size_t e = 0; e < base_mean.size(); ++e) {
                double diff = std::abs(base_mean[e] - minus_mean[e]);
                if (diff > out.max_diff) {
                    out.max_diff = diff;
                    out.se_at_max = std::sqrt(base_sem[e] * base_sem[e] +
                                              minus_sem[e] * minus_sem[e]);
                }
            }
            any = true;
        }
        if (any) {
            out.ok = true;
            if (out.max_diff < 0.0) out.max_diff = 0.0;
        }
    });

    return assemble(sorted_sizes, trials, outcomes, failures.load());
}

} // namespace

StabilityProfile probe_stability(const LearnerSpec& spec,
                                 const std::function<Observation(Rng&)>& sampler,
                                 const std::vector<int>& sizes, int trials, int eval_points,
                                 std::uint64_t seed, int workers) {
    return run_probe(spec, sampler, sizes, trials, 0, eval_points, seed, workers);
}

StabilityProfile probe_randomized_stability(const LearnerSpec& spec,
                                            const std::function<Observation(Rng&)>& sampler,
                                            const std::vector<int>& sizes, int trials,
                                            int inner_reps, int eval_points, std::uint64_t seed,
                                            int workers) {
    if (inner_reps < 1) throw std::invalid_argument("inner_reps must be at least 1");
    return run_probe(spec, sampler, sizes, trials, inner_reps, eval_points, seed, workers);
}

std::string profile_to_csv(const StabilityProfile& profile) {
    std::ostringstream out;
    out << "n_T,beta_hat,trials\n";
    for (const StabilityEntry& e : profile.entries) {
        out.precision(12);
        out << e.n_t << "," << e.beta_hat << "," << e.trials << "\n";
    }
    return out.str();
}

} // namespace cvstab
