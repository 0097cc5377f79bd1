#include "cvstab/oracles.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cvstab/estimators.hpp"
#include "cvstab/linalg.hpp"
#include "cvstab/numeric.hpp"
#include "cvstab/parallel.hpp"

namespace cvstab {

RiskValue RiskOracle::risk(const Predictor& pred) const {
    if (pred.kind == LearnerKind::constant) {
        return {pred.scalar, 0.0};
    }
    if (mode == Mode::exact) {
        if (!closed_form) throw std::logic_error("exact oracle has no closed form attached");
        return {closed_form(pred), 0.0};
    }
    if (!sampler) throw std::logic_error("monte carlo oracle has no sampler attached");
    if (mc_samples < 1) throw std::invalid_argument("mc_samples must be at least 1");
    Rng rng(seed);
    std::vector<double> losses(static_cast<std::size_t>(mc_samples));
    for (int i = 0; i < mc_samples; ++i) {
        losses[static_cast<std::size_t>(i)] = pred.loss(sampler(rng));
    }
    return {mean(losses), standard_error(losses)};
}

Dataset sample_dataset(const std::function<Observation(Rng&)>& sampler, int n,
                       std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_dataset needs n >= 1");
    Rng rng(seed);
    std::vector<Observation> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rows.push_back(sampler(rng));
    return make_dataset(std::move(rows));
}

RiskOracle make_mc_oracle(std::function<Observation(Rng&)> sampler, int mc_samples,
                          std::uint64_t seed) {
    RiskOracle o;
    o.mode = RiskOracle::Mode::monte_carlo;
    o.sampler = std::move(sampler);
    o.mc_samples = mc_samples;
    o.seed = seed;
    return o;
}

// --------------------------------------------------------------------------
// Deterministic one dimensional construction
// --------------------------------------------------------------------------

void validate_construction(const RermConstruction& c) {
    if (!(c.m_bound > 1.0)) throw std::invalid_argument("m_bound must exceed 1");
    if (c.k < 2) throw std::invalid_argument("fold count k must be at least 2");
    if (c.n < c.k || c.n % c.k != 0) {
        throw std::invalid_argument("n must be a positive multiple of k");
    }
    if (std::log(static_cast<double>(c.n)) > c.m_bound) {
        throw std::invalid_argument("construction requires n <= exp(m_bound)");
    }
    if (c.n - c.n / c.k < 2) {
        throw std::invalid_argument("training sets need at least 2 rows");
    }
}

LearnerSpec construction_spec(const RermConstruction& c) {
    LearnerSpec spec;
    spec.kind = LearnerKind::rerm1d;
    spec.size_adaptive_m = c.m_bound;
    spec.stability_constant = 2.0;                    // removal stability is at most 2/m
    spec.loss_bound = c.m_bound * c.m_bound;          // losses are (M - log(m)/M)^2 < M^2
    return spec;
}

std::function<Observation(Rng&)> construction_sampler(const RermConstruction& c) {
    double m = c.m_bound;
    return [m](Rng& rng) {
        double e = rng.next_unit() < 0.5 ? 1.0 : -1.0;
        return Observation{{e / m}, m * e};
    };
}

RiskOracle make_rerm_oracle(double m_bound) {
    RiskOracle o;
    o.mode = RiskOracle::Mode::exact;
    o.closed_form = [m_bound](const Predictor& pred) {
        if (pred.kind != LearnerKind::rerm1d) {
            throw std::invalid_argument("this oracle evaluates rerm1d predictors only");
        }
        double gap = m_bound - pred.scalar / m_bound;
        return gap * gap;
    };
    o.sampler = construction_sampler(RermConstruction{m_bound, 2, 2});
    return o;
}

RermReport rerm_exact_report(const RermConstruction& c) {
    validate_construction(c);
    double m = c.m_bound;
    double log_n = std::log(static_cast<double>(c.n));
    double log_nt = std::log(static_cast<double>(c.n - c.n / c.k));
    double ratio = std::log(static_cast<double>(c.k) / (c.k - 1.0));
    RermReport report;
    double full_gap = m - log_n / m;
    double fold_gap = m - log_nt / m;
    report.full_risk = full_gap * full_gap;
    report.fold_risk = fold_gap * fold_gap;
    report.kfold_bias = ratio * (2.0 - (log_n + log_nt) / (m * m));
    report.corrected_bias = 0.0;
    report.lower_bound = 2.0 * ratio * (1.0 - 1.0 / m);
    report.upper_bound = 2.0 * ratio;
    return report;
}

RermReport rerm_simulated_report(const RermConstruction& c, std::uint64_t seed) {
    validate_construction(c);
    Dataset data = sample_dataset(construction_sampler(c), c.n, seed);
    FoldScheme scheme = build_kfold(c.n, c.k, seed);
    FittedEstimate<Predictor> fitted =
        corrected_kfold_estimate(construction_spec(c), data, scheme);
    RiskOracle oracle = make_rerm_oracle(c.m_bound);

    RermReport report;
    report.full_risk = oracle.risk(*fitted.full_model).value;
    std::vector<double> fold_risks(fitted.fold_models.size());
    for (std::size_t j = 0; j < fitted.fold_models.size(); ++j) {
        fold_risks[j] = oracle.risk(fitted.fold_models[j]).value;
    }
    report.fold_risk = mean(fold_risks);
    report.kfold_bias = fitted.estimate.plain_value() - report.full_risk;
    report.corrected_bias = fitted.estimate.value - report.full_risk;
    double ratio = std::log(static_cast<double>(c.k) / (c.k - 1.0));
    report.lower_bound = 2.0 * ratio * (1.0 - 1.0 / c.m_bound);
    report.upper_bound = 2.0 * ratio;
    return report;
}

// --------------------------------------------------------------------------
// Stochastic gradient construction
// --------------------------------------------------------------------------

namespace {

std::vector<double> resolved_direction(const SgdConstruction& c) {
    if (!c.v.empty()) return c.v;
    std::vector<double> v(static_cast<std::size_t>(c.d), 0.0);
    v[0] = 1.0;
    return v;
}

std::vector<double> resolved_matrix(const SgdConstruction& c) {
    if (!c.a_matrix.empty()) return c.a_matrix;
    std::vector<double> a(static_cast<std::size_t>(c.d) * c.d, 0.0);
    for (int i = 1; i < c.d; ++i) a[static_cast<std::size_t>(i) * c.d + i] = 1.0;
    return a;
}

} // namespace

void validate_construction(const SgdConstruction& c) {
    if (!(c.m_bound > 1.0)) throw std::invalid_argument("m_bound must exceed 1");
    if (c.k < 2) throw std::invalid_argument("fold count k must be at least 2");
    if (c.n < c.k || c.n % c.k != 0) {
        throw std::invalid_argument("n must be a positive multiple of k");
    }
    if (std::log(static_cast<double>(c.n)) > c.m_bound) {
        throw std::invalid_argument("construction requires n <= exp(m_bound)");
    }
    if (c.n - c.n / c.k < 2) {
        throw std::invalid_argument("training sets need at least 2 rows");
    }
    if (c.t < 1) throw std::invalid_argument("step count t must be at least 1");
    if (c.d < 2) throw std::invalid_argument("dimension d must be at least 2");
    if (!(c.p_plus > 0.0) || !(c.p_plus < 1.0)) {
        throw std::invalid_argument("p_plus must lie in (0,1)");
    }
    if (!c.v.empty() && static_cast<int>(c.v.size()) != c.d) {
        throw std::invalid_argument("direction vector must have length d");
    }
    if (!c.a_matrix.empty() && c.a_matrix.size() != static_cast<std::size_t>(c.d) * c.d) {
        throw std::invalid_argument("a_matrix must be d x d");
    }
    std::vector<double> v = resolved_direction(c);
    if (std::abs(norm2(v) - 1.0) > 1e-9) {
        throw std::invalid_argument("direction vector must have unit norm");
    }
    std::vector<double> a = resolved_matrix(c);
    for (int i = 0; i < c.d; ++i) {
        double row = 0.0;
        for (int j = 0; j < c.d; ++j) {
            row += a[static_cast<std::size_t>(i) * c.d + j] * v[static_cast<std::size_t>(j)];
        }
        if (std::abs(row) > 1e-12) {
            throw std::invalid_argument("a_matrix must annihilate the direction vector");
        }
    }
}

LearnerSpec construction_spec(const SgdConstruction& c) {
    LearnerSpec spec;
    spec.kind = LearnerKind::sgd_quadratic;
    spec.sgd_steps = c.t;
    spec.schedule.kind = StepSchedule::Kind::log_over_t;
    spec.a_matrix = resolved_matrix(c);
    spec.loss_bound = c.m_bound;              // |loss| <= sum of steps = log(m) <= M
    spec.stability_constant = 3.0 * c.m_bound;
    return spec;
}

std::function<Observation(Rng&)> construction_sampler(const SgdConstruction& c) {
    std::vector<double> v = resolved_direction(c);
    double p = c.p_plus;
    return [v, p](Rng& rng) {
        double s = rng.next_unit() < p ? 1.0 : -1.0;
        std::vector<double> x(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) x[i] = s * v[i];
        return Observation{std::move(x), 1.0};
    };
}

RiskOracle make_sgd_oracle(const SgdConstruction& c) {
    validate_construction(c);
    std::vector<double> v = resolved_direction(c);
    double p = c.p_plus;
    RiskOracle o;
    o.mode = RiskOracle::Mode::exact;
    o.closed_form = [v, p](const Predictor& pred) {
        if (pred.kind != LearnerKind::sgd_quadratic || pred.weights.size() != v.size()) {
            throw std::invalid_argument("this oracle evaluates matching sgd_quadratic predictors");
        }
        int d = static_cast<int>(v.size());
        double quad = 0.0;
        for (int i = 0; i < d; ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) {
                s += pred.a_matrix[static_cast<std::size_t>(i) * d + j] *
                     pred.weights[static_cast<std::size_t>(j)];
            }
            quad += pred.weights[static_cast<std::size_t>(i)] * s;
        }
        return 0.5 * quad - (2.0 * p - 1.0) * dot(v, pred.weights);
    };
    o.sampler = construction_sampler(c);
    return o;
}

SgdBiasReport sgd_bias_report(const SgdConstruction& c, long long replicates, std::uint64_t seed,
                              int workers) {
    validate_construction(c);
    if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
    if (replicates > 100000000LL) throw std::invalid_argument("replicates capped at 1e8");

    const std::vector<double> v = resolved_direction(c);
    const LearnerSpec base_spec = construction_spec(c);
    const FoldScheme scheme = build_kfold(c.n, c.k, std::nullopt);
    const Observation canonical{v, 1.0};

    IndexSet every(static_cast<std::size_t>(c.n));
    std::iota(every.begin(), every.end(), 0);

    const int reps = static_cast<int>(replicates);
    std::vector<double> gaps(static_cast<std::size_t>(reps));
    parallel_for(reps, workers, [&](int r) {
        Rng stream = Rng::derive(seed, static_cast<std::uint64_t>(r));
        Dataset data;
        data.d = c.d;
        data.rows.reserve(static_cast<std::size_t>(c.n));
        for (int i = 0; i < c.n; ++i) {
            double s = stream.next_unit() < c.p_plus ? 1.0 : -1.0;
            std::vector<double> x(v.size());
            for (std::size_t q = 0; q < v.size(); ++q) x[q] = s * v[q];
            data.rows.push_back(Observation{std::move(x), 1.0});
        }
        std::vector<double> fold_losses(static_cast<std::size_t>(c.k));
        for (int j = 0; j < c.k; ++j) {
            LearnerSpec spec = base_spec;
            spec.seed = stream.next_u64();
            Predictor pred = fit(spec, data, scheme.folds[static_cast<std::size_t>(j)].train);
            fold_losses[static_cast<std::size_t>(j)] = pred.loss(canonical);
        }
        LearnerSpec spec = base_spec;
        spec.seed = stream.next_u64();
        Predictor full = fit(spec, data, every);
        gaps[static_cast<std::size_t>(r)] = mean(fold_losses) - full.loss(canonical);
    });

    SgdBiasReport report;
    report.expected_bias_mc = mean(gaps);
    report.mc_standard_error = standard_error(gaps);
    int n_t = c.n - c.n / c.k;
    report.expected_bias_closed_form =
        (schedule_sum(base_spec, c.n) - schedule_sum(base_spec, n_t)) * (2.0 * c.p_plus - 1.0);
    report.lower_bound =
        (2.0 * c.p_plus - 1.0) * std::log(static_cast<double>(c.k) / (c.k - 1.0));
    report.stability_bound = 3.0 * schedule_sum(base_spec, c.n) / (c.n - 1.0);
    report.replicates = replicates;
    return report;
}

// --------------------------------------------------------------------------
// Gaussian regression and classification families
// --------------------------------------------------------------------------

std::function<Observation(Rng&)> linear_gaussian_sampler(std::vector<double> theta_star,
                                                         double sigma) {
    return [theta = std::move(theta_star), sigma](Rng& rng) {
        std::vector<double> x(theta.size());
        for (double& xi : x) xi = rng.next_normal();
        double y = dot(theta, x) + sigma * rng.next_normal();
        return Observation{std::move(x), y};
    };
}

std::function<Observation(Rng&)> sign_linear_sampler(std::vector<double> theta_star,
                                                     double sigma) {
    return [theta = std::move(theta_star), sigma](Rng& rng) {
        std::vector<double> x(theta.size());
        for (double& xi : x) xi = rng.next_normal();
        double raw = dot(theta, x) + sigma * rng.next_normal();
        return Observation{std::move(x), raw < 0.0 ? -1.0 : 1.0};
    };
}

RiskOracle make_linear_gaussian_oracle(std::vector<double> theta_star, double sigma,
                                       RiskOracle::Mode mode, int mc_samples,
                                       std::uint64_t seed) {
    RiskOracle o;
    o.mode = mode;
    o.mc_samples = mc_samples;
    o.seed = seed;
    o.sampler = linear_gaussian_sampler(theta_star, sigma);
    o.closed_form = [theta = std::move(theta_star), sigma](const Predictor& pred) {
        std::vector<double> w;
        if (pred.kind == LearnerKind::ridge) {
            w = pred.weights;
        } else if (pred.kind == LearnerKind::rerm1d && theta.size() == 1) {
            w = {pred.scalar};
        } else {
            throw std::invalid_argument(
                "exact risk under this family needs a linear squared-loss predictor");
        }
        if (w.size() != theta.size()) {
            throw std::invalid_argument("predictor dimension does not match the family");
        }
        double sq = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            sq += (w[i] - theta[i]) * (w[i] - theta[i]);
        }
        return sq + sigma * sigma;
    };
    return o;
}

} // namespace cvstab
