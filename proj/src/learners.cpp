#include "cvstab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cvstab/linalg.hpp"
#include "cvstab/numeric.hpp"
#include "cvstab/rng.hpp"

namespace cvstab {

std::string learner_kind_name(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::constant: return "constant";
        case LearnerKind::rerm1d: return "rerm1d";
        case LearnerKind::ridge: return "ridge";
        case LearnerKind::kernel_ridge_sigmoid: return "kernel_ridge_sigmoid";
        case LearnerKind::hinge_sgd: return "hinge_sgd";
        case LearnerKind::sgd_quadratic: return "sgd_quadratic";
    }
    return "unknown";
}

std::optional<LearnerKind> learner_kind_from_name(const std::string& name) {
    for (LearnerKind k : {LearnerKind::constant, LearnerKind::rerm1d, LearnerKind::ridge,
                          LearnerKind::kernel_ridge_sigmoid, LearnerKind::hinge_sgd,
                          LearnerKind::sgd_quadratic}) {
        if (learner_kind_name(k) == name) return k;
    }
    return std::nullopt;
}

namespace {

void check_train_indices(const Dataset& data, const IndexSet& train) {
    if (train.empty()) throw std::invalid_argument("training index set is empty");
    for (int idx : train) {
        if (idx < 0 || idx >= data.n()) {
            throw std::invalid_argument("training index " + std::to_string(idx) +
                                        " out of range for n=" + std::to_string(data.n()));
        }
    }
}

double resolve_rerm_lambda(const LearnerSpec& spec, int m) {
    if (spec.size_adaptive_m) {
        double big_m = *spec.size_adaptive_m;
        if (m < 2) throw FitError("size adaptive regularization needs at least 2 points");
        double lam = 1.0 / std::log(static_cast<double>(m)) - 1.0 / (big_m * big_m);
        if (!(lam > 0.0)) {
            throw FitError("size adaptive regularization not positive at m=" + std::to_string(m));
        }
        return lam;
    }
    if (!(spec.regularization > 0.0)) {
        throw std::invalid_argument("rerm1d requires a positive regularization");
    }
    return spec.regularization;
}

Predictor fit_rerm1d(const LearnerSpec& spec, const Dataset& data, const IndexSet& train) {
    if (data.d != 1) throw std::invalid_argument("rerm1d requires 1-dimensional features");
    int m = static_cast<int>(train.size());
    double lam = resolve_rerm_lambda(spec, m);
    double sxy = 0.0, sxx = 0.0;
    for (int idx : train) {
        const Observation& o = data.rows[static_cast<std::size_t>(idx)];
        sxy += o.x[0] * o.y;
        sxx += o.x[0] * o.x[0];
    }
    Predictor pred;
    pred.kind = LearnerKind::rerm1d;
    pred.scalar = (sxy / m) / (sxx / m + lam);
    pred.loss_bound = spec.loss_bound;
    return pred;
}

Predictor fit_ridge(const LearnerSpec& spec, const Dataset& data, const IndexSet& train) {
    if (spec.regularization < 0.0) throw std::invalid_argument("ridge requires a nonnegative regularization");
    int d = data.d;
    int m = static_cast<int>(train.size());
    std::vector<double> gram(static_cast<std::size_t>(d) * d, 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(d), 0.0);
    for (int idx : train) {
        const Observation& o = data.rows[static_cast<std::size_t>(idx)];
        for (int i = 0; i < d; ++i) {
            rhs[static_cast<std::size_t>(i)] += o.x[static_cast<std::size_t>(i)] * o.y;
            for (int j = 0; j <= i; ++j) {
                gram[static_cast<std::size_t>(i) * d + j] +=
                    o.x[static_cast<std::size_t>(i)] * o.x[static_cast<std::size_t>(j)];
            }
        }
    }
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double v = gram[static_cast<std::size_t>(i) * d + j] / m;
            gram[static_cast<std::size_t>(i) * d + j] = v;
            gram[static_cast<std::size_t>(j) * d + i] = v;
        }
        gram[static_cast<std::size_t>(i) * d + i] += spec.regularization;
        rhs[static_cast<std::size_t>(i)] /= m;
    }
    Predictor pred;
    pred.kind = LearnerKind::ridge;
    pred.weights = chol_solve(std::move(gram), d, std::move(rhs));
    pred.loss_bound = spec.loss_bound;
    return pred;
}

Predictor fit_kernel_ridge(const LearnerSpec& spec, const Dataset& data, const IndexSet& train) {
    if (!(spec.regularization > 0.0)) {
        throw std::invalid_argument("kernel ridge requires a positive regularization");
    }
    int m = static_cast<int>(train.size());
    double tau = spec.kernel_scale.value_or(1.0 / data.d);
    std::vector<Observation> support;
    support.reserve(static_cast<std::size_t>(m));
    for (int idx : train) support.push_back(data.rows[static_cast<std::size_t>(idx)]);
    // Regularized Gram system (G + m lambda I) alpha = y.
    std::vector<double> g(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> y(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        y[static_cast<std::size_t>(i)] = support[static_cast<std::size_t>(i)].y;
        for (int j = 0; j <= i; ++j) {
            double v = std::tanh(tau * dot(support[static_cast<std::size_t>(i)].x,
                                           support[static_cast<std::size_t>(j)].x));
            g[static_cast<std::size_t>(i) * m + j] = v;
            g[static_cast<std::size_t>(j) * m + i] = v;
        }
        g[static_cast<std::size_t>(i) * m + i] += m * spec.regularization;
    }
    Predictor pred;
    pred.kind = LearnerKind::kernel_ridge_sigmoid;
    pred.alphas = chol_solve(std::move(g), m, std::move(y));
    pred.support = std::move(support);
    pred.tau = tau;
    pred.loss_bound = spec.loss_bound;
    return pred;
}

// Classic projected stochastic subgradient scheme for the L2-regularized
// hinge objective lambda/2 |w|^2 + mean hinge: step sizes 1/(lambda k), a
// shrink-then-add update, and projection onto the ball of radius
// 1/sqrt(lambda) that contains the optimum.
Predictor fit_hinge_sgd(const LearnerSpec& spec, const Dataset& data, const IndexSet& train) {
    if (!(spec.regularization > 0.0)) throw std::invalid_argument("hinge_sgd requires a positive regularization");
    if (spec.passes < 1) throw std::invalid_argument("hinge_sgd requires at least one pass");
    double lam = spec.regularization;
    int d = data.d;
    int m = static_cast<int>(train.size());
    std::vector<double> w(static_cast<std::size_t>(d), 0.0);
    Rng rng(spec.seed);
    std::vector<int> order(train.begin(), train.end());
    long long k = 0;
    double radius = 1.0 / std::sqrt(lam);
    for (int pass = 0; pass < spec.passes; ++pass) {
        shuffle(order, rng);
        for (int idx : order) {
            ++k;
            const Observation& o = data.rows[static_cast<std::size_t>(idx)];
            double alpha = 1.0 / (lam * static_cast<double>(k));
            double margin = o.y * dot(w, o.x);
            for (int i = 0; i < d; ++i) w[static_cast<std::size_t>(i)] *= (1.0 - alpha * lam);
            if (margin < 1.0) {
                for (int i = 0; i < d; ++i) {
                    w[static_cast<std::size_t>(i)] += alpha * o.y * o.x[static_cast<std::size_t>(i)];
                }
            }
            double nrm = norm2(w);
            if (nrm > radius) {
                double scale = radius / nrm;
                for (double& wi : w) wi *= scale;
            }
        }
    }
    (void)m;
    Predictor pred;
    pred.kind = LearnerKind::hinge_sgd;
    pred.weights = std::move(w);
    pred.loss_bound = spec.loss_bound;
    return pred;
}

Predictor fit_sgd_quadratic(const LearnerSpec& spec, const Dataset& data, const IndexSet& train) {
    if (spec.sgd_steps < 1) throw std::invalid_argument("sgd_quadratic requires at least one step");
    int d = data.d;
    int m = static_cast<int>(train.size());
    std::vector<double> a = spec.a_matrix;
    if (a.empty()) {
        // Default rank deficient choice: zero out the first diagonal entry so
        // the direction e1 is in the null space.
        a.assign(static_cast<std::size_t>(d) * d, 0.0);
        for (int i = 1; i < d; ++i) a[static_cast<std::size_t>(i) * d + i] = 1.0;
    }
    if (a.size() != static_cast<std::size_t>(d) * d) {
        throw std::invalid_argument("sgd_quadratic matrix must be d x d");
    }
    if (spec.schedule.kind == StepSchedule::Kind::fixed_list &&
        static_cast<int>(spec.schedule.values.size()) < spec.sgd_steps) {
        throw std::invalid_argument("step schedule shorter than the step count");
    }
    std::vector<double> w(static_cast<std::size_t>(d), 0.0);
    std::vector<double> aw(static_cast<std::size_t>(d), 0.0);
    Rng rng(spec.seed);
    double log_step = std::log(static_cast<double>(m)) / spec.sgd_steps;
    for (int step = 0; step < spec.sgd_steps; ++step) {
        double alpha = spec.schedule.kind == StepSchedule::Kind::log_over_t
                           ? log_step
                           : spec.schedule.values[static_cast<std::size_t>(step)];
        int pick = train[static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(m)))];
        const Observation& o = data.rows[static_cast<std::size_t>(pick)];
        for (int i = 0; i < d; ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) {
                s += a[static_cast<std::size_t>(i) * d + j] * w[static_cast<std::size_t>(j)];
            }
            aw[static_cast<std::size_t>(i)] = s;
        }
        for (int i = 0; i < d; ++i) {
            w[static_cast<std::size_t>(i)] -=
                alpha * (aw[static_cast<std::size_t>(i)] - o.y * o.x[static_cast<std::size_t>(i)]);
        }
    }
    Predictor pred;
    pred.kind = LearnerKind::sgd_quadratic;
    pred.weights = std::move(w);
    pred.a_matrix = std::move(a);
    pred.loss_bound = spec.loss_bound;
    return pred;
}

} // namespace

double Predictor::predict(const std::vector<double>& x) const {
    switch (kind) {
        case LearnerKind::constant:
            return 0.0;
        case LearnerKind::rerm1d:
            return scalar * x[0];
        case LearnerKind::ridge:
        case LearnerKind::hinge_sgd:
        case LearnerKind::sgd_quadratic:
            return dot(weights, x);
        case LearnerKind::kernel_ridge_sigmoid: {
            double s = 0.0;
            for (std::size_t i = 0; i < support.size(); ++i) {
                s += alphas[i] * std::tanh(tau * dot(support[i].x, x));
            }
            return s;
        }
    }
    return 0.0;
}

double Predictor::loss(const Observation& o) const {
    switch (kind) {
        case LearnerKind::constant:
            return scalar;
        case LearnerKind::rerm1d:
        case LearnerKind::ridge:
        case LearnerKind::kernel_ridge_sigmoid: {
            double r = o.y - predict(o.x);
            return r * r;
        }
        case LearnerKind::hinge_sgd: {
            double margin = 1.0 - o.y * predict(o.x);
            return margin > 0.0 ? margin : 0.0;
        }
        case LearnerKind::sgd_quadratic: {
            int d = static_cast<int>(weights.size());
            double quad = 0.0;
            for (int i = 0; i < d; ++i) {
                double s = 0.0;
                for (int j = 0; j < d; ++j) {
                    s += a_matrix[static_cast<std::size_t>(i) * d + j] *
                         weights[static_cast<std::size_t>(j)];
                }
                quad += weights[static_cast<std::size_t>(i)] * s;
            }
            return 0.5 * quad - o.y * dot(o.x, weights);
        }
    }
    return 0.0;
}

Predictor fit(const LearnerSpec& spec, const Dataset& data, const IndexSet& train) {
    if (spec.kind == LearnerKind::constant) {
        Predictor pred;
        pred.kind = LearnerKind::constant;
        pred.scalar = spec.constant_loss;
        pred.loss_bound = spec.loss_bound;
        return pred;
    }
    check_train_indices(data, train);
    switch (spec.kind) {
        case LearnerKind::rerm1d: return fit_rerm1d(spec, data, train);
        case LearnerKind::ridge: return fit_ridge(spec, data, train);
        case LearnerKind::kernel_ridge_sigmoid: return fit_kernel_ridge(spec, data, train);
        case LearnerKind::hinge_sgd: return fit_hinge_sgd(spec, data, train);
        case LearnerKind::sgd_quadratic: return fit_sgd_quadratic(spec, data, train);
        case LearnerKind::constant: break;
    }
    throw FitError("unknown learner kind");
}

double empirical_risk(const Predictor& pred, const Dataset& data, const IndexSet& subset) {
    if (subset.empty()) throw std::invalid_argument("empirical_risk over an empty subset");
    std::vector<double> losses;
    losses.reserve(subset.size());
    for (int idx : subset) {
        if (idx < 0 || idx >= data.n()) {
            throw std::invalid_argument("empirical_risk index out of range");
        }
        losses.push_back(pred.loss(data.rows[static_cast<std::size_t>(idx)]));
    }
    return mean(losses);
}

double schedule_sum(const LearnerSpec& spec, int m) {
    if (spec.schedule.kind == StepSchedule::Kind::log_over_t) {
        return std::log(static_cast<double>(m));
    }
    double s = 0.0;
    for (int step = 0; step < spec.sgd_steps; ++step) {
        s += spec.schedule.values[static_cast<std::size_t>(step)];
    }
    return s;
}

} // namespace cvstab
