#include "cvstab/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cvstab/numeric.hpp"

namespace cvstab {

namespace {

void validate(const BoundInputs& inp) {
    if (inp.k < 2) throw std::invalid_argument("fold count k must be at least 2");
    if (inp.n < 2) throw std::invalid_argument("n must be at least 2");
    if (!(inp.delta > 0.0) || !(inp.delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0,1)");
    }
    if (inp.big_l < 0.0) throw std::invalid_argument("loss bound must be nonnegative");
    if (inp.c < 0.0) throw std::invalid_argument("stability constant must be nonnegative");
    if (!(inp.m_const > 0.0)) throw std::invalid_argument("m_const must be positive");
    if (inp.model_count < 1) throw std::invalid_argument("model_count must be at least 1");
}

double beta_at(const BoundInputs& inp, long long size) {
    if (size < 1 || static_cast<long long>(inp.beta_sequence.size()) < size) {
        throw std::invalid_argument("beta sequence missing an entry for size " +
                                    std::to_string(size));
    }
    return inp.beta_sequence[static_cast<std::size_t>(size - 1)];
}

double fold_ratio_log(const BoundInputs& inp) {
    return std::log(static_cast<double>(inp.k) / (inp.k - 1.0));
}

} // namespace

double deviation(const BoundInputs& inp) {
    validate(inp);
    return std::sqrt(std::log(1.0 / inp.delta) / (2.0 * static_cast<double>(inp.n)));
}

double kfold_upper_bound_generic(const BoundInputs& inp) {
    validate(inp);
    long long n_t = inp.n_train();
    beta_at(inp, inp.n); // fail early when the tail is not covered
    std::vector<double> tail;
    tail.reserve(static_cast<std::size_t>(inp.n - n_t));
    for (long long i = n_t + 1; i <= inp.n; ++i) tail.push_back(beta_at(inp, i));
    return compensated_sum(tail) +
           (4.0 * beta_at(inp, n_t) * static_cast<double>(n_t) + 2.0 * inp.big_l) *
               deviation(inp);
}

double kfold_upper_bound(const BoundInputs& inp) {
    validate(inp);
    return inp.c * fold_ratio_log(inp) + (4.0 * inp.c + 2.0 * inp.big_l) * deviation(inp);
}

double corrected_upper_bound(const BoundInputs& inp) {
    validate(inp);
    if (!inp.beta_sequence.empty()) {
        long long n_t = inp.n_train();
        return 2.0 * (beta_at(inp, inp.n) + beta_at(inp, n_t)) +
               3.0 * (4.0 * beta_at(inp, n_t) * static_cast<double>(n_t) + 2.0 * inp.big_l) *
                   deviation(inp);
    }
    return 6.0 * inp.c / static_cast<double>(inp.n) +
           3.0 * (4.0 * inp.c + 2.0 * inp.big_l) * deviation(inp);
}

double model_selection_bound(const BoundInputs& inp) {
    validate(inp);
    double m = inp.m_const;
    double dev = std::sqrt(std::log(static_cast<double>(inp.model_count) / inp.delta) /
                           static_cast<double>(inp.n));
    return 12.0 * m / static_cast<double>(inp.n) + 6.0 * (4.0 * m + 2.0 * inp.big_l) * dev;
}

LowerBounds kfold_lower_bounds(const BoundInputs& inp) {
    validate(inp);
    double ratio = fold_ratio_log(inp);
    LowerBounds out;
    out.rerm = 2.0 * ratio * (1.0 - 1.0 / inp.m_const);
    out.sgd = ratio / 3.0;
    return out;
}

} // namespace cvstab
