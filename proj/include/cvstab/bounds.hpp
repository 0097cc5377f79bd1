#pragma once

#include <vector>

namespace cvstab {

// Inputs shared by every bound calculator. Stability enters either through
// the envelope constant c (uniform stability at size m is at most c/m) or
// through an explicit per-size sequence; the generic calculators require the
// sequence, the envelope calculators require c.
struct BoundInputs {
    long long n = 1000;
    int k = 5;
    double delta = 0.05;     // failure probability in (0,1)
    double big_l = 1.0;      // bound L on the absolute loss
    double c = 1.0;          // stability envelope constant
    double m_const = 1.0;    // scale constant M where a construction or model family needs one
    long long model_count = 1;
    // Optional explicit stability sequence, 1-indexed by training size:
    // beta_sequence[i-1] bounds the stability at size i. Must cover sizes up
    // to n where required.
    std::vector<double> beta_sequence;

    long long n_train() const { return n - n / k; }
};

// One-sided sampling deviation sqrt(log(1/delta) / (2n)) shared by the upper
// bounds below.
double deviation(const BoundInputs& inp);

// Plain K-fold deviation bound with an explicit stability sequence:
// sum of beta over sizes n_T+1..n, plus (4 beta_{n_T} n_T + 2L) sqrt(log(1/delta)/(2n)).
double kfold_upper_bound_generic(const BoundInputs& inp);

// Same bound under the c/m stability envelope:
// c log(K/(K-1)) + (4c + 2L) sqrt(log(1/delta)/(2n)).
// The first term survives n -> infinity, which is the point: plain K-fold
// does not concentrate around the full-sample risk.
double kfold_upper_bound(const BoundInputs& inp);

// Deviation bound for the corrected estimator. With a beta_sequence:
// 2 (beta_n + beta_{n_T}) + 3 (4 beta_{n_T} n_T + 2L) sqrt(log(1/delta)/(2n));
// under the envelope: 6c/n + 3 (4c + 2L) sqrt(log(1/delta)/(2n)).
// Both vanish as n grows.
double corrected_upper_bound(const BoundInputs& inp);

// Uniform deviation bound for selecting among model_count learners by the
// corrected estimator: 12M/n + 6 (4M + 2L) sqrt(log(model_count/delta)/n),
// with M = m_const the shared stability scale.
double model_selection_bound(const BoundInputs& inp);

// The two constructions' floors on the plain K-fold bias:
// rerm = 2 log(K/(K-1)) (1 - 1/M), sgd = (1/3) log(K/(K-1)).
struct LowerBounds {
    double rerm = 0.0;
    double sgd = 0.0;
};
LowerBounds kfold_lower_bounds(const BoundInputs& inp);

} // namespace cvstab
