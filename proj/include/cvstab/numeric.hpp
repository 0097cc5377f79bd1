#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace cvstab {

// Neumaier-compensated sum. Risk estimates are compared at tolerances near
// machine precision, so plain left-to-right summation is not good enough.
inline double compensated_sum(const std::vector<double>& xs) {
    double s = 0.0, comp = 0.0;
    for (double x : xs) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            comp += (s - t) + x;
        } else {
            comp += (x - t) + s;
        }
        s = t;
    }
    return s + comp;
}

inline double mean(const std::vector<double>& xs) {
    return xs.empty() ? 0.0 : compensated_sum(xs) / static_cast<double>(xs.size());
}

// Unbiased sample standard deviation (zero for fewer than two points).
inline double sample_sd(const std::vector<double>& xs) {
    std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double m = mean(xs);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
    return std::sqrt(compensated_sum(sq) / static_cast<double>(n - 1));
}

inline double standard_error(const std::vector<double>& xs) {
    return xs.empty() ? 0.0 : sample_sd(xs) / std::sqrt(static_cast<double>(xs.size()));
}

// Least squares slope of y against x.
inline double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    if (n < 2 || y.size() != n) return 0.0;
    double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx == 0.0 ? 0.0 : sxy / sxx;
}

} // namespace cvstab
