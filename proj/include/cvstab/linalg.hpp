#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cvstab/errors.hpp"

namespace cvstab {

// Solve S x = b for a symmetric positive definite S (dense, row major,
// dim x dim) by Cholesky factorization. The systems solved here are small:
// d x d normal equations for linear models and m x m regularized Gram
// matrices, with d and m at most a few hundred.
//
// A non-positive pivot means S is not positive definite; that is reported
// with the offending pivot index and never papered over with jitter.
inline std::vector<double> chol_solve(std::vector<double> s, int dim, std::vector<double> b) {
    if (dim <= 0 || s.size() != static_cast<std::size_t>(dim) * dim ||
        b.size() != static_cast<std::size_t>(dim)) {
        throw FitError("chol_solve: inconsistent dimensions");
    }
    // In-place lower Cholesky: s becomes L with S = L L^T.
    for (int j = 0; j < dim; ++j) {
        double diag = s[static_cast<std::size_t>(j) * dim + j];
        for (int k = 0; k < j; ++k) {
            double ljk = s[static_cast<std::size_t>(j) * dim + k];
            diag -= ljk * ljk;
        }
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            throw FitError("matrix not positive definite: non-positive pivot at index " +
                           std::to_string(j));
        }
        double ljj = std::sqrt(diag);
        s[static_cast<std::size_t>(j) * dim + j] = ljj;
        for (int i = j + 1; i < dim; ++i) {
            double v = s[static_cast<std::size_t>(i) * dim + j];
            for (int k = 0; k < j; ++k) {
                v -= s[static_cast<std::size_t>(i) * dim + k] *
                     s[static_cast<std::size_t>(j) * dim + k];
            }
            s[static_cast<std::size_t>(i) * dim + j] = v / ljj;
        }
    }
    // Forward substitution L y = b, then back substitution L^T x = y.
    for (int i = 0; i < dim; ++i) {
        double v = b[i];
        for (int k = 0; k < i; ++k) v -= s[static_cast<std::size_t>(i) * dim + k] * b[k];
        b[i] = v / s[static_cast<std::size_t>(i) * dim + i];
    }
    for (int i = dim - 1; i >= 0; --i) {
        double v = b[i];
        for (int k = i + 1; k < dim; ++k) v -= s[static_cast<std::size_t>(k) * dim + i] * b[k];
        b[i] = v / s[static_cast<std::size_t>(i) * dim + i];
    }
    return b;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) {
    return std::sqrt(dot(a, a));
}

} // namespace cvstab
