#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cvstab/errors.hpp"

namespace cvstab {

// One labeled sample: feature vector plus a real target. Classification
// tasks encode labels as -1 / +1 targets.
struct Observation {
    std::vector<double> x;
    double y = 0.0;
};

struct Dataset {
    std::vector<Observation> rows;
    int d = 0;

    int n() const { return static_cast<int>(rows.size()); }
};

// Builds a dataset from rows, checking that dimensions agree and every entry
// is finite.
inline Dataset make_dataset(std::vector<Observation> rows) {
    Dataset ds;
    if (rows.empty()) throw DataError("dataset must contain at least one row");
    ds.d = static_cast<int>(rows.front().x.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Observation& o = rows[i];
        if (static_cast<int>(o.x.size()) != ds.d) {
            throw DataError("row " + std::to_string(i + 1) + " has inconsistent dimension");
        }
        if (!std::isfinite(o.y)) {
            throw DataError("non-finite target at row " + std::to_string(i + 1));
        }
        for (double v : o.x) {
            if (!std::isfinite(v)) {
                throw DataError("non-finite feature at row " + std::to_string(i + 1));
            }
        }
    }
    ds.rows = std::move(rows);
    return ds;
}

} // namespace cvstab
