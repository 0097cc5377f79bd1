#include "cvstab/folds.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cvstab/rng.hpp"

namespace cvstab {

namespace {

FoldScheme blocks_from_order(const std::vector<int>& order, int n, int k,
                             std::optional<std::uint64_t> seed) {
    FoldScheme scheme;
    scheme.n = n;
    scheme.k = k;
    scheme.seed = seed;
    int nv = n / k;
    scheme.folds.resize(static_cast<std::size_t>(k));
    std::vector<char> in_validation(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < k; ++j) {
        FoldPair& fold = scheme.folds[static_cast<std::size_t>(j)];
        fold.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(j) * nv,
                               order.begin() + static_cast<std::ptrdiff_t>(j + 1) * nv);
        std::sort(fold.validation.begin(), fold.validation.end());
        std::fill(in_validation.begin(), in_validation.end(), 0);
        for (int idx : fold.validation) in_validation[static_cast<std::size_t>(idx)] = 1;
        fold.train.reserve(static_cast<std::size_t>(n - nv));
        for (int i = 0; i < n; ++i) {
            if (!in_validation[static_cast<std::size_t>(i)]) fold.train.push_back(i);
        }
    }
    return scheme;
}

} // namespace

FoldScheme build_kfold(int n, int k, std::optional<std::uint64_t> seed) {
    if (k < 2) throw std::invalid_argument("fold count k must be at least 2");
    if (n < k) throw std::invalid_argument("sample count n must be at least k");
    if (n % k != 0) {
        throw std::invalid_argument("n not divisible by k (n=" + std::to_string(n) +
                                    ", k=" + std::to_string(k) +
                                    "); use the truncating builder to drop the remainder");
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    if (seed) {
        Rng rng(*seed);
        shuffle(order, rng);
    }
    return blocks_from_order(order, n, k, seed);
}

FoldScheme build_kfold_truncating(int n, int k, std::optional<std::uint64_t> seed, int* dropped) {
    if (k < 2) throw std::invalid_argument("fold count k must be at least 2");
    if (n < k) throw std::invalid_argument("sample count n must be at least k");
    int rem = n % k;
    if (dropped) *dropped = rem;
    return build_kfold(n - rem, k, seed);
}

BalanceReport verify_balance(const FoldScheme& scheme) {
    BalanceReport report;
    auto fail = [&report](const std::string& what) {
        report.ok = false;
        report.violation = what;
        return report;
    };
    if (scheme.k < 2 || static_cast<int>(scheme.folds.size()) != scheme.k) {
        return fail("fold count: expected k >= 2 folds, scheme holds " +
                    std::to_string(scheme.folds.size()));
    }
    if (scheme.n < scheme.k || scheme.n % scheme.k != 0) {
        return fail("divisibility: n must be a positive multiple of k");
    }
    int nv = scheme.n / scheme.k;
    std::vector<int> validation_count(static_cast<std::size_t>(scheme.n), 0);
    for (int j = 0; j < scheme.k; ++j) {
        const FoldPair& fold = scheme.folds[static_cast<std::size_t>(j)];
        if (static_cast<int>(fold.validation.size()) != nv) {
            return fail("cardinality: validation set " + std::to_string(j) + " has " +
                        std::to_string(fold.validation.size()) + " indices, expected " +
                        std::to_string(nv));
        }
        for (std::size_t i = 0; i < fold.validation.size(); ++i) {
            int idx = fold.validation[i];
            if (idx < 0 || idx >= scheme.n) return fail("range: validation index out of [0, n)");
            if (i > 0 && fold.validation[i] <= fold.validation[i - 1]) {
                return fail("ordering: validation indices must be strictly increasing");
            }
            ++validation_count[static_cast<std::size_t>(idx)];
        }
    }
    for (int i = 0; i < scheme.n; ++i) {
        if (validation_count[static_cast<std::size_t>(i)] == 0) {
            return fail("coverage: index " + std::to_string(i) + " missing from every validation set");
        }
        if (validation_count[static_cast<std::size_t>(i)] > 1) {
            return fail("disjointness: index " + std::to_string(i) +
                        " appears in more than one validation set");
        }
    }
    // With disjoint covering validation blocks settled, each train set must be
    // the exact complement, which also gives every index k-1 train memberships.
    std::vector<char> in_validation(static_cast<std::size_t>(scheme.n), 0);
    for (int j = 0; j < scheme.k; ++j) {
        const FoldPair& fold = scheme.folds[static_cast<std::size_t>(j)];
        std::fill(in_validation.begin(), in_validation.end(), 0);
        for (int idx : fold.validation) in_validation[static_cast<std::size_t>(idx)] = 1;
        if (static_cast<int>(fold.train.size()) != scheme.n - nv) {
            return fail("complement: train set " + std::to_string(j) + " has wrong cardinality");
        }
        int prev = -1;
        for (int idx : fold.train) {
            if (idx < 0 || idx >= scheme.n || idx <= prev) {
                return fail("complement: train set " + std::to_string(j) +
                            " is not sorted within [0, n)");
            }
            if (in_validation[static_cast<std::size_t>(idx)]) {
                return fail("complement: train set " + std::to_string(j) +
                            " overlaps its validation set at index " + std::to_string(idx));
            }
            prev = idx;
        }
    }
    report.ok = true;
    return report;
}

nlohmann::json scheme_to_json(const FoldScheme& scheme) {
    nlohmann::json j;
    j["n"] = scheme.n;
    j["k"] = scheme.k;
    if (scheme.seed) {
        j["seed"] = *scheme.seed;
    } else {
        j["seed"] = nullptr;
    }
    j["folds"] = nlohmann::json::array();
    for (const FoldPair& fold : scheme.folds) {
        j["folds"].push_back({{"train", fold.train}, {"validation", fold.validation}});
    }
    return j;
}

FoldScheme scheme_from_json(const nlohmann::json& j) {
    FoldScheme scheme;
    scheme.n = j.at("n").get<int>();
    scheme.k = j.at("k").get<int>();
    if (j.contains("seed") && !j.at("seed").is_null()) {
        scheme.seed = j.at("seed").get<std::uint64_t>();
    }
    for (const auto& f : j.at("folds")) {
        FoldPair fold;
        fold.train = f.at("train").get<IndexSet>();
        fold.validation = f.at("validation").get<IndexSet>();
        scheme.folds.push_back(std::move(fold));
    }
    return scheme;
}

} // namespace cvstab
