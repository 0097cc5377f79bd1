#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cvstab {

// Sorted, duplicate-free sample indices in [0, n).
using IndexSet = std::vector<int>;

struct FoldPair {
    IndexSet train;
    IndexSet validation;
};

// A K-fold partition of [0, n): validation blocks are pairwise disjoint,
// cover every index, and each has exactly n/k elements; each train set is
// the complement of its validation set. These properties are what every
// estimator and bound in this library relies on, so externally supplied
// schemes should be run through verify_balance before use.
struct FoldScheme {
    int n = 0;
    int k = 0;
    std::optional<std::uint64_t> seed;
    std::vector<FoldPair> folds;

    int n_validation() const { return k > 0 ? n / k : 0; }
    int n_train() const { return n - n_validation(); }
};

// Builds a K-fold scheme. Without a seed the validation blocks are contiguous
// index ranges; with a seed the indices are shuffled first (Fisher-Yates
// driven by the splitmix64 generator in rng.hpp) and then blocked, so the
// same seed reproduces the same scheme on any platform.
//
// Requires k >= 2 and k | n; both violations throw std::invalid_argument.
FoldScheme build_kfold(int n, int k, std::optional<std::uint64_t> seed);

// Like build_kfold but when k does not divide n the trailing n mod k indices
// are dropped instead of failing. The number of dropped indices is written
// to *dropped when provided.
FoldScheme build_kfold_truncating(int n, int k, std::optional<std::uint64_t> seed,
                                  int* dropped = nullptr);

struct BalanceReport {
    bool ok = false;
    std::string violation; // empty when ok; otherwise names the first failed check
};

// Checks every FoldScheme invariant: fold count, validation cardinalities,
// disjointness, coverage of [0, n), sortedness, and train = complement.
// Never throws; failures come back as a structured report.
BalanceReport verify_balance(const FoldScheme& scheme);

nlohmann::json scheme_to_json(const FoldScheme& scheme);
FoldScheme scheme_from_json(const nlohmann::json& j);

} // namespace cvstab
