#include <doctest.h>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cvstab/folds.hpp"
#include "cvstab/rng.hpp"

using cvstab::BalanceReport;
using cvstab::FoldScheme;
using cvstab::build_kfold;
using cvstab::build_kfold_truncating;
using cvstab::verify_balance;

TEST_SUITE_BEGIN("folds");

TEST_CASE("contiguous scheme blocks indices in order") {
    FoldScheme s = build_kfold(10, 5, std::nullopt);
    CHECK(s.n == 10);
    CHECK(s.k == 5);
    CHECK(s.n_validation() == 2);
    CHECK(s.n_train() == 8);
    CHECK_FALSE(s.seed.has_value());
    for (int j = 0; j < 5; ++j) {
        REQUIRE(s.folds[j].validation.size() == 2);
        CHECK(s.folds[j].validation[0] == 2 * j);
        CHECK(s.folds[j].validation[1] == 2 * j + 1);
        CHECK(s.folds[j].train.size() == 8);
    }
    CHECK(verify_balance(s).ok);
}

TEST_CASE("seeded scheme is balanced, reproducible, and seed sensitive") {
    FoldScheme a = build_kfold(24, 4, 7);
    FoldScheme b = build_kfold(24, 4, 7);
    FoldScheme c = build_kfold(24, 4, 8);
    CHECK(verify_balance(a).ok);
    REQUIRE(a.folds.size() == b.folds.size());
    for (std::size_t j = 0; j < a.folds.size(); ++j) {
        CHECK(a.folds[j].validation == b.folds[j].validation);
        CHECK(a.folds[j].train == b.folds[j].train);
    }
    bool any_difference = false;
    for (std::size_t j = 0; j < a.folds.size(); ++j) {
        if (a.folds[j].validation != c.folds[j].validation) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("builder rejects bad shapes") {
    CHECK_THROWS_AS(build_kfold(10, 1, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(build_kfold(3, 5, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(build_kfold(10, 3, std::nullopt), std::invalid_argument);
    try {
        build_kfold(10, 3, std::nullopt);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("truncating") != std::string::npos);
    }
}

TEST_CASE("truncating builder drops the remainder") {
    int dropped = -1;
    FoldScheme s = build_kfold_truncating(103, 5, std::nullopt, &dropped);
    CHECK(dropped == 3);
    CHECK(s.n == 100);
    CHECK(verify_balance(s).ok);

    FoldScheme exact = build_kfold_truncating(100, 5, std::nullopt, &dropped);
    CHECK(dropped == 0);
    CHECK(exact.n == 100);
    CHECK(verify_balance(exact).ok);
}

TEST_CASE("verify_balance flags each kind of corruption") {
    FoldScheme good = build_kfold(12, 3, 5);
    REQUIRE(verify_balance(good).ok);

    FoldScheme wrong_count = good;
    wrong_count.folds.pop_back();
    CHECK_FALSE(verify_balance(wrong_count).ok);

    FoldScheme wrong_card = good;
    wrong_card.folds[0].validation.pop_back();
    CHECK_FALSE(verify_balance(wrong_card).ok);

    FoldScheme out_of_range = good;
    out_of_range.folds[0].validation.back() = 99;
    CHECK_FALSE(verify_balance(out_of_range).ok);

    FoldScheme unsorted = good;
    std::swap(unsorted.folds[1].validation[0], unsorted.folds[1].validation[1]);
    CHECK_FALSE(verify_balance(unsorted).ok);

    FoldScheme duplicated = good;
    duplicated.folds[1].validation = duplicated.folds[0].validation;
    CHECK_FALSE(verify_balance(duplicated).ok);

    FoldScheme bad_train = good;
    bad_train.folds[2].train[0] = bad_train.folds[2].validation[0];
    BalanceReport r = verify_balance(bad_train);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.violation.empty());
}

TEST_CASE("json round trip preserves the scheme") {
    FoldScheme seeded = build_kfold(20, 4, 11);
    FoldScheme back = cvstab::scheme_from_json(cvstab::scheme_to_json(seeded));
    CHECK(back.n == seeded.n);
    CHECK(back.k == seeded.k);
    REQUIRE(back.seed.has_value());
    CHECK(*back.seed == 11);
    REQUIRE(back.folds.size() == seeded.folds.size());
    for (std::size_t j = 0; j < seeded.folds.size(); ++j) {
        CHECK(back.folds[j].train == seeded.folds[j].train);
        CHECK(back.folds[j].validation == seeded.folds[j].validation);
    }
    CHECK(verify_balance(back).ok);

    FoldScheme plain = build_kfold(9, 3, std::nullopt);
    FoldScheme plain_back = cvstab::scheme_from_json(cvstab::scheme_to_json(plain));
    CHECK_FALSE(plain_back.seed.has_value());
    CHECK(verify_balance(plain_back).ok);
}

TEST_CASE("random balanced builds always verify") {
    cvstab::Rng rng(404);
    for (int trial = 0; trial < 50; ++trial) {
        int k = 2 + static_cast<int>(rng.next_below(7));
        int m = 1 + static_cast<int>(rng.next_below(12));
        int n = k * m;
        FoldScheme contiguous = build_kfold(n, k, std::nullopt);
        FoldScheme seeded = build_kfold(n, k, rng.next_u64());
        CHECK(verify_balance(contiguous).ok);
        CHECK(verify_balance(seeded).ok);
    }
}

TEST_SUITE_END();
