#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cvstab/bounds.hpp"
#include "cvstab/rng.hpp"

using cvstab::BoundInputs;

namespace {

BoundInputs reference_inputs() {
    BoundInputs inp;
    inp.n = 1000;
    inp.k = 5;
    inp.delta = 0.05;
    inp.big_l = 1.0;
    inp.c = 1.0;
    return inp;
}

std::vector<double> harmonic_betas(long long n) {
    std::vector<double> betas(static_cast<std::size_t>(n));
    for (long long i = 1; i <= n; ++i) {
        betas[static_cast<std::size_t>(i - 1)] = 1.0 / static_cast<double>(i);
    }
    return betas;
}

} // namespace

TEST_SUITE_BEGIN("bounds");

TEST_CASE("deviation term at the reference point") {
    BoundInputs inp = reference_inputs();
    CHECK(cvstab::deviation(inp) == doctest::Approx(0.038702275602049495).epsilon(1e-14));
}

TEST_CASE("generic deviation bound with vanishing stability") {
    BoundInputs inp = reference_inputs();
    inp.beta_sequence.assign(1000, 0.0);
    CHECK(cvstab::kfold_upper_bound_generic(inp) ==
          doctest::Approx(0.07740455120409899).epsilon(1e-13));
}

TEST_CASE("generic deviation bound with harmonic stability") {
    BoundInputs inp = reference_inputs();
    inp.beta_sequence = harmonic_betas(1000);
    // tail sum over sizes 801..1000 of 1/i
    double tail = 0.0;
    for (int i = 801; i <= 1000; ++i) tail += 1.0 / i;
    CHECK(tail == doctest::Approx(0.2230185981891976).epsilon(1e-13));
    CHECK(cvstab::kfold_upper_bound_generic(inp) ==
          doctest::Approx(0.4552322518014945).epsilon(1e-13));
}

TEST_CASE("envelope bounds at the reference point") {
    BoundInputs inp = reference_inputs();
    CHECK(cvstab::kfold_upper_bound(inp) ==
          doctest::Approx(0.4553572049265067).epsilon(1e-13));
    CHECK(cvstab::corrected_upper_bound(inp) ==
          doctest::Approx(0.7026409608368909).epsilon(1e-13));
}

TEST_CASE("corrected bound uses the stability sequence when one is given") {
    BoundInputs inp = reference_inputs();
    inp.beta_sequence = harmonic_betas(1000);
    CHECK(cvstab::corrected_upper_bound(inp) ==
          doctest::Approx(0.7011409608368909).epsilon(1e-13));
}

TEST_CASE("model selection bound at the reference point") {
    BoundInputs inp = reference_inputs();
    inp.m_const = 1.0;
    inp.model_count = 1000;
    CHECK(cvstab::model_selection_bound(inp) ==
          doctest::Approx(3.594585640021299).epsilon(1e-13));
}

TEST_CASE("model selection bound grows with the grid and shrinks with confidence") {
    BoundInputs inp = reference_inputs();
    inp.model_count = 10;
    double ten = cvstab::model_selection_bound(inp);
    inp.model_count = 1000;
    double thousand = cvstab::model_selection_bound(inp);
    CHECK(thousand > ten);

    inp.delta = 0.01;
    double tighter_confidence = cvstab::model_selection_bound(inp);
    CHECK(tighter_confidence > thousand);
}

TEST_CASE("large sample limits separate the two estimators") {
    BoundInputs inp = reference_inputs();
    double envelope = inp.c * std::log(static_cast<double>(inp.k) / (inp.k - 1));

    inp.n = 100000000LL;
    double corrected_8 = cvstab::corrected_upper_bound(inp);
    double standard_8 = cvstab::kfold_upper_bound(inp);
    inp.n = 1000000000LL;
    double corrected_9 = cvstab::corrected_upper_bound(inp);
    double standard_9 = cvstab::kfold_upper_bound(inp);

    CHECK(corrected_9 < corrected_8);
    CHECK(corrected_9 < 1e-3);
    CHECK(standard_9 < standard_8);
    CHECK(standard_9 > envelope);
    CHECK(standard_9 - envelope < 1e-3);
}

TEST_CASE("bias floors at the reference constructions") {
    BoundInputs inp = reference_inputs();
    inp.m_const = 10.0;
    cvstab::LowerBounds lb = cvstab::kfold_lower_bounds(inp);
    CHECK(lb.rerm == doctest::Approx(0.4016583923655776).epsilon(1e-13));
    CHECK(lb.sgd == doctest::Approx(0.07438118377140325).epsilon(1e-13));

    inp.k = 2;
    CHECK(cvstab::kfold_lower_bounds(inp).sgd ==
          doctest::Approx(0.23104906018664842).epsilon(1e-13));
}

TEST_CASE("construction floor sits below the matching envelope bound") {
    cvstab::Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        int k = 2 + static_cast<int>(rng.next_below(9));
        double m = 5.0 + 20.0 * rng.next_unit();
        BoundInputs inp;
        inp.n = static_cast<long long>(k) * 200;
        inp.k = k;
        inp.delta = 0.05;
        inp.big_l = 1.0;
        inp.m_const = m;
        // the envelope constant 2 matches the stability scale of the construction
        inp.c = 2.0;
        CHECK(cvstab::kfold_lower_bounds(inp).rerm <= cvstab::kfold_upper_bound(inp));
    }
}

TEST_CASE("generic bounds reject stability sequences that stop short") {
    BoundInputs inp = reference_inputs();
    inp.beta_sequence = {0.5, 0.25}; // nowhere near covering n = 1000
    CHECK_THROWS_WITH_AS(cvstab::kfold_upper_bound_generic(inp),
                         doctest::Contains("missing an entry"), std::invalid_argument);
    CHECK_THROWS_AS(cvstab::corrected_upper_bound(inp), std::invalid_argument);
}

TEST_CASE("input validation") {
    BoundInputs inp = reference_inputs();
    inp.k = 1;
    CHECK_THROWS_AS(cvstab::kfold_upper_bound(inp), std::invalid_argument);
    inp = reference_inputs();
    inp.n = 1;
    CHECK_THROWS_AS(cvstab::kfold_upper_bound(inp), std::invalid_argument);
    inp = reference_inputs();
    inp.delta = 0.0;
    CHECK_THROWS_AS(cvstab::kfold_upper_bound(inp), std::invalid_argument);
    inp = reference_inputs();
    inp.delta = 1.0;
    CHECK_THROWS_AS(cvstab::corrected_upper_bound(inp), std::invalid_argument);
    inp = reference_inputs();
    inp.big_l = -1.0;
    CHECK_THROWS_AS(cvstab::kfold_upper_bound(inp), std::invalid_argument);
    inp = reference_inputs();
    inp.c = -0.5;
    CHECK_THROWS_AS(cvstab::kfold_upper_bound(inp), std::invalid_argument);
    inp = reference_inputs();
    inp.m_const = 0.0;
    CHECK_THROWS_AS(cvstab::model_selection_bound(inp), std::invalid_argument);
    inp = reference_inputs();
    inp.model_count = 0;
    CHECK_THROWS_AS(cvstab::model_selection_bound(inp), std::invalid_argument);
    inp = reference_inputs();
    inp.delta = -0.1;
    CHECK_THROWS_AS(cvstab::deviation(inp), std::invalid_argument);
}

TEST_SUITE_END();
