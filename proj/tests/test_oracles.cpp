#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cvstab/learners.hpp"
#include "cvstab/oracles.hpp"

using cvstab::Dataset;
using cvstab::LearnerKind;
using cvstab::LearnerSpec;
using cvstab::Observation;
using cvstab::Predictor;
using cvstab::RermConstruction;
using cvstab::RermReport;
using cvstab::RiskOracle;
using cvstab::SgdConstruction;

TEST_SUITE_BEGIN("oracles");

TEST_CASE("closed form bias report at the reference parameters") {
    RermConstruction c;
    c.m_bound = 10.0;
    c.n = 100;
    c.k = 5;
    RermReport r = cvstab::rerm_exact_report(c);
    CHECK(r.full_risk == doctest::Approx(91.00173555244295).epsilon(1e-12));
    CHECK(r.fold_risk == doctest::Approx(91.42796830492215).epsilon(1e-12));
    CHECK(r.kfold_bias == doctest::Approx(0.4262327524791966).epsilon(1e-12));
    CHECK(r.corrected_bias == 0.0);
    CHECK(r.lower_bound == doctest::Approx(0.4016583923655776).epsilon(1e-12));
    CHECK(r.upper_bound == doctest::Approx(0.44628710262841953).epsilon(1e-12));
    CHECK(r.lower_bound <= r.kfold_bias);
    CHECK(r.kfold_bias <= r.upper_bound);

    RermConstruction two_fold = c;
    two_fold.k = 2;
    CHECK(cvstab::rerm_exact_report(two_fold).kfold_bias ==
          doctest::Approx(1.3272576766507453).epsilon(1e-12));
}

TEST_CASE("simulating the construction reproduces the closed forms") {
    RermConstruction c;
    c.m_bound = 10.0;
    c.n = 100;
    c.k = 5;
    RermReport exact = cvstab::rerm_exact_report(c);
    RermReport sim = cvstab::rerm_simulated_report(c, 77);
    CHECK(std::abs(sim.kfold_bias - exact.kfold_bias) <= 1e-9);
    CHECK(std::abs(sim.corrected_bias) <= 1e-12);
    CHECK(sim.full_risk == doctest::Approx(exact.full_risk).epsilon(1e-12));
}

TEST_CASE("construction parameter validation") {
    RermConstruction c;
    c.m_bound = 1.0; // must exceed 1
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
    c.m_bound = 10.0;
    c.k = 1;
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
    c.k = 3;
    c.n = 100; // not divisible by 3
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
    c.k = 5;
    c.m_bound = 4.0; // log(100) > 4 leaves the valid regime
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
    c.m_bound = 10.0;
    c.n = 2;
    c.k = 2; // training sets of one row are rejected
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
}

TEST_CASE("construction rows always multiply to one") {
    RermConstruction c;
    cvstab::Rng rng(5);
    auto sampler = cvstab::construction_sampler(c);
    for (int i = 0; i < 200; ++i) {
        Observation o = sampler(rng);
        REQUIRE(o.x.size() == 1);
        CHECK(std::abs(o.x[0]) == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(std::abs(o.y) == doctest::Approx(10.0).epsilon(1e-15));
        CHECK(o.x[0] * o.y == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("regression oracle evaluates (M - beta/M)^2") {
    RiskOracle oracle = cvstab::make_rerm_oracle(10.0);
    Predictor pred;
    pred.kind = LearnerKind::rerm1d;
    pred.scalar = std::log(100.0);
    double expect = std::pow(10.0 - std::log(100.0) / 10.0, 2.0);
    CHECK(oracle.risk(pred).value == doctest::Approx(expect).epsilon(1e-13));
    CHECK(oracle.risk(pred).standard_error == 0.0);

    Predictor flat;
    flat.kind = LearnerKind::constant;
    flat.scalar = 3.25;
    CHECK(oracle.risk(flat).value == 3.25);
}

TEST_CASE("gaussian oracle closed form and dimension checks") {
    RiskOracle oracle = cvstab::make_linear_gaussian_oracle({0.6, -0.8}, 0.5);
    Predictor pred;
    pred.kind = LearnerKind::ridge;
    pred.weights = {0.6, -0.8};
    CHECK(oracle.risk(pred).value == doctest::Approx(0.25).epsilon(1e-13));
    pred.weights = {0.0, 0.0};
    CHECK(oracle.risk(pred).value == doctest::Approx(1.25).epsilon(1e-13));

    pred.weights = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(oracle.risk(pred), std::invalid_argument);
    Predictor hinge;
    hinge.kind = LearnerKind::hinge_sgd;
    hinge.weights = {1.0, 1.0};
    CHECK_THROWS_AS(oracle.risk(hinge), std::invalid_argument);
}

TEST_CASE("monte carlo oracle is stable across calls and close to truth") {
    std::vector<double> theta{0.3, 0.7};
    auto sampler = cvstab::linear_gaussian_sampler(theta, 1.0);
    RiskOracle mc = cvstab::make_mc_oracle(sampler, 40000, 13);
    RiskOracle exact = cvstab::make_linear_gaussian_oracle(theta, 1.0);

    Predictor pred;
    pred.kind = LearnerKind::ridge;
    pred.weights = {0.1, 0.4};
    auto first = mc.risk(pred);
    auto second = mc.risk(pred);
    CHECK(first.value == second.value);
    CHECK(first.standard_error > 0.0);
    double truth = exact.risk(pred).value;
    CHECK(std::abs(first.value - truth) <= 4.0 * first.standard_error);
}

TEST_CASE("gradient construction closed forms at the reference parameters") {
    SgdConstruction c;
    cvstab::SgdBiasReport r = cvstab::sgd_bias_report(c, 1, 2);
    CHECK(r.expected_bias_closed_form == doctest::Approx(0.07438118377140325).epsilon(1e-12));
    CHECK(r.lower_bound == doctest::Approx(0.07438118377140325).epsilon(1e-12));
    CHECK(r.stability_bound == doctest::Approx(0.13955061169660885).epsilon(1e-12));
    CHECK(r.replicates == 1);
}

TEST_CASE("gradient construction monte carlo concentrates near the closed form") {
    SgdConstruction c;
    cvstab::SgdBiasReport r = cvstab::sgd_bias_report(c, 4000, 31);
    CHECK(r.mc_standard_error > 0.0);
    CHECK(std::abs(r.expected_bias_mc - r.expected_bias_closed_form) <=
          5.0 * r.mc_standard_error);

    cvstab::SgdBiasReport serial = cvstab::sgd_bias_report(c, 500, 8, 1);
    cvstab::SgdBiasReport threaded = cvstab::sgd_bias_report(c, 500, 8, 4);
    CHECK(serial.expected_bias_mc == threaded.expected_bias_mc);
    CHECK(serial.mc_standard_error == threaded.mc_standard_error);
}

TEST_CASE("gradient oracle risk matches hand values") {
    SgdConstruction c;
    RiskOracle oracle = cvstab::make_sgd_oracle(c);
    Predictor pred;
    pred.kind = LearnerKind::sgd_quadratic;
    pred.weights = {3.0, 0.0};
    pred.a_matrix = {0.0, 0.0, 0.0, 1.0};
    // risk(w) = 1/2 w'Aw - (2 p - 1) v.w with p = 2/3, v = e1
    CHECK(oracle.risk(pred).value == doctest::Approx(-1.0).epsilon(1e-13));
    pred.weights = {0.0, 1.0};
    CHECK(oracle.risk(pred).value == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("gradient construction validation") {
    SgdConstruction c;
    c.t = 0;
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
    c = SgdConstruction{};
    c.d = 1;
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
    c = SgdConstruction{};
    c.p_plus = 1.0;
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
    c = SgdConstruction{};
    c.v = {0.5, 0.5}; // not unit norm
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
    c = SgdConstruction{};
    c.v = {0.0, 1.0}; // default A = diag(0,1) does not annihilate e2
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
    c = SgdConstruction{};
    c.a_matrix = {1.0, 0.0, 0.0}; // wrong size
    CHECK_THROWS_AS(cvstab::validate_construction(c), std::invalid_argument);
}

TEST_CASE("sampling utilities are deterministic and well formed") {
    auto sampler = cvstab::sign_linear_sampler({1.0, -1.0}, 0.25);
    cvstab::Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        Observation o = sampler(rng);
        CHECK((o.y == 1.0 || o.y == -1.0));
        CHECK(o.x.size() == 2);
    }

    Dataset a = cvstab::sample_dataset(cvstab::linear_gaussian_sampler({0.5}, 1.0), 15, 9);
    Dataset b = cvstab::sample_dataset(cvstab::linear_gaussian_sampler({0.5}, 1.0), 15, 9);
    CHECK(a.n() == 15);
    CHECK(a.d == 1);
    for (int i = 0; i < 15; ++i) {
        CHECK(a.rows[static_cast<std::size_t>(i)].x == b.rows[static_cast<std::size_t>(i)].x);
        CHECK(a.rows[static_cast<std::size_t>(i)].y == b.rows[static_cast<std::size_t>(i)].y);
    }
}

TEST_SUITE_END();
