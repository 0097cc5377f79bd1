#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cvstab/data_io.hpp"
#include "cvstab/errors.hpp"

using cvstab::CsvSchema;
using cvstab::DataError;
using cvstab::Dataset;

namespace {

// Writes content to a file in the working directory and removes it when the
// case ends.
struct TempCsv {
    std::string path;
    explicit TempCsv(const std::string& name, const std::string& content) : path(name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempCsv() { std::remove(path.c_str()); }
};

} // namespace

TEST_SUITE_BEGIN("data_io");

TEST_CASE("header file with the default target column") {
    TempCsv file("io_default.csv", "x1,x2,y\n1,2,3\n4,5,6\n");
    Dataset data = cvstab::load_csv(file.path, CsvSchema{});
    REQUIRE(data.n() == 2);
    CHECK(data.d == 2);
    CHECK(data.rows[0].x == std::vector<double>{1.0, 2.0});
    CHECK(data.rows[0].y == 3.0);
    CHECK(data.rows[1].x == std::vector<double>{4.0, 5.0});
    CHECK(data.rows[1].y == 6.0);
}

TEST_CASE("target selected by name or by index") {
    TempCsv file("io_target.csv", "x1,x2,y\n1,2,3\n4,5,6\n");
    CsvSchema by_name;
    by_name.target_name = "x1";
    Dataset named = cvstab::load_csv(file.path, by_name);
    CHECK(named.rows[0].x == std::vector<double>{2.0, 3.0});
    CHECK(named.rows[0].y == 1.0);

    CsvSchema by_index;
    by_index.target_index = 0;
    Dataset indexed = cvstab::load_csv(file.path, by_index);
    CHECK(indexed.rows[1].x == std::vector<double>{5.0, 6.0});
    CHECK(indexed.rows[1].y == 4.0);
}

TEST_CASE("headerless file") {
    TempCsv file("io_noheader.csv", "1,2,3\n4,5,6\n");
    CsvSchema schema;
    schema.has_header = false;
    Dataset data = cvstab::load_csv(file.path, schema);
    REQUIRE(data.n() == 2);
    CHECK(data.rows[0].y == 3.0);
}

TEST_CASE("malformed cells name the row and column") {
    TempCsv file("io_nan.csv", "x,y\n1,2\n1,NaN\n");
    CHECK_THROWS_WITH_AS(cvstab::load_csv(file.path, CsvSchema{}),
                         doctest::Contains("row 2"), DataError);

    TempCsv ragged("io_ragged.csv", "x,y\n1,2\n1\n");
    CHECK_THROWS_WITH_AS(cvstab::load_csv(ragged.path, CsvSchema{}),
                         doctest::Contains("expected 2"), DataError);
}

TEST_CASE("unreadable and degenerate files") {
    CHECK_THROWS_AS(cvstab::load_csv("io_does_not_exist.csv", CsvSchema{}), DataError);

    TempCsv empty("io_empty.csv", "");
    CHECK_THROWS_AS(cvstab::load_csv(empty.path, CsvSchema{}), DataError);

    TempCsv header_only("io_header_only.csv", "x,y\n");
    CHECK_THROWS_AS(cvstab::load_csv(header_only.path, CsvSchema{}), DataError);
}

TEST_CASE("schema contradictions") {
    TempCsv file("io_schema.csv", "x,y\n1,2\n");
    CsvSchema both;
    both.target_name = "y";
    both.target_index = 1;
    CHECK_THROWS_AS(cvstab::load_csv(file.path, both), std::invalid_argument);

    CsvSchema nameless;
    nameless.has_header = false;
    nameless.target_name = "y";
    CHECK_THROWS_AS(cvstab::load_csv(file.path, nameless), std::invalid_argument);

    CsvSchema unknown;
    unknown.target_name = "z";
    CHECK_THROWS_WITH_AS(cvstab::load_csv(file.path, unknown),
                         doctest::Contains("not found"), DataError);

    CsvSchema out_of_range;
    out_of_range.target_index = 5;
    CHECK_THROWS_AS(cvstab::load_csv(file.path, out_of_range), DataError);
}

TEST_CASE("classification labels") {
    TempCsv labeled("io_labels.csv", "a,b,label\n1,2,pos\n3,4,neg\n");
    CsvSchema schema;
    schema.task = CsvSchema::Task::classification;
    schema.positive_label = "pos";
    Dataset data = cvstab::load_csv(labeled.path, schema);
    CHECK(data.rows[0].y == 1.0);
    CHECK(data.rows[1].y == -1.0);

    TempCsv numeric("io_pm1.csv", "x,y\n1,1\n2,-1\n");
    CsvSchema plain;
    plain.task = CsvSchema::Task::classification;
    Dataset signs = cvstab::load_csv(numeric.path, plain);
    CHECK(signs.rows[0].y == 1.0);
    CHECK(signs.rows[1].y == -1.0);

    TempCsv bad("io_bad_label.csv", "x,y\n1,2\n");
    CHECK_THROWS_WITH_AS(cvstab::load_csv(bad.path, plain),
                         doctest::Contains("positive_label"), DataError);
}

TEST_CASE("seeded splitting preserves the rows") {
    Dataset data;
    data.d = 1;
    for (int i = 0; i < 9; ++i) {
        data.rows.push_back({{static_cast<double>(i)}, static_cast<double>(10 * i)});
    }

    auto [train, test] = cvstab::split_train_test(data, 1.0 / 3.0, 21);
    CHECK(test.n() == 3);
    CHECK(train.n() == 6);

    std::map<double, int> seen;
    for (const auto& obs : train.rows) ++seen[obs.x[0]];
    for (const auto& obs : test.rows) ++seen[obs.x[0]];
    CHECK(seen.size() == 9);
    for (const auto& [value, count] : seen) {
        CHECK(count == 1);
        CHECK(value >= 0.0);
        CHECK(value <= 8.0);
    }

    auto [train2, test2] = cvstab::split_train_test(data, 1.0 / 3.0, 21);
    for (int i = 0; i < test.n(); ++i) {
        CHECK(test.rows[static_cast<std::size_t>(i)].x ==
              test2.rows[static_cast<std::size_t>(i)].x);
    }
    for (int i = 0; i < train.n(); ++i) {
        CHECK(train.rows[static_cast<std::size_t>(i)].x ==
              train2.rows[static_cast<std::size_t>(i)].x);
    }
}

TEST_CASE("splitting rejects degenerate fractions") {
    Dataset data;
    data.d = 1;
    for (int i = 0; i < 3; ++i) data.rows.push_back({{1.0}, 0.0});
    CHECK_THROWS_AS(cvstab::split_train_test(data, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(cvstab::split_train_test(data, 1.0, 1), std::invalid_argument);
    // round(3 * 0.5) = 2 test rows leave a single training row
    CHECK_THROWS_AS(cvstab::split_train_test(data, 0.5, 1), std::invalid_argument);
}

TEST_CASE("standardization uses training statistics only") {
    Dataset train;
    train.d = 2;
    train.rows.push_back({{1.0, 5.0}, 0.0});
    train.rows.push_back({{3.0, 5.0}, 1.0});
    Dataset test;
    test.d = 2;
    test.rows.push_back({{2.0, 7.0}, 2.0});

    cvstab::StandardizeResult result = cvstab::standardize(train, test);
    CHECK(result.params.mean[0] == 2.0);
    CHECK(result.params.sd[0] == 1.0);
    CHECK(result.train.rows[0].x[0] == -1.0);
    CHECK(result.train.rows[1].x[0] == 1.0);
    CHECK(result.test.rows[0].x[0] == 0.0);

    // The constant second feature is zeroed everywhere and flagged.
    REQUIRE(result.params.zero_variance.size() == 2);
    CHECK_FALSE(result.params.zero_variance[0]);
    CHECK(result.params.zero_variance[1]);
    CHECK(result.train.rows[0].x[1] == 0.0);
    CHECK(result.test.rows[0].x[1] == 0.0);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("feature 2") != std::string::npos);

    // Targets pass through untouched.
    CHECK(result.train.rows[1].y == 1.0);
    CHECK(result.test.rows[0].y == 2.0);

    // Different test rows cannot change the parameters.
    Dataset other_test;
    other_test.d = 2;
    other_test.rows.push_back({{100.0, -100.0}, 0.0});
    cvstab::StandardizeResult again = cvstab::standardize(train, other_test);
    CHECK(again.params.mean == result.params.mean);
    CHECK(again.params.sd == result.params.sd);
}

TEST_CASE("standardizing standardized data changes nothing") {
    Dataset train;
    train.d = 1;
    for (int i = 0; i < 5; ++i) {
        train.rows.push_back({{0.7 * i - 1.0}, 0.0});
    }
    Dataset none;
    none.d = 1;
    cvstab::StandardizeResult once = cvstab::standardize(train, none);
    cvstab::StandardizeResult twice = cvstab::standardize(once.train, none);
    for (int i = 0; i < train.n(); ++i) {
        CHECK(twice.train.rows[static_cast<std::size_t>(i)].x[0] ==
              doctest::Approx(once.train.rows[static_cast<std::size_t>(i)].x[0])
                  .epsilon(1e-12));
    }
}

TEST_CASE("standardization contracts") {
    Dataset empty;
    empty.d = 1;
    Dataset test;
    test.d = 1;
    CHECK_THROWS_AS(cvstab::standardize(empty, test), std::invalid_argument);

    Dataset train;
    train.d = 2;
    train.rows.push_back({{1.0, 2.0}, 0.0});
    Dataset skinny;
    skinny.d = 1;
    skinny.rows.push_back({{1.0}, 0.0});
    CHECK_THROWS_AS(cvstab::standardize(train, skinny), std::invalid_argument);
}

TEST_CASE("parameter export round trips through json") {
    cvstab::StandardizeParams params;
    params.mean = {2.0, 5.0};
    params.sd = {1.0, 0.0};
    params.zero_variance = {false, true};
    nlohmann::json j = nlohmann::json::parse(cvstab::params_to_json(params));
    CHECK(j["mean"] == std::vector<double>{2.0, 5.0});
    CHECK(j["sd"] == std::vector<double>{1.0, 0.0});
    CHECK(j["zero_variance_features"] == std::vector<int>{1});
}

TEST_CASE("bundled synthetic files load") {
    std::string dir = CVSTAB_DATA_DIR;
    Dataset regression = cvstab::load_csv(dir + "/synth_regression.csv", CsvSchema{});
    CHECK(regression.n() == 270);
    CHECK(regression.d == 5);

    CsvSchema schema;
    schema.task = CsvSchema::Task::classification;
    schema.positive_label = "pos";
    Dataset classification = cvstab::load_csv(dir + "/synth_classification.csv", schema);
    CHECK(classification.n() == 210);
    CHECK(classification.d == 3);
    for (const auto& obs : classification.rows) {
        CHECK((obs.y == 1.0 || obs.y == -1.0));
    }
}

TEST_SUITE_END();
