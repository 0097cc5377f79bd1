// Command-line front end. Subcommands map one-to-one onto the library:
// counterexample {rerm,sgd} runs the two bias constructions with their
// pass/fail checks, bounds prints the deviation-bound calculators, probe
// measures stability profiles, select runs the grid-selection experiment on a
// CSV file, and diagnose decomposes the estimator error on a construction.
//
// Exit codes: 0 success and all checks pass, 1 check or numerical failure,
// 2 usage error, 3 data error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvstab/bounds.hpp"
#include "cvstab/data_io.hpp"
#include "cvstab/dataset.hpp"
#include "cvstab/errors.hpp"
#include "cvstab/estimators.hpp"
#include "cvstab/folds.hpp"
#include "cvstab/learners.hpp"
#include "cvstab/model_selection.hpp"
#include "cvstab/oracles.hpp"
#include "cvstab/rng.hpp"
#include "cvstab/stability.hpp"

namespace {

constexpr const char* kVersion = "cvstab 0.1.0";

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::string fmt(double value) {
    std::ostringstream out;
    out << std::setprecision(9) << value;
    return out.str();
}

std::string fmt_risk(double value, double se) {
    std::ostringstream out;
    out << std::setprecision(6) << value << " (" << std::setprecision(3) << se << ")";
    return out.str();
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

nlohmann::json artifact(const std::string& command, nlohmann::json config) {
    nlohmann::json doc;
    doc["version"] = kVersion;
    doc["command"] = command;
    doc["config"] = std::move(config);
    return doc;
}

void write_artifact(const std::string& path, const nlohmann::json& doc) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw cvstab::DataError("cannot write output file: " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw cvstab::DataError("cannot write output file: " + path);
}

// Prints every check line and collects them into the artifact. Returns true
// only when all checks pass.
bool emit_checks(const std::vector<Check>& checks, nlohmann::json& doc) {
    bool all = true;
    nlohmann::json list = nlohmann::json::array();
    for (const Check& c : checks) {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) std::cout << ": " << c.detail;
        std::cout << "\n";
        list.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        all = all && c.pass;
    }
    doc["checks"] = list;
    doc["pass"] = all;
    return all;
}

void print_row(const std::string& label, double value) {
    std::cout << "  " << std::left << std::setw(42) << label << fmt(value) << "\n";
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
    std::vector<int> out;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            std::size_t used = 0;
            int value = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(value);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(flag) + " expects a comma-separated integer list");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string(flag) + " must not be empty");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            std::size_t used = 0;
            double value = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(value);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(flag) + " expects a comma-separated number list");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string(flag) + " must not be empty");
    return out;
}

std::string basename_of(const std::string& path) {
    std::size_t pos = path.find_last_of("/\\");
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

cvstab::LearnerKind parse_learner(const std::string& name) {
    auto kind = cvstab::learner_kind_from_name(name);
    if (!kind) {
        throw std::invalid_argument(
            "unknown learner \"" + name +
            "\"; valid names: constant, rerm1d, ridge, kernel_ridge_sigmoid, hinge_sgd, "
            "sgd_quadratic");
    }
    return *kind;
}

// ---------------------------------------------------------------- rerm ----

struct RermOpts {
    int n = 100;
    int k = 5;
    double m = 10.0;
    std::uint64_t seed = 1;
    std::string out;
};

int run_rerm(const RermOpts& o) {
    cvstab::RermConstruction c;
    c.m_bound = o.m;
    c.n = o.n;
    c.k = o.k;
    cvstab::RermReport exact = cvstab::rerm_exact_report(c);
    cvstab::RermReport measured = cvstab::rerm_simulated_report(c, o.seed);

    std::cout << "penalized least squares counterexample (n=" << o.n << ", K=" << o.k
              << ", M=" << fmt(o.m) << ")\n";
    print_row("full-sample risk", exact.full_risk);
    print_row("per-fold risk", exact.fold_risk);
    print_row("K-fold bias, closed form", exact.kfold_bias);
    print_row("K-fold bias, measured", measured.kfold_bias);
    print_row("corrected-estimator bias, measured", measured.corrected_bias);
    print_row("bias lower bound", exact.lower_bound);
    print_row("bias upper bound", exact.upper_bound);

    std::vector<Check> checks;
    checks.push_back({"measured bias matches the closed form",
                      std::abs(measured.kfold_bias - exact.kfold_bias) <= 1e-9,
                      "difference " + fmt(measured.kfold_bias - exact.kfold_bias)});
    checks.push_back({"corrected estimator is exactly unbiased here",
                      std::abs(measured.corrected_bias) <= 1e-12,
                      "measured " + fmt(measured.corrected_bias)});
    checks.push_back({"closed-form bias sits inside its sandwich",
                      exact.lower_bound <= exact.kfold_bias && exact.kfold_bias <= exact.upper_bound,
                      fmt(exact.lower_bound) + " <= " + fmt(exact.kfold_bias) + " <= " +
                          fmt(exact.upper_bound)});

    nlohmann::json doc = artifact("counterexample rerm",
                                  {{"n", o.n}, {"k", o.k}, {"m", o.m}, {"seed", o.seed}});
    doc["results"] = {{"full_risk", exact.full_risk},
                      {"fold_risk", exact.fold_risk},
                      {"kfold_bias_closed_form", exact.kfold_bias},
                      {"kfold_bias_measured", measured.kfold_bias},
                      {"corrected_bias_measured", measured.corrected_bias},
                      {"lower_bound", exact.lower_bound},
                      {"upper_bound", exact.upper_bound}};
    bool ok = emit_checks(checks, doc);
    write_artifact(o.out, doc);
    return ok ? 0 : 1;
}

// ----------------------------------------------------------------- sgd ----

struct SgdOpts {
    int n = 100;
    int k = 5;
    int t = 10;
    long long replicates = 100000;
    double m = 10.0;
    int d = 2;
    double p_plus = 2.0 / 3.0;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out;
};

int run_sgd(const SgdOpts& o) {
    cvstab::SgdConstruction c;
    c.m_bound = o.m;
    c.n = o.n;
    c.k = o.k;
    c.t = o.t;
    c.d = o.d;
    c.p_plus = o.p_plus;
    int workers = resolve_workers(o.workers);
    cvstab::SgdBiasReport rep = cvstab::sgd_bias_report(c, o.replicates, o.seed, workers);

    std::cout << "stochastic gradient counterexample (n=" << o.n << ", K=" << o.k << ", t=" << o.t
              << ", replicates=" << o.replicates << ")\n";
    print_row("expected bias, closed form", rep.expected_bias_closed_form);
    print_row("expected bias, Monte Carlo", rep.expected_bias_mc);
    print_row("Monte Carlo standard error", rep.mc_standard_error);
    print_row("bias lower bound", rep.lower_bound);
    print_row("stability bound at n", rep.stability_bound);

    std::vector<Check> checks;
    checks.push_back({"Monte Carlo mean within 3 standard errors of the closed form",
                      std::abs(rep.expected_bias_mc - rep.expected_bias_closed_form) <=
                          3.0 * rep.mc_standard_error,
                      "difference " + fmt(rep.expected_bias_mc - rep.expected_bias_closed_form) +
                          ", standard error " + fmt(rep.mc_standard_error)});
    checks.push_back({"Monte Carlo mean clears the lower bound",
                      rep.expected_bias_mc >= rep.lower_bound - 3.0 * rep.mc_standard_error,
                      fmt(rep.expected_bias_mc) + " vs " + fmt(rep.lower_bound)});

    nlohmann::json doc = artifact("counterexample sgd", {{"n", o.n},
                                                         {"k", o.k},
                                                         {"t", o.t},
                                                         {"replicates", o.replicates},
                                                         {"m", o.m},
                                                         {"d", o.d},
                                                         {"p_plus", o.p_plus},
                                                         {"seed", o.seed},
                                                         {"workers", workers}});
    doc["results"] = {{"expected_bias_closed_form", rep.expected_bias_closed_form},
                      {"expected_bias_mc", rep.expected_bias_mc},
                      {"mc_standard_error", rep.mc_standard_error},
                      {"lower_bound", rep.lower_bound},
                      {"stability_bound", rep.stability_bound},
                      {"replicates", rep.replicates}};
    bool ok = emit_checks(checks, doc);
    write_artifact(o.out, doc);
    return ok ? 0 : 1;
}

// -------------------------------------------------------------- bounds ----

struct BoundsOpts {
    long long n = 1000;
    int k = 5;
    double delta = 0.05;
    double c = 1.0;
    double l = 1.0;
    double m_const = 1.0;
    long long model_count = 1;
    std::string out;
};

int run_bounds(const BoundsOpts& o) {
    cvstab::BoundInputs inp;
    inp.n = o.n;
    inp.k = o.k;
    inp.delta = o.delta;
    inp.c = o.c;
    inp.big_l = o.l;
    inp.m_const = o.m_const;
    inp.model_count = o.model_count;

    double dev = cvstab::deviation(inp);
    double standard = cvstab::kfold_upper_bound(inp);
    double corrected = cvstab::corrected_upper_bound(inp);
    double selection = cvstab::model_selection_bound(inp);
    cvstab::LowerBounds lower = cvstab::kfold_lower_bounds(inp);

    std::cout << "deviation bounds (n=" << o.n << ", K=" << o.k << ", delta=" << fmt(o.delta)
              << ", C=" << fmt(o.c) << ", L=" << fmt(o.l) << ")\n";
    print_row("one-sided deviation term", dev);
    print_row("K-fold upper bound", standard);
    print_row("corrected K-fold upper bound", corrected);
    print_row("model selection bound", selection);
    print_row("bias floor, penalized least squares", lower.rerm);
    print_row("bias floor, stochastic gradient", lower.sgd);

    nlohmann::json doc = artifact("bounds", {{"n", o.n},
                                             {"k", o.k},
                                             {"delta", o.delta},
                                             {"c", o.c},
                                             {"l", o.l},
                                             {"m_const", o.m_const},
                                             {"model_count", o.model_count}});
    doc["results"] = {{"deviation", dev},
                      {"kfold_upper_bound", standard},
                      {"corrected_upper_bound", corrected},
                      {"model_selection_bound", selection},
                      {"lower_bound_rerm", lower.rerm},
                      {"lower_bound_sgd", lower.sgd}};
    write_artifact(o.out, doc);
    return 0;
}

// --------------------------------------------------------------- probe ----

struct ProbeOpts {
    std::string learner = "ridge";
    std::string sizes = "50,100,200,400,800";
    int trials = 3;
    int eval_points = 16;
    int inner_reps = 100;
    std::uint64_t seed = 1;
    double lambda = 0.1;
    double m = 10.0;
    int t = 10;
    int d = 0; // 0 picks the family default
    double sigma = 1.0;
    std::string theta;
    double kernel_scale = 0.0; // 0 keeps the learner default 1/d
    int passes = 5;
    std::string csv;
    std::string out;
    int workers = 0;
};

std::vector<double> resolve_theta(const std::string& text, int d) {
    if (text.empty()) {
        return std::vector<double>(static_cast<std::size_t>(d), 1.0 / std::sqrt(d));
    }
    std::vector<double> theta = parse_double_list(text, "--theta");
    if (static_cast<int>(theta.size()) != d) {
        throw std::invalid_argument("--theta must list exactly d=" + std::to_string(d) +
                                    " values");
    }
    return theta;
}

int run_probe(const ProbeOpts& o) {
    cvstab::LearnerKind kind = parse_learner(o.learner);
    std::vector<int> sizes = parse_int_list(o.sizes, "--sizes");
    int workers = resolve_workers(o.workers);

    cvstab::LearnerSpec spec;
    spec.kind = kind;
    spec.regularization = o.lambda;
    spec.passes = o.passes;
    spec.seed = o.seed;
    if (o.kernel_scale > 0.0) spec.kernel_scale = o.kernel_scale;

    std::function<cvstab::Observation(cvstab::Rng&)> sampler;
    bool stochastic = false;
    int d = o.d;
    if (kind == cvstab::LearnerKind::rerm1d) {
        cvstab::RermConstruction c;
        c.m_bound = o.m;
        spec = cvstab::construction_spec(c);
        spec.seed = o.seed;
        sampler = cvstab::construction_sampler(c);
        d = 1;
    } else if (kind == cvstab::LearnerKind::sgd_quadratic) {
        cvstab::SgdConstruction c;
        if (d > 0) c.d = d;
        c.m_bound = o.m;
        c.t = o.t;
        spec = cvstab::construction_spec(c);
        spec.seed = o.seed;
        sampler = cvstab::construction_sampler(c);
        d = c.d;
        stochastic = true;
    } else {
        if (d <= 0) d = 5;
        std::vector<double> theta = resolve_theta(o.theta, d);
        if (kind == cvstab::LearnerKind::hinge_sgd) {
            sampler = cvstab::sign_linear_sampler(theta, o.sigma);
            stochastic = true;
        } else {
            sampler = cvstab::linear_gaussian_sampler(theta, o.sigma);
        }
    }

    cvstab::StabilityProfile profile =
        stochastic ? cvstab::probe_randomized_stability(spec, sampler, sizes, o.trials,
                                                        o.inner_reps, o.eval_points, o.seed,
                                                        workers)
                   : cvstab::probe_stability(spec, sampler, sizes, o.trials, o.eval_points,
                                             o.seed, workers);

    std::cout << "stability profile for " << o.learner << (stochastic ? " (randomized probe)" : "")
              << "\n";
    std::cout << "  " << std::left << std::setw(10) << "n_T" << std::setw(18) << "beta_hat"
              << std::setw(10) << "trials" << "se_at_max\n";
    for (const cvstab::StabilityEntry& e : profile.entries) {
        std::cout << "  " << std::left << std::setw(10) << e.n_t << std::setw(18)
                  << fmt(e.beta_hat) << std::setw(10) << e.trials << fmt(e.se_at_max) << "\n";
    }
    std::cout << "  fit exponent: " << fmt(profile.fit_exponent) << "\n";
    std::cout << "  fit failures: " << profile.failures << "\n";

    if (!o.csv.empty()) {
        std::ofstream file(o.csv);
        if (!file) throw cvstab::DataError("cannot write output file: " + o.csv);
        file << cvstab::profile_to_csv(profile);
    }

    nlohmann::json doc = artifact("probe", {{"learner", o.learner},
                                            {"sizes", o.sizes},
                                            {"trials", o.trials},
                                            {"eval_points", o.eval_points},
                                            {"inner_reps", stochastic ? o.inner_reps : 1},
                                            {"seed", o.seed},
                                            {"lambda", o.lambda},
                                            {"m", o.m},
                                            {"t", o.t},
                                            {"d", d},
                                            {"sigma", o.sigma},
                                            {"passes", o.passes},
                                            {"workers", workers}});
    nlohmann::json entries = nlohmann::json::array();
    for (const cvstab::StabilityEntry& e : profile.entries) {
        entries.push_back({{"n_t", e.n_t},
                           {"beta_hat", e.beta_hat},
                           {"trials", e.trials},
                           {"se_at_max", e.se_at_max}});
    }
    doc["results"] = {{"entries", entries},
                      {"fit_exponent", profile.fit_exponent},
                      {"failures", profile.failures}};
    write_artifact(o.out, doc);
    return 0;
}

// -------------------------------------------------------------- select ----

struct SelectOpts {
    std::string data;
    int k = 3;
    double grid_a = 0.01;
    double grid_b = 10.0;
    double grid_step = 0.01;
    std::string learner = "ridge";
    double kernel_scale = 0.0;
    int passes = 5;
    double test_fraction = 1.0 / 3.0;
    std::uint64_t seed = 1;
    std::string task = "regression";
    std::string positive_label;
    bool no_header = false;
    int target_index = 0;
    std::string target_name;
    bool no_standardize = false;
    bool allow_truncation = false;
    double ref_standard = 0.0;
    double ref_corrected = 0.0;
    std::string out;
    int workers = 0;
};

int run_select(const SelectOpts& o, const CLI::App* sub) {
    cvstab::CsvSchema schema;
    schema.has_header = !o.no_header;
    if (o.task == "regression") {
        schema.task = cvstab::CsvSchema::Task::regression;
    } else if (o.task == "classification") {
        schema.task = cvstab::CsvSchema::Task::classification;
    } else {
        throw std::invalid_argument("--task must be regression or classification");
    }
    if (!o.positive_label.empty()) schema.positive_label = o.positive_label;
    if (sub->count("--target-index") > 0) schema.target_index = o.target_index;
    if (!o.target_name.empty()) schema.target_name = o.target_name;

    cvstab::Dataset all = cvstab::load_csv(o.data, schema);
    auto parts = cvstab::split_train_test(all, o.test_fraction, o.seed);
    cvstab::Dataset train = std::move(parts.first);
    cvstab::Dataset test = std::move(parts.second);

    std::vector<std::string> warnings;
    if (!o.no_standardize) {
        cvstab::StandardizeResult standardized = cvstab::standardize(train, test);
        train = std::move(standardized.train);
        test = std::move(standardized.test);
        warnings = standardized.warnings;
        for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
    }

    cvstab::FoldScheme scheme;
    int dropped = 0;
    if (train.n() % o.k != 0) {
        if (!o.allow_truncation) {
            throw std::invalid_argument(
                "training size " + std::to_string(train.n()) + " is not divisible by K=" +
                std::to_string(o.k) +
                "; every fold must hold the same number of rows (pass --allow-truncation to "
                "drop the trailing " +
                std::to_string(train.n() % o.k) + " rows)");
        }
        scheme = cvstab::build_kfold_truncating(train.n(), o.k, std::nullopt, &dropped);
        train.rows.resize(static_cast<std::size_t>(scheme.n));
        std::cerr << "warning: dropped " << dropped
                  << " trailing training rows so K=" << o.k << " divides the training size\n";
    } else {
        scheme = cvstab::build_kfold(train.n(), o.k, std::nullopt);
    }

    cvstab::LearnerSpec base;
    base.kind = parse_learner(o.learner);
    base.passes = o.passes;
    base.seed = o.seed;
    if (o.kernel_scale > 0.0) base.kernel_scale = o.kernel_scale;

    cvstab::ModelGrid grid = cvstab::build_grid(base, o.grid_a, o.grid_b, o.grid_step);
    int workers = resolve_workers(o.workers);
    cvstab::SelectionResult res = cvstab::select(grid, train, scheme, test, workers);

    for (int idx : res.failed_models) {
        std::cerr << "warning: model " << idx << " (lambda="
                  << fmt(grid.specs[static_cast<std::size_t>(idx)].regularization)
                  << ") failed to fit and was excluded\n";
    }

    double lambda_standard =
        grid.specs[static_cast<std::size_t>(res.chosen_standard)].regularization;
    double lambda_corrected =
        grid.specs[static_cast<std::size_t>(res.chosen_corrected)].regularization;
    std::string name = basename_of(o.data);
    bool has_reference = sub->count("--reference-standard") > 0;

    std::cout << std::left << std::setw(28) << "dataset" << std::setw(5) << "K" << std::setw(24)
              << "K-fold" << "corrected K-fold\n";
    std::cout << std::left << std::setw(28) << name << std::setw(5) << o.k << std::setw(24)
              << fmt_risk(res.test_risk_standard, res.test_se_standard)
              << fmt_risk(res.test_risk_corrected, res.test_se_corrected) << "\n";
    if (has_reference) {
        std::ostringstream rs;
        rs << std::setprecision(6) << o.ref_standard;
        std::ostringstream rc;
        rc << std::setprecision(6) << o.ref_corrected;
        std::cout << std::left << std::setw(28) << "reference" << std::setw(5) << o.k
                  << std::setw(24) << rs.str() << rc.str() << "\n";
    }
    std::cout << "chosen lambda: " << fmt(lambda_standard) << " (K-fold), "
              << fmt(lambda_corrected) << " (corrected)\n";

    nlohmann::json config = {{"data", o.data},
                             {"k", o.k},
                             {"grid_a", o.grid_a},
                             {"grid_b", o.grid_b},
                             {"grid_step", o.grid_step},
                             {"learner", o.learner},
                             {"passes", o.passes},
                             {"test_fraction", o.test_fraction},
                             {"seed", o.seed},
                             {"task", o.task},
                             {"has_header", schema.has_header},
                             {"standardize", !o.no_standardize},
                             {"allow_truncation", o.allow_truncation},
                             {"workers", workers}};
    if (!o.positive_label.empty()) config["positive_label"] = o.positive_label;
    nlohmann::json doc = artifact("select", config);
    doc["results"] = {{"dataset", name},
                      {"n_train", train.n()},
                      {"n_test", test.n()},
                      {"dropped_rows", dropped},
                      {"grid_size", static_cast<long long>(grid.specs.size())},
                      {"chosen_standard",
                       {{"index", res.chosen_standard}, {"lambda", lambda_standard}}},
                      {"chosen_corrected",
                       {{"index", res.chosen_corrected}, {"lambda", lambda_corrected}}},
                      {"test_risk_standard", res.test_risk_standard},
                      {"test_se_standard", res.test_se_standard},
                      {"test_risk_corrected", res.test_risk_corrected},
                      {"test_se_corrected", res.test_se_corrected},
                      {"failed_models", res.failed_models},
                      {"per_model_standard", res.per_model_standard},
                      {"per_model_corrected", res.per_model_corrected},
                      {"standardize_warnings", warnings}};
    if (has_reference) {
        doc["results"]["reference"] = {{"standard", o.ref_standard},
                                       {"corrected", o.ref_corrected}};
    }
    write_artifact(o.out, doc);
    return 0;
}

// ------------------------------------------------------------ diagnose ----

struct DiagnoseOpts {
    std::string construction;
    int n = 100;
    int k = 5;
    double m = 10.0;
    int t = 10;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out;
};

int run_diagnose(const DiagnoseOpts& o) {
    int workers = resolve_workers(o.workers);
    cvstab::Decomposition dec;
    cvstab::FoldScheme scheme = cvstab::build_kfold(o.n, o.k, std::nullopt);
    if (o.construction == "rerm") {
        cvstab::RermConstruction c;
        c.m_bound = o.m;
        c.n = o.n;
        c.k = o.k;
        cvstab::validate_construction(c);
        cvstab::LearnerSpec spec = cvstab::construction_spec(c);
        spec.seed = o.seed;
        cvstab::Dataset data =
            cvstab::sample_dataset(cvstab::construction_sampler(c), o.n, o.seed);
        cvstab::RiskOracle oracle = cvstab::make_rerm_oracle(o.m);
        dec = cvstab::decompose(spec, data, scheme, oracle, workers);
    } else if (o.construction == "sgd") {
        cvstab::SgdConstruction c;
        c.m_bound = o.m;
        c.n = o.n;
        c.k = o.k;
        c.t = o.t;
        cvstab::validate_construction(c);
        cvstab::LearnerSpec spec = cvstab::construction_spec(c);
        spec.seed = o.seed;
        cvstab::Dataset data =
            cvstab::sample_dataset(cvstab::construction_sampler(c), o.n, o.seed);
        cvstab::RiskOracle oracle = cvstab::make_sgd_oracle(c);
        dec = cvstab::decompose(spec, data, scheme, oracle, workers);
    } else {
        throw std::invalid_argument("--construction must be rerm or sgd");
    }

    std::cout << "estimator error decomposition (" << o.construction << ", n=" << o.n
              << ", K=" << o.k << ")\n";
    print_row("validation deviation d_cv", dec.d_cv);
    print_row("fold-vs-full bias", dec.bias);
    print_row("full-sample deviation d_all", dec.d_all);
    print_row("training deviation d_train", dec.d_train);
    print_row("true risk of the full-sample model", dec.true_risk_full);
    print_row("standard estimate", dec.standard_value);
    print_row("corrected estimate", dec.corrected_value);

    double ratio = static_cast<double>(scheme.n_train()) / static_cast<double>(scheme.n);
    double res_standard = (dec.standard_value - dec.true_risk_full) - (dec.d_cv + dec.bias);
    double res_corrected = (dec.corrected_value - dec.true_risk_full) -
                           (dec.d_all + ratio * (dec.d_cv - dec.d_train));

    std::vector<Check> checks;
    checks.push_back({"standard estimate splits into deviation plus bias",
                      std::abs(res_standard) <= 1e-9, "residual " + fmt(res_standard)});
    checks.push_back({"corrected estimate splits into its three deviations",
                      std::abs(res_corrected) <= 1e-9, "residual " + fmt(res_corrected)});

    nlohmann::json doc = artifact("diagnose", {{"construction", o.construction},
                                               {"n", o.n},
                                               {"k", o.k},
                                               {"m", o.m},
                                               {"t", o.t},
                                               {"seed", o.seed},
                                               {"workers", workers}});
    doc["results"] = {{"d_cv", dec.d_cv},
                      {"bias", dec.bias},
                      {"d_all", dec.d_all},
                      {"d_train", dec.d_train},
                      {"true_risk_full", dec.true_risk_full},
                      {"standard_value", dec.standard_value},
                      {"corrected_value", dec.corrected_value},
                      {"residual_standard_identity", res_standard},
                      {"residual_corrected_identity", res_corrected}};
    bool ok = emit_checks(checks, doc);
    write_artifact(o.out, doc);
    return ok ? 0 : 1;
}

// CLI11 reads a config file only when it hangs off the root command, so each
// leaf command loads its own file here. Values fill options the command line
// left unset, which is what gives flags precedence over the file.
void apply_config_file(CLI::App* cmd) {
    CLI::Option* cfg = cmd->get_config_ptr();
    if (cfg == nullptr || cfg->count() == 0) {
        return;
    }
    for (const std::string& path : cfg->as<std::vector<std::string>>()) {
        std::vector<CLI::ConfigItem> items = cmd->get_config_formatter()->from_file(path);
        for (const CLI::ConfigItem& item : items) {
            if (!item.parents.empty()) {
                throw CLI::ConfigError("config key \"" + item.fullname() +
                                       "\" is sectioned; the file must be flat key=value lines");
            }
            CLI::Option* opt = cmd->get_option_no_throw("--" + item.name);
            if (opt == nullptr && item.name.size() == 1) {
                opt = cmd->get_option_no_throw("-" + item.name);
            }
            if (opt == nullptr) {
                throw CLI::ConfigError("unrecognized config key \"" + item.name + "\"");
            }
            if (opt == cfg || opt->count() > 0) {
                continue;
            }
            if (opt->get_expected_min() == 0) {
                std::string value = cmd->get_config_formatter()->to_flag(item);
                value = opt->get_flag_value(item.name, value);
                opt->add_result(value);
            } else {
                opt->add_result(item.inputs);
            }
            opt->run_callback();
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-validation risk estimation for uniformly stable learners"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    int exit_code = 0;

    CLI::App* ce = app.add_subcommand("counterexample",
                                      "run a bias construction with its pass/fail checks");
    ce->require_subcommand(1);

    RermOpts rerm_opts;
    CLI::App* rerm = ce->add_subcommand(
        "rerm", "penalized least squares construction with a non-vanishing K-fold bias");
    rerm->set_config("--config", "", "flat key=value config file; flags override");
    rerm->add_option("--n", rerm_opts.n, "sample size (divisible by K)")->capture_default_str();
    rerm->add_option("--k", rerm_opts.k, "number of folds")->capture_default_str();
    rerm->add_option("--m", rerm_opts.m, "scale constant M of the construction")
        ->capture_default_str();
    rerm->add_option("--seed", rerm_opts.seed, "seed for the simulated draw")
        ->capture_default_str();
    rerm->add_option("--out", rerm_opts.out, "write a JSON artifact to this path");
    rerm->callback([&]() {
        apply_config_file(rerm);
        exit_code = run_rerm(rerm_opts);
    });

    SgdOpts sgd_opts;
    CLI::App* sgd = ce->add_subcommand(
        "sgd", "stochastic gradient construction with a non-vanishing expected K-fold bias");
    sgd->set_config("--config", "", "flat key=value config file; flags override");
    sgd->add_option("--n", sgd_opts.n, "sample size (divisible by K)")->capture_default_str();
    sgd->add_option("--k", sgd_opts.k, "number of folds")->capture_default_str();
    sgd->add_option("--t", sgd_opts.t, "gradient steps per fit")->capture_default_str();
    sgd->add_option("--replicates", sgd_opts.replicates, "Monte Carlo replicates")
        ->capture_default_str();
    sgd->add_option("--m", sgd_opts.m, "loss bound M of the construction")->capture_default_str();
    sgd->add_option("--d", sgd_opts.d, "ambient dimension (at least 2)")->capture_default_str();
    sgd->add_option("--p-plus", sgd_opts.p_plus, "probability of the +v feature direction")
        ->capture_default_str();
    sgd->add_option("--seed", sgd_opts.seed, "Monte Carlo seed")->capture_default_str();
    sgd->add_option("--workers", sgd_opts.workers, "worker threads (0 = all cores)")
        ->capture_default_str();
    sgd->add_option("--out", sgd_opts.out, "write a JSON artifact to this path");
    sgd->callback([&]() {
        apply_config_file(sgd);
        exit_code = run_sgd(sgd_opts);
    });

    BoundsOpts bounds_opts;
    CLI::App* bounds = app.add_subcommand("bounds", "evaluate the deviation bound calculators");
    bounds->set_config("--config", "", "flat key=value config file; flags override");
    bounds->add_option("--n", bounds_opts.n, "sample size")->capture_default_str();
    bounds->add_option("--k", bounds_opts.k, "number of folds")->capture_default_str();
    bounds->add_option("--delta", bounds_opts.delta, "failure probability")
        ->capture_default_str();
    bounds->add_option("--c", bounds_opts.c, "stability envelope constant C")
        ->capture_default_str();
    bounds->add_option("--l", bounds_opts.l, "loss bound L")->capture_default_str();
    bounds->add_option("--m-const", bounds_opts.m_const,
                       "scale constant M for the lower bound and model selection")
        ->capture_default_str();
    bounds->add_option("--model-count", bounds_opts.model_count,
                       "number of models in the selection family")
        ->capture_default_str();
    bounds->add_option("--out", bounds_opts.out, "write a JSON artifact to this path");
    bounds->callback([&]() {
        apply_config_file(bounds);
        exit_code = run_bounds(bounds_opts);
    });

    ProbeOpts probe_opts;
    CLI::App* probe = app.add_subcommand("probe", "measure an empirical stability profile");
    probe->set_config("--config", "", "flat key=value config file; flags override");
    probe->add_option("--learner", probe_opts.learner,
                      "learner to probe (constant, rerm1d, ridge, kernel_ridge_sigmoid, "
                      "hinge_sgd, sgd_quadratic)")
        ->capture_default_str();
    probe->add_option("--sizes", probe_opts.sizes, "comma-separated training sizes")
        ->capture_default_str();
    probe->add_option("--trials", probe_opts.trials, "fresh datasets per size")
        ->capture_default_str();
    probe->add_option("--eval-points", probe_opts.eval_points, "held-out evaluation points")
        ->capture_default_str();
    probe->add_option("--inner-reps", probe_opts.inner_reps,
                      "re-fits per side for learners with internal randomness")
        ->capture_default_str();
    probe->add_option("--seed", probe_opts.seed, "probe seed")->capture_default_str();
    probe->add_option("--lambda", probe_opts.lambda, "regularization strength")
        ->capture_default_str();
    probe->add_option("--m", probe_opts.m, "scale constant M (rerm1d and sgd_quadratic)")
        ->capture_default_str();
    probe->add_option("--t", probe_opts.t, "gradient steps (sgd_quadratic)")
        ->capture_default_str();
    probe->add_option("--d", probe_opts.d, "feature dimension (0 = family default)")
        ->capture_default_str();
    probe->add_option("--sigma", probe_opts.sigma, "noise level of the Gaussian sampler")
        ->capture_default_str();
    probe->add_option("--theta", probe_opts.theta,
                      "comma-separated true coefficients (default: 1/sqrt(d) each)");
    probe->add_option("--kernel-scale", probe_opts.kernel_scale,
                      "sigmoid kernel scale (0 = learner default)")
        ->capture_default_str();
    probe->add_option("--passes", probe_opts.passes, "passes for hinge_sgd")
        ->capture_default_str();
    probe->add_option("--csv", probe_opts.csv, "write the profile as CSV to this path");
    probe->add_option("--out", probe_opts.out, "write a JSON artifact to this path");
    probe->add_option("--workers", probe_opts.workers, "worker threads (0 = all cores)")
        ->capture_default_str();
    probe->callback([&]() {
        apply_config_file(probe);
        exit_code = run_probe(probe_opts);
    });

    SelectOpts select_opts;
    CLI::App* select = app.add_subcommand(
        "select", "grid model selection on a CSV dataset, standard vs corrected K-fold");
    select->set_config("--config", "", "flat key=value config file; flags override");
    select->add_option("--data", select_opts.data, "path to the CSV file")->required();
    select->add_option("--k", select_opts.k, "number of folds")->capture_default_str();
    select->add_option("--grid-a", select_opts.grid_a, "grid start")->capture_default_str();
    select->add_option("--grid-b", select_opts.grid_b, "grid end")->capture_default_str();
    select->add_option("--grid-step", select_opts.grid_step, "grid step")->capture_default_str();
    select->add_option("--learner", select_opts.learner,
                       "learner family (ridge, kernel_ridge_sigmoid, hinge_sgd, rerm1d)")
        ->capture_default_str();
    select->add_option("--kernel-scale", select_opts.kernel_scale,
                       "sigmoid kernel scale (0 = learner default)")
        ->capture_default_str();
    select->add_option("--passes", select_opts.passes, "passes for hinge_sgd")
        ->capture_default_str();
    select->add_option("--test-fraction", select_opts.test_fraction,
                       "held-out fraction for the test split")
        ->capture_default_str();
    select->add_option("--seed", select_opts.seed, "split and learner seed")
        ->capture_default_str();
    select->add_option("--task", select_opts.task, "regression or classification")
        ->capture_default_str();
    select->add_option("--positive-label", select_opts.positive_label,
                       "label mapped to +1 (classification)");
    select->add_flag("--no-header", select_opts.no_header, "CSV has no header row");
    select->add_option("--target-index", select_opts.target_index,
                       "0-based target column (default: last)");
    select->add_option("--target-name", select_opts.target_name, "target column name");
    select->add_flag("--no-standardize", select_opts.no_standardize,
                     "skip per-feature standardization");
    select->add_flag("--allow-truncation", select_opts.allow_truncation,
                     "drop trailing training rows when K does not divide the training size");
    CLI::Option* ref_s = select->add_option("--reference-standard", select_opts.ref_standard,
                                            "published standard test risk for comparison");
    CLI::Option* ref_c = select->add_option("--reference-corrected", select_opts.ref_corrected,
                                            "published corrected test risk for comparison");
    ref_s->needs(ref_c);
    ref_c->needs(ref_s);
    select->add_option("--out", select_opts.out, "write a JSON artifact to this path");
    select->add_option("--workers", select_opts.workers, "worker threads (0 = all cores)")
        ->capture_default_str();
    select->callback([&]() {
        apply_config_file(select);
        exit_code = run_select(select_opts, select);
    });

    DiagnoseOpts diag_opts;
    CLI::App* diagnose = app.add_subcommand(
        "diagnose", "decompose the estimator error on a synthetic construction");
    diagnose->set_config("--config", "", "flat key=value config file; flags override");
    diagnose->add_option("--construction", diag_opts.construction, "rerm or sgd")->required();
    diagnose->add_option("--n", diag_opts.n, "sample size (divisible by K)")
        ->capture_default_str();
    diagnose->add_option("--k", diag_opts.k, "number of folds")->capture_default_str();
    diagnose->add_option("--m", diag_opts.m, "scale constant M")->capture_default_str();
    diagnose->add_option("--t", diag_opts.t, "gradient steps (sgd)")->capture_default_str();
    diagnose->add_option("--seed", diag_opts.seed, "dataset and learner seed")
        ->capture_default_str();
    diagnose->add_option("--workers", diag_opts.workers, "worker threads (0 = all cores)")
        ->capture_default_str();
    diagnose->add_option("--out", diag_opts.out, "write a JSON artifact to this path");
    diagnose->callback([&]() {
        apply_config_file(diagnose);
        exit_code = run_diagnose(diag_opts);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const cvstab::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const cvstab::FitError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
