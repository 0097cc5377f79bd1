#include "cvstab/data_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cvstab/errors.hpp"
#include "cvstab/rng.hpp"

namespace cvstab {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& raw, int data_row, int column) {
    std::string cell = trim(raw);
    const char* begin = cell.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "cannot parse \"" << cell << "\" as a finite number at row " << data_row
            << ", column " << column;
        throw DataError(msg.str());
    }
    return value;
}

} // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    if (schema.target_name && schema.target_index) {
        throw std::invalid_argument("set the target column by name or by index, not both");
    }
    if (schema.target_name && !schema.has_header) {
        throw std::invalid_argument("a named target column requires a header row");
    }

    std::ifstream file(path);
    if (!file) throw DataError("cannot open file: " + path);

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(file, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw DataError("file holds no rows: " + path);

    std::size_t first_data = 0;
    std::vector<std::string> header;
    if (schema.has_header) {
        header = split_line(lines[0]);
        first_data = 1;
        if (lines.size() == 1) throw DataError("file holds a header but no data rows: " + path);
    }

    int columns = static_cast<int>(split_line(lines[first_data]).size());
    if (columns < 2) throw DataError("need at least one feature column and one target column");

    int target = columns - 1;
    if (schema.target_index) {
        target = *schema.target_index;
        if (target < 0 || target >= columns) {
            throw DataError("target column index " + std::to_string(target) +
                            " is outside the " + std::to_string(columns) + " columns present");
        }
    } else if (schema.target_name) {
        target = -1;
        for (int c = 0; c < static_cast<int>(header.size()); ++c) {
            if (trim(header[static_cast<std::size_t>(c)]) == *schema.target_name) {
                target = c;
                break;
            }
        }
        if (target < 0) {
            throw DataError("target column \"" + *schema.target_name + "\" not found in header");
        }
    }

    std::vector<Observation> rows;
    rows.reserve(lines.size() - first_data);
    for (std::size_t r = first_data; r < lines.size(); ++r) {
        int data_row = static_cast<int>(r - first_data) + 1;
        std::vector<std::string> cells = split_line(lines[r]);
        if (static_cast<int>(cells.size()) != columns) {
            std::ostringstream msg;
            msg << "row " << data_row << " has " << cells.size() << " cells, expected "
                << columns;
            throw DataError(msg.str());
        }
        Observation obs;
        obs.x.reserve(static_cast<std::size_t>(columns - 1));
        for (int c = 0; c < columns; ++c) {
            const std::string& cell = cells[static_cast<std::size_t>(c)];
            if (c == target) {
                if (schema.task == CsvSchema::Task::classification) {
                    if (schema.positive_label) {
                        obs.y = trim(cell) == *schema.positive_label ? 1.0 : -1.0;
                    } else {
                        double value = parse_cell(cell, data_row, c + 1);
                        if (value != 1.0 && value != -1.0) {
                            std::ostringstream msg;
                            msg << "classification target " << value << " at row " << data_row
                                << " is not in {-1, +1}; set positive_label to map labels";
                            throw DataError(msg.str());
                        }
                        obs.y = value;
                    }
                } else {
                    obs.y = parse_cell(cell, data_row, c + 1);
                }
            } else {
                obs.x.push_back(parse_cell(cell, data_row, c + 1));
            }
        }
        rows.push_back(std::move(obs));
    }
    return make_dataset(std::move(rows));
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double test_fraction,
                                             std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
        throw std::invalid_argument("test fraction must lie strictly between 0 and 1");
    }
    int n = data.n();
    int n_test = static_cast<int>(std::llround(static_cast<double>(n) * test_fraction));
    int n_train = n - n_test;
    if (n_test < 1 || n_train < 2) {
        throw std::invalid_argument("split leaves fewer than 1 test row or 2 training rows");
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    shuffle(order, rng);

    Dataset test;
    Dataset train;
    test.d = data.d;
    train.d = data.d;
    test.rows.reserve(static_cast<std::size_t>(n_test));
    train.rows.reserve(static_cast<std::size_t>(n_train));
    for (int i = 0; i < n; ++i) {
        const Observation& obs = data.rows[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        if (i < n_test) {
            test.rows.push_back(obs);
        } else {
            train.rows.push_back(obs);
        }
    }
    return {std::move(train), std::move(test)};
}

StandardizeResult standardize(const Dataset& train, const Dataset& test) {
    if (train.rows.empty()) throw std::invalid_argument("cannot standardize an empty training set");
    if (!test.rows.empty() && test.d != train.d) {
        throw std::invalid_argument("train and test dimensions differ");
    }

    int d = train.d;
    double n = static_cast<double>(train.rows.size());
    StandardizeResult result;
    result.train = train;
    result.test = test;
    result.params.mean.assign(static_cast<std::size_t>(d), 0.0);
    result.params.sd.assign(static_cast<std::size_t>(d), 0.0);
    result.params.zero_variance.assign(static_cast<std::size_t>(d), false);

    for (int c = 0; c < d; ++c) {
        double sum = 0.0;
        for (const Observation& obs : train.rows) sum += obs.x[static_cast<std::size_t>(c)];
        double mu = sum / n;
        double sq = 0.0;
        for (const Observation& obs : train.rows) {
            double delta = obs.x[static_cast<std::size_t>(c)] - mu;
            sq += delta * delta;
        }
        double sigma = std::sqrt(sq / n);
        result.params.mean[static_cast<std::size_t>(c)] = mu;
        result.params.sd[static_cast<std::size_t>(c)] = sigma;
        if (sigma <= 0.0) {
            result.params.zero_variance[static_cast<std::size_t>(c)] = true;
            result.warnings.push_back("feature " + std::to_string(c + 1) +
                                      " is constant in training data; mapped to 0");
        }
    }

    auto apply = [&](Dataset& set) {
        for (Observation& obs : set.rows) {
            for (int c = 0; c < d; ++c) {
                std::size_t idx = static_cast<std::size_t>(c);
                if (result.params.zero_variance[idx]) {
                    obs.x[idx] = 0.0;
                } else {
                    obs.x[idx] = (obs.x[idx] - result.params.mean[idx]) / result.params.sd[idx];
                }
            }
        }
    };
    apply(result.train);
    apply(result.test);
    return result;
}

std::string params_to_json(const StandardizeParams& params) {
    nlohmann::json j;
    j["mean"] = params.mean;
    j["sd"] = params.sd;
    std::vector<int> zero;
    for (int c = 0; c < static_cast<int>(params.zero_variance.size()); ++c) {
        if (params.zero_variance[static_cast<std::size_t>(c)]) zero.push_back(c);
    }
    j["zero_variance_features"] = zero;
    return j.dump(2);
}

} // namespace cvstab
