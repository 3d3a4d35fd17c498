#include "gpgomea/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace gpgomea {

DataMatrix::DataMatrix(std::vector<std::vector<double>> columns, std::vector<double> y, std::vector<std::string> feature_names)
    : columns_(std::move(columns))
    , y_(std::move(y))
    , names_(std::move(feature_names))
{
    if (y_.empty()) {
        throw LoadError("no observations");
    }
    if (columns_.empty()) {
        throw LoadError("no feature columns");
    }
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (columns_[j].size() != y_.size()) {
            throw LoadError("feature column " + std::to_string(j + 1) + " has " + std::to_string(columns_[j].size()) + " rows, expected " + std::to_string(y_.size()));
        }
        for (std::size_t i = 0; i < y_.size(); ++i) {
            if (!std::isfinite(columns_[j][i])) {
                throw LoadError("non-finite feature value at row " + std::to_string(i + 1) + ", column " + std::to_string(j + 1));
            }
        }
    }
    for (std::size_t i = 0; i < y_.size(); ++i) {
        if (!std::isfinite(y_[i])) {
            throw LoadError("non-finite target value at row " + std::to_string(i + 1));
        }
    }
    if (names_.empty()) {
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            names_.push_back("x" + std::to_string(j + 1));
        }
    }
    if (names_.size() != columns_.size()) {
        throw LoadError("feature name count does not match the column count");
    }
}

DataMatrix DataMatrix::select_rows(std::span<const std::size_t> rows) const
{
    std::vector<std::vector<double>> columns(columns_.size());
    std::vector<double> y;
    y.reserve(rows.size());
    for (auto& c : columns) {
        c.reserve(rows.size());
    }
    for (auto r : rows) {
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            columns[j].push_back(columns_[j][r]);
        }
        y.push_back(y_[r]);
    }
    return DataMatrix(std::move(columns), std::move(y), names_);
}

Batch make_batch(const DataMatrix& data, std::span<const std::size_t> rows, std::int64_t id)
{
    Batch batch;
    batch.id = id;
    batch.columns.resize(data.features());
    for (std::size_t j = 0; j < data.features(); ++j) {
        auto col = data.column(j);
        auto& out = batch.columns[j];
        out.reserve(rows.size());
        for (auto r : rows) {
            out.push_back(col[r]);
        }
    }
    batch.y.reserve(rows.size());
    for (auto r : rows) {
        batch.y.push_back(data.y()[r]);
    }
    return batch;
}

Batch full_batch(const DataMatrix& data, std::int64_t id)
{
    Batch batch;
    batch.id = id;
    batch.columns.reserve(data.features());
    for (std::size_t j = 0; j < data.features(); ++j) {
        auto col = data.column(j);
        batch.columns.emplace_back(col.begin(), col.end());
    }
    batch.y.assign(data.y().begin(), data.y().end());
    return batch;
}

namespace {

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r\"");
        auto e = cell.find_last_not_of(" \t\r\"");
        cells.push_back(b == std::string::npos ? std::string {} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column)
{
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc {} || ptr != last) {
        throw LoadError("cannot parse '" + cell + "' at row " + std::to_string(row) + ", column '" + column + "'");
    }
    if (!std::isfinite(value)) {
        throw LoadError("non-finite value '" + cell + "' at row " + std::to_string(row) + ", column '" + column + "'");
    }
    return value;
}

} // namespace

DataMatrix load_csv(const std::filesystem::path& path, const std::string& target_column)
{
    std::ifstream in(path);
    if (!in) {
        throw LoadError("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw LoadError("'" + path.string() + "' is empty");
    }
    auto header = split_line(line);
    auto target_it = std::find(header.begin(), header.end(), target_column);
    if (target_it == header.end()) {
        throw LoadError("target column '" + target_column + "' not found in '" + path.string() + "'");
    }
    auto target = static_cast<std::size_t>(target_it - header.begin());
    if (header.size() < 2) {
        throw LoadError("'" + path.string() + "' has no feature columns");
    }

    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != target) {
            names.push_back(header[j]);
        }
    }
    std::vector<std::vector<double>> columns(names.size());
    std::vector<double> y;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw LoadError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(header.size()));
        }
        std::size_t f = 0;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            auto value = parse_cell(cells[j], row, header[j]);
            if (j == target) {
                y.push_back(value);
            } else {
                columns[f++].push_back(value);
            }
        }
    }
    if (y.empty()) {
        throw LoadError("'" + path.string() + "' has no observations");
    }
    return DataMatrix(std::move(columns), std::move(y), std::move(names));
}

double coefficient_scale(const DataMatrix& data)
{
    double scale = 0.0;
    for (std::size_t j = 0; j < data.features(); ++j) {
        for (auto v : data.column(j)) {
            scale = std::max(scale, std::abs(v));
        }
    }
    return scale;
}

TrainTestSplit split_train_test(const DataMatrix& data, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw LoadError("train fraction must lie in (0, 1)");
    }
    if (data.rows() < 2) {
        throw LoadError("need at least two rows to split");
    }
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng.engine());
    auto n_train = static_cast<std::size_t>(std::round(train_fraction * static_cast<double>(data.rows())));
    n_train = std::clamp<std::size_t>(n_train, 1, data.rows() - 1);
    std::span<const std::size_t> all(order);
    return { data.select_rows(all.first(n_train)), data.select_rows(all.subspan(n_train)) };
}

const std::vector<std::size_t>& BatchSampler::resample(std::size_t n_train)
{
    if (n_train <= batch_size_) {
        current_.resize(n_train);
        std::iota(current_.begin(), current_.end(), 0);
        return current_;
    }
    // partial Fisher-Yates over a persistent permutation
    if (scratch_.size() != n_train) {
        scratch_.resize(n_train);
        std::iota(scratch_.begin(), scratch_.end(), 0);
    }
    for (std::size_t i = 0; i < batch_size_; ++i) {
        auto j = i + rng_.index(n_train - i);
        std::swap(scratch_[i], scratch_[j]);
    }
    current_.assign(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(batch_size_));
    return current_;
}

} // namespace gpgomea
