#ifndef GPGOMEA_DATASET_HPP
#define GPGOMEA_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpgomea/rng.hpp"

namespace gpgomea {

class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Feature matrix stored column by column, plus the target vector.
class DataMatrix {
public:
    DataMatrix() = default;
    // Throws LoadError on shape mismatch, empty data or non-finite entries.
    DataMatrix(std::vector<std::vector<double>> columns, std::vector<double> y, std::vector<std::string> feature_names = {});

    [[nodiscard]] std::size_t rows() const noexcept { return y_.size(); }
    [[nodiscard]] std::size_t features() const noexcept { return columns_.size(); }
    [[nodiscard]] std::span<const double> column(std::size_t j) const noexcept { return columns_[j]; }
    [[nodiscard]] std::span<const double> y() const noexcept { return y_; }
    [[nodiscard]] double x(std::size_t row, std::size_t j) const noexcept { return columns_[j][row]; }
    [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept { return names_; }

    [[nodiscard]] DataMatrix select_rows(std::span<const std::size_t> rows) const;

private:
    std::vector<std::vector<double>> columns_;
    std::vector<double> y_;
    std::vector<std::string> names_;
};

// Gathered, contiguous copy of a subset of rows; what the evaluator reads.
struct Batch {
    std::vector<std::vector<double>> columns;
    std::vector<double> y;
    std::int64_t id { -1 };

    [[nodiscard]] std::size_t rows() const noexcept { return y.size(); }
};

[[nodiscard]] Batch make_batch(const DataMatrix& data, std::span<const std::size_t> rows, std::int64_t id);
[[nodiscard]] Batch full_batch(const DataMatrix& data, std::int64_t id = -1);

// Comma-separated file with a header row. The target column is removed from
// the features.
[[nodiscard]] DataMatrix load_csv(const std::filesystem::path& path, const std::string& target_column);

// max_{i,j} |x_i^(j)|
[[nodiscard]] double coefficient_scale(const DataMatrix& data);

struct TrainTestSplit {
    DataMatrix train;
    DataMatrix test;
};

// Seeded shuffle split; `train_fraction` of the rows (at least one) go to train.
[[nodiscard]] TrainTestSplit split_train_test(const DataMatrix& data, double train_fraction, std::uint64_t seed);

class BatchSampler {
public:
    BatchSampler(std::size_t batch_size, std::uint64_t seed) : batch_size_(batch_size), rng_(seed) { }

    // Once per generation. All rows when n_train <= batch size, otherwise a
    // uniform sample without replacement.
    const std::vector<std::size_t>& resample(std::size_t n_train);

    [[nodiscard]] const std::vector<std::size_t>& current() const noexcept { return current_; }
    [[nodiscard]] std::size_t batch_size() const noexcept { return batch_size_; }

private:
    std::size_t batch_size_;
    Rng rng_;
    std::vector<std::size_t> current_;
    std::vector<std::size_t> scratch_;
};

} // namespace gpgomea

#endif
