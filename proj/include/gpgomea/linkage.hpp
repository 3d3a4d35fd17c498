#ifndef GPGOMEA_LINKAGE_HPP
#define GPGOMEA_LINKAGE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gpgomea/expr.hpp"

namespace gpgomea {

// Family of subsets over 0-based slot positions, in creation order.
struct FOS {
    std::vector<std::vector<std::size_t>> subsets;

    [[nodiscard]] std::size_t size() const noexcept { return subsets.size(); }
};

// Categorical view of the population: one row per tree, one column per slot.
class SymbolMatrix {
public:
    static constexpr std::int32_t constant_token = 0;

    SymbolMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), tokens_(rows * cols, constant_token) { }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::int32_t operator()(std::size_t r, std::size_t c) const noexcept { return tokens_[c * rows_ + r]; }
    std::int32_t& operator()(std::size_t r, std::size_t c) noexcept { return tokens_[c * rows_ + r]; }
    [[nodiscard]] std::span<const std::int32_t> column(std::size_t c) const noexcept { return { tokens_.data() + c * rows_, rows_ }; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::int32_t> tokens_;
};

// Constants all map to one token; functions and features get distinct ones.
[[nodiscard]] std::int32_t symbol_token(const Node& node) noexcept;
[[nodiscard]] SymbolMatrix symbolize_population(std::span<const SolutionTree> population);

// Square symmetric matrix stored row-major.
struct SimilarityMatrix {
    std::size_t n { 0 };
    std::vector<double> values;

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values[i * n + j]; }
};

// Plug-in mutual information divided by the joint entropy; 1 when the
// joint entropy is zero.
[[nodiscard]] SimilarityMatrix pairwise_nmi(const SymbolMatrix& tokens);

// Average-linkage agglomeration that keeps every cluster it creates except
// the root: 2l - 2 subsets for l slots.
[[nodiscard]] FOS build_linkage_tree(const SimilarityMatrix& similarity);

// One line: [[1], [2], [1, 2], ...] with 1-based slot numbers.
[[nodiscard]] std::string format_fos(const FOS& fos);

} // namespace gpgomea

#endif
