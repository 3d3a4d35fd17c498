#ifndef GPGOMEA_TESTS_SUPPORT_HPP
#define GPGOMEA_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "gpgomea/dataset.hpp"
#include "gpgomea/expr.hpp"
#include "gpgomea/rng.hpp"

namespace gpgomea::testing {

inline std::shared_ptr<const TemplateShape> shape(int depth, int arity = 2)
{
    return std::make_shared<const TemplateShape>(depth, arity);
}

// Tree whose slots are all the given terminal, with the listed overrides
// (0-based slot, node).
inline SolutionTree make_tree(int depth, std::vector<std::pair<std::size_t, Node>> nodes, Node filler = Node::constant(0.5))
{
    auto s = shape(depth);
    std::vector<Node> slots(s->size(), filler);
    for (auto& [slot, node] : nodes) {
        slots[slot] = node;
    }
    return SolutionTree(s, std::move(slots));
}

// Rows drawn uniformly from [lo, hi]^d, target from `fn`.
inline DataMatrix synthetic(std::size_t n, std::size_t d, double lo, double hi, std::uint64_t seed,
                            const std::function<double(const std::vector<double>&)>& fn, double noise_sd = 0.0)
{
    Rng rng(seed);
    std::vector<std::vector<double>> cols(d, std::vector<double>(n));
    std::vector<double> y(n);
    std::vector<double> row(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = rng.uniform(lo, hi);
            cols[j][i] = row[j];
        }
        y[i] = fn(row);
    }
    if (noise_sd > 0.0) {
        for (auto& v : y) {
            v += rng.normal(0.0, noise_sd);
        }
    }
    return DataMatrix(std::move(cols), std::move(y));
}

inline double sample_variance(const std::vector<double>& v)
{
    double mean = 0.0;
    for (auto x : v) {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (auto x : v) {
        ss += (x - mean) * (x - mean);
    }
    return ss / static_cast<double>(v.size() - 1);
}

} // namespace gpgomea::testing

#endif
