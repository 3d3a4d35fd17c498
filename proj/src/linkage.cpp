#include "gpgomea/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gpgomea {

std::int32_t symbol_token(const Node& node) noexcept
{
    switch (node.kind) {
    case NodeKind::Constant: return SymbolMatrix::constant_token;
    case NodeKind::Function: return 1 + static_cast<std::int32_t>(node.op);
    case NodeKind::Feature: return 1 + static_cast<std::int32_t>(op_count) + static_cast<std::int32_t>(node.feature);
    }
    return SymbolMatrix::constant_token;
}

SymbolMatrix symbolize_population(std::span<const SolutionTree> population)
{
    const auto cols = population.empty() ? 0 : population.front().size();
    SymbolMatrix tokens(population.size(), cols);
    for (std::size_t r = 0; r < population.size(); ++r) {
        const auto& tree = population[r];
        for (std::size_t c = 0; c < cols; ++c) {
            tokens(r, c) = symbol_token(tree[c]);
        }
    }
    return tokens;
}

namespace {

// Column recoded to dense labels 0..k-1.
struct DenseColumn {
    std::vector<std::uint32_t> labels;
    std::uint32_t cardinality { 0 };
    double entropy { 0.0 };
};

double plogp_sum(std::span<const std::uint32_t> counts, double n)
{
    double h = 0.0;
    for (auto c : counts) {
        if (c > 0) {
            double p = static_cast<double>(c) / n;
            h -= p * std::log(p);
        }
    }
    return h;
}

DenseColumn densify(std::span<const std::int32_t> column)
{
    DenseColumn out;
    out.labels.resize(column.size());
    std::vector<std::int32_t> seen;
    for (std::size_t r = 0; r < column.size(); ++r) {
        auto it = std::find(seen.begin(), seen.end(), column[r]);
        if (it == seen.end()) {
            seen.push_back(column[r]);
            it = seen.end() - 1;
        }
        out.labels[r] = static_cast<std::uint32_t>(it - seen.begin());
    }
    out.cardinality = static_cast<std::uint32_t>(seen.size());
    std::vector<std::uint32_t> counts(out.cardinality, 0);
    for (auto l : out.labels) {
        ++counts[l];
    }
    out.entropy = plogp_sum(counts, static_cast<double>(column.size()));
    return out;
}

} // namespace

SimilarityMatrix pairwise_nmi(const SymbolMatrix& tokens)
{
    const auto l = tokens.cols();
    const auto n = static_cast<double>(tokens.rows());
    std::vector<DenseColumn> columns;
    columns.reserve(l);
    for (std::size_t c = 0; c < l; ++c) {
        columns.push_back(densify(tokens.column(c)));
    }
    SimilarityMatrix nmi { l, std::vector<double>(l * l, 0.0) };
    std::vector<std::uint32_t> joint;
    for (std::size_t i = 0; i < l; ++i) {
        nmi(i, i) = 1.0;
        for (std::size_t j = i + 1; j < l; ++j) {
            const auto& a = columns[i];
            const auto& b = columns[j];
            joint.assign(static_cast<std::size_t>(a.cardinality) * b.cardinality, 0);
            for (std::size_t r = 0; r < tokens.rows(); ++r) {
                ++joint[a.labels[r] * b.cardinality + b.labels[r]];
            }
            double h_joint = plogp_sum(joint, n);
            double value = 1.0;
            if (h_joint > 0.0) {
                double mi = a.entropy + b.entropy - h_joint;
                value = std::clamp(mi / h_joint, 0.0, 1.0);
            }
            nmi(i, j) = value;
            nmi(j, i) = value;
        }
    }
    return nmi;
}

FOS build_linkage_tree(const SimilarityMatrix& similarity)
{
    const auto l = similarity.n;
    FOS fos;
    if (l == 0) {
        return fos;
    }
    fos.subsets.reserve(2 * l);
    struct Cluster {
        std::vector<std::size_t> members;
    };
    std::vector<Cluster> clusters;
    clusters.reserve(l);
    for (std::size_t i = 0; i < l; ++i) {
        clusters.push_back({ { i } });
        fos.subsets.push_back({ i });
    }
    // average inter-cluster similarity, updated by size-weighted averaging
    auto sim = similarity.values;
    auto at = [&](std::size_t a, std::size_t b) -> double& { return sim[a * l + b]; };
    std::vector<std::size_t> alive(l);
    for (std::size_t i = 0; i < l; ++i) {
        alive[i] = i;
    }
    while (alive.size() > 1) {
        std::size_t best_a = 0;
        std::size_t best_b = 1;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < alive.size(); ++x) {
            for (std::size_t y = x + 1; y < alive.size(); ++y) {
                auto s = at(alive[x], alive[y]);
                if (s > best) {
                    best = s;
                    best_a = x;
                    best_b = y;
                }
            }
        }
        auto ca = alive[best_a];
        auto cb = alive[best_b];
        auto size_a = static_cast<double>(clusters[ca].members.size());
        auto size_b = static_cast<double>(clusters[cb].members.size());
        for (auto k : alive) {
            if (k == ca || k == cb) {
                continue;
            }
            double merged = (size_a * at(ca, k) + size_b * at(cb, k)) / (size_a + size_b);
            at(ca, k) = merged;
            at(k, ca) = merged;
        }
        auto& members = clusters[ca].members;
        members.insert(members.end(), clusters[cb].members.begin(), clusters[cb].members.end());
        std::sort(members.begin(), members.end());
        clusters[cb].members.clear();
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(best_b));
        if (alive.size() > 1) {
            fos.subsets.push_back(members);
        }
    }
    return fos;
}

std::string format_fos(const FOS& fos)
{
    std::string out = "[";
    for (std::size_t s = 0; s < fos.subsets.size(); ++s) {
        out += s == 0 ? "[" : ", [";
        for (std::size_t k = 0; k < fos.subsets[s].size(); ++k) {
            if (k > 0) {
                out += ", ";
            }
            out += std::to_string(fos.subsets[s][k] + 1);
        }
        out += ']';
    }
    out += ']';
    return out;
}

} // namespace gpgomea
