#ifndef GPGOMEA_EXPR_HPP
#define GPGOMEA_EXPR_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gpgomea/fitness.hpp"
#include "gpgomea/rng.hpp"

namespace gpgomea {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Op : std::uint8_t { Add, Sub, Mul, Div, Log, Sqrt, Sin, Cos };

inline constexpr std::size_t op_count = 8;

struct FunctionSpec {
    Op op;
    std::string_view name;
    int arity;
};

[[nodiscard]] FunctionSpec function_spec(Op op) noexcept;
[[nodiscard]] std::optional<Op> op_from_name(std::string_view name) noexcept;

// The atomic set used when nothing else is requested: + - * / log sqrt sin cos.
[[nodiscard]] std::vector<Op> default_function_set();
// Parses "add,sub,mul,div,log,sqrt,sin,cos" (symbols "+-*/" are accepted too).
[[nodiscard]] std::vector<Op> parse_function_set(std::string_view text);
[[nodiscard]] int max_arity(std::span<const Op> functions);

enum class NodeKind : std::uint8_t { Function, Feature, Constant };

// Content of one template slot.
struct Node {
    NodeKind kind { NodeKind::Constant };
    Op op { Op::Add };
    std::uint32_t feature { 0 };
    double value { 0.0 };
    double sigma { 1.0 };

    static Node function(Op o) noexcept { return Node { NodeKind::Function, o, 0, 0.0, 1.0 }; }
    static Node variable(std::uint32_t index) noexcept { return Node { NodeKind::Feature, Op::Add, index, 0.0, 1.0 }; }
    static Node constant(double c, double sigma = 1.0) noexcept { return Node { NodeKind::Constant, Op::Add, 0, c, sigma }; }

    [[nodiscard]] int arity() const noexcept { return kind == NodeKind::Function ? function_spec(op).arity : 0; }

    // Same computation: same function, same feature, or same constant value.
    // Sigma does not take part since it never affects predictions.
    [[nodiscard]] bool same_symbol(const Node& other) const noexcept
    {
        if (kind != other.kind) {
            return false;
        }
        switch (kind) {
        case NodeKind::Function: return op == other.op;
        case NodeKind::Feature: return feature == other.feature;
        case NodeKind::Constant: return value == other.value;
        }
        return false;
    }
};

// Number of slots of a full tree of the given depth and arity.
// Throws ConfigError when the count does not fit in 32 bits.
[[nodiscard]] std::size_t template_size(int depth, int max_arity);

// Geometry of the full m-ary template. Slots are numbered in pre-order,
// starting at 0 for the root (user-facing dumps add 1).
class TemplateShape {
public:
    TemplateShape(int depth, int max_arity);

    [[nodiscard]] int depth() const noexcept { return depth_; }
    [[nodiscard]] int max_arity() const noexcept { return max_arity_; }
    [[nodiscard]] std::size_t size() const noexcept { return slot_depth_.size(); }
    [[nodiscard]] int slot_depth(std::size_t slot) const noexcept { return slot_depth_[slot]; }
    // Number of slots in a subtree whose root sits at `level`.
    [[nodiscard]] std::size_t subtree_size(int level) const noexcept { return subtree_size_[static_cast<std::size_t>(level)]; }

    // k-th child (0-based) of `slot`; only valid for slots above max depth.
    [[nodiscard]] std::size_t child(std::size_t slot, int k) const noexcept
    {
        return slot + 1 + static_cast<std::size_t>(k) * subtree_size(slot_depth_[slot] + 1);
    }

    bool operator==(const TemplateShape& other) const noexcept { return depth_ == other.depth_ && max_arity_ == other.max_arity_; }

private:
    int depth_;
    int max_arity_;
    std::vector<std::size_t> subtree_size_;
    std::vector<int> slot_depth_;
};

// Pre-order child indices of a 0-based slot at the given depth.
[[nodiscard]] std::vector<std::size_t> children_indices(std::size_t slot, int depth_of_slot, int depth, int max_arity);

using ActiveMask = std::vector<bool>;

// Fixed-length slot array holding a full template tree. Every slot is
// populated; slots below a function of arity a < m (beyond its first a
// children) or below a terminal are introns.
class SolutionTree {
public:
    SolutionTree() = default;
    SolutionTree(std::shared_ptr<const TemplateShape> shape, std::vector<Node> slots);

    [[nodiscard]] const TemplateShape& shape() const noexcept { return *shape_; }
    [[nodiscard]] const std::shared_ptr<const TemplateShape>& shape_ptr() const noexcept { return shape_; }
    [[nodiscard]] std::size_t size() const noexcept { return slots_.size(); }

    [[nodiscard]] const Node& operator[](std::size_t i) const noexcept { return slots_[i]; }
    [[nodiscard]] Node& operator[](std::size_t i) noexcept { return slots_[i]; }
    [[nodiscard]] std::span<const Node> slots() const noexcept { return slots_; }
    [[nodiscard]] std::span<Node> slots() noexcept { return slots_; }

    FitnessInfo fitness {};

private:
    std::shared_ptr<const TemplateShape> shape_;
    std::vector<Node> slots_;
};

[[nodiscard]] ActiveMask compute_active_mask(const SolutionTree& tree);
[[nodiscard]] std::size_t active_node_count(const SolutionTree& tree);

enum class InitMode { Full, Grow };

struct TreeInitConfig {
    std::vector<Op> functions { default_function_set() };
    std::size_t n_features { 1 };
    double coeff_scale { 1.0 };
    double gamma { 0.1 };
    double epsilon { 1e-16 };
};

// Constant drawn at initialization from a U(-5, 5) sample.
[[nodiscard]] constexpr double initial_constant(double coeff_scale, double uniform_draw) noexcept
{
    return coeff_scale * uniform_draw;
}

[[nodiscard]] SolutionTree random_tree(InitMode mode, const std::shared_ptr<const TemplateShape>& shape,
                                       const TreeInitConfig& config, Rng& rng);

// Shortest decimal text that reads back to the same double; integral values
// keep a trailing ".0".
[[nodiscard]] std::string format_number(double value);

// Infix text of the active part of the tree. Features print as x1..xd unless
// names are supplied.
[[nodiscard]] std::string to_expression_string(const SolutionTree& tree, std::span<const std::string> feature_names = {});

} // namespace gpgomea

#endif
