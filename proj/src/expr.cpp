#include "gpgomea/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "gpgomea/coeffmut.hpp"

namespace gpgomea {

namespace {

constexpr std::array<FunctionSpec, op_count> function_table { {
    { Op::Add, "+", 2 },
    { Op::Sub, "-", 2 },
    { Op::Mul, "*", 2 },
    { Op::Div, "/", 2 },
    { Op::Log, "log", 1 },
    { Op::Sqrt, "sqrt", 1 },
    { Op::Sin, "sin", 1 },
    { Op::Cos, "cos", 1 },
} };

constexpr std::array<std::string_view, op_count> long_names { "add", "sub", "mul", "div", "log", "sqrt", "sin", "cos" };

} // namespace

FunctionSpec function_spec(Op op) noexcept
{
    return function_table[static_cast<std::size_t>(op)];
}

std::optional<Op> op_from_name(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < op_count; ++i) {
        if (name == function_table[i].name || name == long_names[i]) {
            return function_table[i].op;
        }
    }
    return std::nullopt;
}

std::vector<Op> default_function_set()
{
    return { Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Log, Op::Sqrt, Op::Sin, Op::Cos };
}

std::vector<Op> parse_function_set(std::string_view text)
{
    std::vector<Op> ops;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto token = text.substr(0, comma);
        while (!token.empty() && token.front() == ' ') {
            token.remove_prefix(1);
        }
        while (!token.empty() && token.back() == ' ') {
            token.remove_suffix(1);
        }
        auto op = op_from_name(token);
        if (!op) {
            throw ConfigError("unknown function '" + std::string(token) + "'");
        }
        ops.push_back(*op);
        text = comma == std::string_view::npos ? std::string_view {} : text.substr(comma + 1);
    }
    if (ops.empty()) {
        throw ConfigError("function set is empty");
    }
    return ops;
}

int max_arity(std::span<const Op> functions)
{
    int m = 0;
    for (auto op : functions) {
        m = std::max(m, function_spec(op).arity);
    }
    return m;
}

std::size_t template_size(int depth, int max_arity)
{
    if (depth < 0 || max_arity < 1) {
        throw ConfigError("template needs depth >= 0 and max arity >= 1");
    }
    constexpr std::uint64_t limit = std::numeric_limits<std::uint32_t>::max();
    std::uint64_t total = 0;
    std::uint64_t level = 1;
    for (int d = 0; d <= depth; ++d) {
        total += level;
        if (total > limit) {
            throw ConfigError("template of depth " + std::to_string(depth) + " and arity " + std::to_string(max_arity) + " is too large");
        }
        if (d < depth) {
            level *= static_cast<std::uint64_t>(max_arity);
            if (level > limit) {
                throw ConfigError("template of depth " + std::to_string(depth) + " and arity " + std::to_string(max_arity) + " is too large");
            }
        }
    }
    return static_cast<std::size_t>(total);
}

TemplateShape::TemplateShape(int depth, int max_arity)
    : depth_(depth)
    , max_arity_(max_arity)
{
    auto size = template_size(depth, max_arity);
    subtree_size_.resize(static_cast<std::size_t>(depth) + 2, 0);
    for (int level = depth; level >= 0; --level) {
        subtree_size_[static_cast<std::size_t>(level)] = template_size(depth - level, max_arity);
    }
    slot_depth_.resize(size);
    // pre-order walk: a slot's subtree occupies the next subtree_size slots
    std::vector<std::pair<std::size_t, int>> stack { { 0, 0 } };
    while (!stack.empty()) {
        auto [slot, level] = stack.back();
        stack.pop_back();
        slot_depth_[slot] = level;
        if (level < depth) {
            for (int k = max_arity - 1; k >= 0; --k) {
                stack.emplace_back(slot + 1 + static_cast<std::size_t>(k) * subtree_size_[static_cast<std::size_t>(level) + 1], level + 1);
            }
        }
    }
}

std::vector<std::size_t> children_indices(std::size_t slot, int depth_of_slot, int depth, int max_arity)
{
    std::vector<std::size_t> children;
    if (depth_of_slot >= depth) {
        return children;
    }
    auto child_size = template_size(depth - depth_of_slot - 1, max_arity);
    children.reserve(static_cast<std::size_t>(max_arity));
    for (int k = 0; k < max_arity; ++k) {
        children.push_back(slot + 1 + static_cast<std::size_t>(k) * child_size);
    }
    return children;
}

SolutionTree::SolutionTree(std::shared_ptr<const TemplateShape> shape, std::vector<Node> slots)
    : shape_(std::move(shape))
    , slots_(std::move(slots))
{
    if (!shape_ || slots_.size() != shape_->size()) {
        throw ConfigError("slot count does not match the template");
    }
}

ActiveMask compute_active_mask(const SolutionTree& tree)
{
    const auto& shape = tree.shape();
    ActiveMask active(tree.size(), false);
    std::vector<std::size_t> stack { 0 };
    while (!stack.empty()) {
        auto slot = stack.back();
        stack.pop_back();
        active[slot] = true;
        auto arity = tree[slot].arity();
        for (int k = 0; k < arity; ++k) {
            stack.push_back(shape.child(slot, k));
        }
    }
    return active;
}

std::size_t active_node_count(const SolutionTree& tree)
{
    auto mask = compute_active_mask(tree);
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

SolutionTree random_tree(InitMode mode, const std::shared_ptr<const TemplateShape>& shape,
                         const TreeInitConfig& config, Rng& rng)
{
    if (config.functions.empty()) {
        throw ConfigError("function set is empty");
    }
    if (!(config.coeff_scale >= 0.0)) {
        throw ConfigError("coefficient scale must be non-negative");
    }
    if (max_arity(config.functions) > shape->max_arity()) {
        throw ConfigError("function arity exceeds the template arity");
    }
    const auto n_terminals = config.n_features + 1;
    std::vector<Node> slots(shape->size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        bool terminal = shape->slot_depth(i) == shape->depth();
        if (!terminal && mode == InitMode::Grow) {
            terminal = rng.bernoulli(0.5);
        }
        if (!terminal) {
            slots[i] = Node::function(config.functions[rng.index(config.functions.size())]);
            continue;
        }
        auto pick = rng.index(n_terminals);
        if (pick < config.n_features) {
            slots[i] = Node::variable(static_cast<std::uint32_t>(pick));
        } else {
            auto c = initial_constant(config.coeff_scale, rng.uniform(-5.0, 5.0));
            slots[i] = Node::constant(c, init_sigma(rng, config.gamma, config.epsilon));
        }
    }
    return SolutionTree(shape, std::move(slots));
}

std::string format_number(double value)
{
    std::array<char, 64> buf {};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    std::string text(buf.data(), end);
    if (std::isfinite(value) && text.find_first_of(".eE") == std::string::npos) {
        text += ".0";
    }
    return text;
}

namespace {

void append_expression(const SolutionTree& tree, std::size_t slot, std::span<const std::string> names, bool top, std::string& out)
{
    const auto& node = tree[slot];
    switch (node.kind) {
    case NodeKind::Feature:
        if (node.feature < names.size()) {
            out += names[node.feature];
        } else {
            out += 'x';
            out += std::to_string(node.feature + 1);
        }
        return;
    case NodeKind::Constant:
        if (node.value < 0.0 || std::signbit(node.value)) {
            out += '(';
            out += format_number(node.value);
            out += ')';
        } else {
            out += format_number(node.value);
        }
        return;
    case NodeKind::Function:
        break;
    }
    auto spec = function_spec(node.op);
    const auto& shape = tree.shape();
    if (spec.arity == 1) {
        out += spec.name;
        out += '(';
        append_expression(tree, shape.child(slot, 0), names, true, out);
        out += ')';
        return;
    }
    if (!top) {
        out += '(';
    }
    append_expression(tree, shape.child(slot, 0), names, false, out);
    out += ' ';
    out += spec.name;
    out += ' ';
    append_expression(tree, shape.child(slot, 1), names, false, out);
    if (!top) {
        out += ')';
    }
}

} // namespace

std::string to_expression_string(const SolutionTree& tree, std::span<const std::string> feature_names)
{
    std::string out;
    append_expression(tree, 0, feature_names, true, out);
    return out;
}

} // namespace gpgomea
