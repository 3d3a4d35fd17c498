#include "gpgomea/evaluator.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace gpgomea {

namespace {

// Per-thread scratch: one row buffer per template slot.
struct Workspace {
    std::vector<double> values;
    std::vector<double> constants;
};

thread_local Workspace workspace;

const double* eval_slot(const SolutionTree& tree, std::size_t slot, const Batch& batch, std::size_t n, double* buffers)
{
    const auto& node = tree[slot];
    double* out = buffers + slot * n;
    switch (node.kind) {
    case NodeKind::Feature:
        return batch.columns[node.feature].data();
    case NodeKind::Constant:
        std::fill(out, out + n, node.value);
        return out;
    case NodeKind::Function:
        break;
    }
    const auto& shape = tree.shape();
    const double* lhs = eval_slot(tree, shape.child(slot, 0), batch, n, buffers);
    switch (node.op) {
    case Op::Log:
        for (std::size_t i = 0; i < n; ++i) { out[i] = protected_log(lhs[i]); }
        return out;
    case Op::Sqrt:
        for (std::size_t i = 0; i < n; ++i) { out[i] = protected_sqrt(lhs[i]); }
        return out;
    case Op::Sin:
        for (std::size_t i = 0; i < n; ++i) { out[i] = std::sin(lhs[i]); }
        return out;
    case Op::Cos:
        for (std::size_t i = 0; i < n; ++i) { out[i] = std::cos(lhs[i]); }
        return out;
    default:
        break;
    }
    const double* rhs = eval_slot(tree, shape.child(slot, 1), batch, n, buffers);
    switch (node.op) {
    case Op::Add:
        for (std::size_t i = 0; i < n; ++i) { out[i] = lhs[i] + rhs[i]; }
        break;
    case Op::Sub:
        for (std::size_t i = 0; i < n; ++i) { out[i] = lhs[i] - rhs[i]; }
        break;
    case Op::Mul:
        for (std::size_t i = 0; i < n; ++i) { out[i] = lhs[i] * rhs[i]; }
        break;
    case Op::Div:
        for (std::size_t i = 0; i < n; ++i) { out[i] = protected_div(lhs[i], rhs[i]); }
        break;
    default:
        break;
    }
    return out;
}

} // namespace

void predict(const SolutionTree& tree, const Batch& batch, std::vector<double>& out)
{
    const auto n = batch.rows();
    auto& buffers = workspace.values;
    if (buffers.size() < tree.size() * n) {
        buffers.resize(tree.size() * n);
    }
    const double* result = eval_slot(tree, 0, batch, n, buffers.data());
    out.assign(result, result + n);
}

std::vector<double> predict(const SolutionTree& tree, const Batch& batch)
{
    std::vector<double> out;
    predict(tree, batch, out);
    return out;
}

LinearScaling linear_scale(std::span<const double> f, std::span<const double> y)
{
    assert(f.size() == y.size() && !f.empty());
    const auto n = static_cast<double>(f.size());
    double f_mean = 0.0;
    double y_mean = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        f_mean += f[i];
        y_mean += y[i];
    }
    f_mean /= n;
    y_mean /= n;
    double cov = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto df = f[i] - f_mean;
        cov += (y[i] - y_mean) * df;
        var += df * df;
    }
    if (!(var >= 1e-30)) {
        return { y_mean, 0.0 };
    }
    double b = cov / var;
    return { y_mean - b * f_mean, b };
}

double scaled_mse(std::span<const double> f, std::span<const double> y, LinearScaling s)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto r = y[i] - (s.a + s.b * f[i]);
        sum += r * r;
    }
    auto mse = sum / static_cast<double>(f.size());
    return std::isfinite(mse) ? mse : FitnessInfo::worst;
}

FitnessInfo compute_fitness(const SolutionTree& tree, const Batch& batch)
{
    FitnessInfo info;
    info.batch_id = batch.id;
    auto& f = workspace.constants;
    predict(tree, batch, f);
    for (auto v : f) {
        if (!std::isfinite(v)) {
            return info;
        }
    }
    auto scaling = linear_scale(f, batch.y);
    auto mse = scaled_mse(f, batch.y, scaling);
    if (!std::isfinite(mse) || !std::isfinite(scaling.a) || !std::isfinite(scaling.b)) {
        return info;
    }
    info.mse = mse;
    info.scale_a = scaling.a;
    info.scale_b = scaling.b;
    return info;
}

FitnessInfo evaluate_fitness(const SolutionTree& tree, const Batch& batch, EvalBudget& budget)
{
    budget.charge();
    return compute_fitness(tree, batch);
}

bool is_better_or_equal(const FitnessInfo& lhs, const FitnessInfo& rhs)
{
    assert(lhs.batch_id == rhs.batch_id && "fitness values from different batches");
    if (rhs.is_worst()) {
        return true;
    }
    if (lhs.is_worst()) {
        return false;
    }
    return lhs.mse <= rhs.mse;
}

double r2_score(std::span<const double> prediction, std::span<const double> y)
{
    double mean = 0.0;
    for (auto v : y) {
        mean += v;
    }
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - prediction[i]) * (y[i] - prediction[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (!std::isfinite(ss_res)) {
        return -std::numeric_limits<double>::infinity();
    }
    if (ss_tot == 0.0) {
        return ss_res == 0.0 ? 1.0 : 0.0;
    }
    return 1.0 - ss_res / ss_tot;
}

} // namespace gpgomea
