#include "gpgomea/variation.hpp"

#include <algorithm>
#include <numeric>

namespace gpgomea {

void inherit_nodes_by_subset(SolutionTree& offspring, const SolutionTree& donor, std::span<const std::size_t> subset)
{
    for (auto slot : subset) {
        offspring[slot] = donor[slot];
    }
}

bool no_meaningful_change(const SolutionTree& before, const SolutionTree& after, std::span<const std::size_t> changed)
{
    ActiveMask mask;
    for (auto slot : changed) {
        if (before[slot].same_symbol(after[slot])) {
            continue;
        }
        if (mask.empty()) {
            mask = compute_active_mask(after);
        }
        if (mask[slot]) {
            return false;
        }
    }
    return true;
}

AssessOutcome assess_changes_and_return_best(SolutionTree& candidate, SolutionTree& incumbent, std::span<const std::size_t> changed,
                                             const Batch& batch, EvalBudget& budget)
{
    if (no_meaningful_change(incumbent, candidate, changed)) {
        candidate.fitness = incumbent.fitness;
        std::swap(candidate, incumbent);
        return AssessOutcome::Unchanged;
    }
    if (!budget.try_consume()) {
        return AssessOutcome::OutOfBudget;
    }
    candidate.fitness = compute_fitness(candidate, batch);
    if (is_better_or_equal(candidate.fitness, incumbent.fitness)) {
        std::swap(candidate, incumbent);
        return AssessOutcome::Accepted;
    }
    return AssessOutcome::Rejected;
}

std::vector<std::size_t> random_subset_order(std::size_t n, Rng& rng)
{
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    return order;
}

namespace {

class GomRunner {
public:
    GomRunner(const SolutionTree& parent, const GomContext& ctx, Rng& rng)
        : ctx_(ctx)
        , rng_(rng)
        , offspring_(parent)
        , candidate_(parent)
    {
    }

    GomResult run()
    {
        const auto strategy = ctx_.coeffmut.strategy;
        for (auto index : random_subset_order(ctx_.fos.size(), rng_)) {
            if (trace_.budget_exhausted) {
                break;
            }
            mixing_step(ctx_.fos.subsets[index], strategy == Strategy::Within);
            if (strategy == Strategy::Between && !trace_.budget_exhausted) {
                mutation_step();
            }
        }
        std::size_t after = 0;
        if (strategy == Strategy::AfterOnce) {
            after = 1;
        } else if (strategy == Strategy::AfterFosSize) {
            after = ctx_.fos.size();
        }
        for (std::size_t k = 0; k < after && !trace_.budget_exhausted; ++k) {
            mutation_step();
        }
        return { std::move(offspring_), std::move(trace_) };
    }

private:
    void record(AssessOutcome outcome, bool mutation)
    {
        switch (outcome) {
        case AssessOutcome::OutOfBudget:
            trace_.budget_exhausted = true;
            return;
        case AssessOutcome::Accepted:
            ++trace_.accepted_steps;
            [[fallthrough]];
        case AssessOutcome::Rejected:
            ++trace_.evaluations_spent;
            ++(mutation ? trace_.mutation_evaluations : trace_.mixing_evaluations);
            break;
        case AssessOutcome::Unchanged:
            break;
        }
        trace_.fitness_trajectory.push_back(offspring_.fitness.mse);
    }

    void mixing_step(std::span<const std::size_t> subset, bool mutate_within)
    {
        ++trace_.steps_attempted;
        const auto& donor = ctx_.population[rng_.index(ctx_.population.size())];
        candidate_ = offspring_;
        inherit_nodes_by_subset(candidate_, donor, subset);
        if (mutate_within) {
            apply_coefficient_mutation(candidate_, ctx_.coeffmut, ctx_.temperature, rng_, subset);
        }
        record(assess_changes_and_return_best(candidate_, offspring_, subset, ctx_.batch, ctx_.budget), false);
    }

    void mutation_step()
    {
        candidate_ = offspring_;
        auto changed = apply_coefficient_mutation(candidate_, ctx_.coeffmut, ctx_.temperature, rng_);
        record(assess_changes_and_return_best(candidate_, offspring_, changed, ctx_.batch, ctx_.budget), true);
    }

    const GomContext& ctx_;
    Rng& rng_;
    SolutionTree offspring_;
    SolutionTree candidate_;
    GomTrace trace_;
};

} // namespace

GomResult gom(const SolutionTree& parent, const GomContext& ctx, Rng& rng)
{
    return GomRunner(parent, ctx, rng).run();
}

} // namespace gpgomea
