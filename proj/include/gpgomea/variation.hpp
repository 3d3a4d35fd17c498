#ifndef GPGOMEA_VARIATION_HPP
#define GPGOMEA_VARIATION_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "gpgomea/coeffmut.hpp"
#include "gpgomea/dataset.hpp"
#include "gpgomea/evaluator.hpp"
#include "gpgomea/expr.hpp"
#include "gpgomea/linkage.hpp"
#include "gpgomea/rng.hpp"

namespace gpgomea {

// Copies the donor's slots listed in `subset` (value and sigma) into `offspring`.
void inherit_nodes_by_subset(SolutionTree& offspring, const SolutionTree& donor, std::span<const std::size_t> subset);

// True when every slot of `changed` is either the same symbol as before or
// an intron of `after`; such a change cannot alter any prediction.
[[nodiscard]] bool no_meaningful_change(const SolutionTree& before, const SolutionTree& after, std::span<const std::size_t> changed);

enum class AssessOutcome {
    Unchanged, // no meaningful change, candidate kept without evaluation
    Accepted,
    Rejected,
    OutOfBudget, // evaluation needed but the budget is spent; incumbent kept
};

// On return `incumbent` holds whichever of the two is kept. `candidate` is
// left in an unspecified state.
AssessOutcome assess_changes_and_return_best(SolutionTree& candidate, SolutionTree& incumbent, std::span<const std::size_t> changed,
                                             const Batch& batch, EvalBudget& budget);

// Fresh uniform permutation of 0..n-1.
[[nodiscard]] std::vector<std::size_t> random_subset_order(std::size_t n, Rng& rng);

struct GomTrace {
    std::size_t steps_attempted { 0 };
    std::size_t evaluations_spent { 0 };
    std::size_t mixing_evaluations { 0 };
    std::size_t mutation_evaluations { 0 };
    std::size_t accepted_steps { 0 };
    bool budget_exhausted { false };
    std::vector<double> fitness_trajectory;
};

struct GomContext {
    const FOS& fos;
    std::span<const SolutionTree> population;
    const Batch& batch;
    EvalBudget& budget;
    const CoeffMutConfig& coeffmut;
    const TemperatureState& temperature;
};

struct GomResult {
    SolutionTree offspring;
    GomTrace trace;
};

// Gene-pool optimal mixing of one parent, including the coefficient
// mutation strategy from `ctx.coeffmut`. The parent's fitness must be
// stamped with `ctx.batch`.
[[nodiscard]] GomResult gom(const SolutionTree& parent, const GomContext& ctx, Rng& rng);

} // namespace gpgomea

#endif
