#ifndef GPGOMEA_EVALUATOR_HPP
#define GPGOMEA_EVALUATOR_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gpgomea/dataset.hpp"
#include "gpgomea/expr.hpp"
#include "gpgomea/fitness.hpp"

namespace gpgomea {

inline constexpr double protection_threshold = 1e-12;

// Protected operator semantics shared by the tree evaluator and the
// expression parser.
[[nodiscard]] inline double protected_div(double num, double den) noexcept
{
    if (std::abs(den) < protection_threshold) {
        den = std::signbit(den) ? -protection_threshold : protection_threshold;
    }
    return num / den;
}
[[nodiscard]] inline double protected_log(double x) noexcept { return std::log(std::abs(x) + protection_threshold); }
[[nodiscard]] inline double protected_sqrt(double x) noexcept { return std::sqrt(std::abs(x)); }

// Counts fitness evaluations. Increments are exact under concurrency.
class EvalBudget {
public:
    explicit EvalBudget(std::int64_t limit = 1'000'000) : limit_(limit) { }
    EvalBudget(const EvalBudget&) = delete;
    EvalBudget& operator=(const EvalBudget&) = delete;

    [[nodiscard]] std::int64_t used() const noexcept { return used_.load(std::memory_order_relaxed); }
    [[nodiscard]] std::int64_t limit() const noexcept { return limit_; }
    [[nodiscard]] bool exhausted() const noexcept { return used() >= limit_; }

    void charge(std::int64_t n = 1) noexcept { used_.fetch_add(n, std::memory_order_relaxed); }

    // Takes one unit only while below the limit.
    bool try_consume() noexcept
    {
        auto current = used_.load(std::memory_order_relaxed);
        while (current < limit_) {
            if (used_.compare_exchange_weak(current, current + 1, std::memory_order_relaxed)) {
                return true;
            }
        }
        return false;
    }

private:
    std::int64_t limit_;
    std::atomic<std::int64_t> used_ { 0 };
};

// Output of the active part of `tree` for every row of the batch.
[[nodiscard]] std::vector<double> predict(const SolutionTree& tree, const Batch& batch);
void predict(const SolutionTree& tree, const Batch& batch, std::vector<double>& out);

struct LinearScaling {
    double a { 0.0 };
    double b { 0.0 };
};

// Least-squares (a, b) for y ~ a + b * f. Zero-variance f yields (mean(y), 0).
[[nodiscard]] LinearScaling linear_scale(std::span<const double> f, std::span<const double> y);

// Mean of (y - (a + b f))^2; +inf when anything is non-finite.
[[nodiscard]] double scaled_mse(std::span<const double> f, std::span<const double> y, LinearScaling s);

// Linear-scaled MSE on the batch without touching any budget.
[[nodiscard]] FitnessInfo compute_fitness(const SolutionTree& tree, const Batch& batch);

// compute_fitness plus exactly one budget tick.
[[nodiscard]] FitnessInfo evaluate_fitness(const SolutionTree& tree, const Batch& batch, EvalBudget& budget);

// Minimization order with the worst sentinel above every finite value.
// Both values must come from the same batch.
[[nodiscard]] bool is_better_or_equal(const FitnessInfo& lhs, const FitnessInfo& rhs);

[[nodiscard]] double r2_score(std::span<const double> prediction, std::span<const double> y);

} // namespace gpgomea

#endif
