#ifndef GPGOMEA_ENGINE_HPP
#define GPGOMEA_ENGINE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gpgomea/coeffmut.hpp"
#include "gpgomea/dataset.hpp"
#include "gpgomea/evaluator.hpp"
#include "gpgomea/expr.hpp"
#include "gpgomea/linkage.hpp"
#include "gpgomea/rng.hpp"
#include "gpgomea/variation.hpp"

namespace gpgomea {

struct RunConfig {
    std::size_t population_size { 1000 };
    int depth { 4 };
    std::int64_t budget { 1'000'000 };
    std::size_t batch_size { 256 };
    std::uint64_t seed { 0 };
    std::vector<Op> functions { default_function_set() };
    CoeffMutConfig coeffmut {};
    unsigned threads { 1 };
    // 0 runs until the budget is spent.
    std::size_t max_generations { 0 };

    void validate() const;
};

struct GenerationStats {
    std::size_t generation { 0 };
    double best_mse { 0.0 };
    double mean_mse { 0.0 };
    double tau_current { 0.0 };
    std::int64_t evaluations { 0 };
    double elitist_mse { 0.0 };
    std::size_t fos_size { 0 };
    std::size_t max_mixing_evaluations { 0 };
    std::size_t max_mutation_evaluations { 0 };
    // offspring whose batch mse exceeds their parent's; always zero
    std::size_t monotonicity_violations { 0 };
};

struct RunReport {
    std::string best_expression;
    double scale_a { 0.0 };
    double scale_b { 1.0 };
    double best_train_mse_fullset { FitnessInfo::worst };
    std::optional<double> test_mse;
    std::optional<double> test_r2;
    std::int64_t evaluations_used { 0 };
    std::size_t generations { 0 };
    std::size_t best_active_nodes { 0 };
    std::vector<GenerationStats> per_generation_stats;
    std::vector<std::string> warnings;
    std::optional<bool> ground_truth_match;
};

class Engine {
public:
    Engine(RunConfig config, const DataMatrix& train, const DataMatrix* test = nullptr);

    // Builds the initial population, stamps it on the first batch and seeds
    // the elitist. Called by step() when needed.
    void initialize();
    // One generation; no-op once finished().
    void step();
    [[nodiscard]] bool finished() const noexcept;
    void run_to_completion();

    [[nodiscard]] RunReport report() const;

    [[nodiscard]] const RunConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<SolutionTree>& population() const noexcept { return population_; }
    // Re-stamped parents of the current population.
    [[nodiscard]] const std::vector<SolutionTree>& parents() const noexcept { return parents_; }
    [[nodiscard]] const std::vector<GomTrace>& last_traces() const noexcept { return traces_; }
    [[nodiscard]] const SolutionTree& elitist() const noexcept { return elitist_; }
    [[nodiscard]] const EvalBudget& budget() const noexcept { return budget_; }
    [[nodiscard]] const TemperatureState& temperature() const noexcept { return temperature_; }
    [[nodiscard]] const FOS& last_fos() const noexcept { return fos_; }
    [[nodiscard]] const std::vector<GenerationStats>& stats() const noexcept { return stats_; }
    [[nodiscard]] std::size_t generation() const noexcept { return generation_; }
    [[nodiscard]] const Batch& batch() const noexcept { return batch_; }
    [[nodiscard]] const std::shared_ptr<const TemplateShape>& shape() const noexcept { return shape_; }

    // Called with every linkage tree right after it is built.
    std::function<void(std::size_t generation, const FOS&)> on_fos;

private:
    void restamp();
    bool update_elitist();
    void run_gom_all();

    RunConfig config_;
    const DataMatrix& train_;
    const DataMatrix* test_;
    std::shared_ptr<const TemplateShape> shape_;
    Batch full_train_;
    BatchSampler sampler_;
    Batch batch_;
    EvalBudget budget_;
    TemperatureState temperature_;
    std::vector<SolutionTree> population_;
    std::vector<SolutionTree> parents_;
    std::vector<GomTrace> traces_;
    SolutionTree elitist_;
    FOS fos_;
    std::vector<GenerationStats> stats_;
    std::vector<std::string> warnings_;
    std::size_t generation_ { 0 };
    bool initialized_ { false };
};

// Half full, half grow (odd sizes favour grow).
[[nodiscard]] std::vector<SolutionTree> initialize_population(const RunConfig& config, const std::shared_ptr<const TemplateShape>& shape,
                                                              const DataMatrix& data, Rng& rng);

[[nodiscard]] RunReport run(const RunConfig& config, const DataMatrix& train, const DataMatrix* test = nullptr);

[[nodiscard]] std::string report_to_json(const RunReport& report, const RunConfig& config);
void write_stats_csv(std::ostream& out, const std::vector<GenerationStats>& stats);

} // namespace gpgomea

#endif
