#ifndef GPGOMEA_COEFFMUT_HPP
#define GPGOMEA_COEFFMUT_HPP

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gpgomea/expr.hpp"
#include "gpgomea/rng.hpp"

namespace gpgomea {

// When coefficient mutation is applied relative to the mixing steps.
enum class Strategy {
    Never,
    AfterOnce,    // one application after all mixing steps
    AfterFosSize, // |FOS| applications after all mixing steps
    Between,      // one application after every mixing step
    Within,       // inside a mixing step, on the donated constants only
};

enum class MutationType { EsLike, Temperature };

[[nodiscard]] std::string_view to_string(Strategy s) noexcept;
[[nodiscard]] std::string_view to_string(MutationType t) noexcept;
[[nodiscard]] std::optional<Strategy> strategy_from_string(std::string_view s) noexcept;
[[nodiscard]] std::optional<MutationType> mutation_type_from_string(std::string_view s) noexcept;

struct CoeffMutConfig {
    Strategy strategy { Strategy::Never };
    double probability { 0.5 };
    MutationType type { MutationType::Temperature };
    double tau { 0.1 };
    double gamma { 0.1 };
    double epsilon { 1e-16 };
    std::optional<double> decay;
    std::optional<int> patience;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Global temperature shared by all constants, decayed after the elitist
// stalls for `patience` generations.
struct TemperatureState {
    double tau_current { 0.1 };
    int stall_counter { 0 };
    int decays_applied { 0 };

    static TemperatureState from_config(const CoeffMutConfig& config) { return { config.tau, 0, 0 }; }
};

// max(exp(N(0, gamma^2)), epsilon)
[[nodiscard]] double init_sigma(Rng& rng, double gamma, double epsilon);
// Clamped step size from a log-normal exponent, i.e. max(exp(log_step), epsilon).
[[nodiscard]] double sigma_from_log_step(double log_step, double epsilon) noexcept;

// Self-adaptive update: c' ~ N(c, sigma^2), sigma' = max(sigma * exp(N(0, gamma^2)), epsilon).
[[nodiscard]] std::pair<double, double> es_mutate(double c, double sigma, Rng& rng, double gamma, double epsilon);

// c' ~ N(c, (c * tau)^2). Zero is a fixed point.
[[nodiscard]] double temp_mutate(double c, double tau, Rng& rng);

// Mutates each eligible constant with the configured probability. Eligible
// constants are those in `restrict_to` when given, otherwise every constant
// slot (introns included). Returns the slots that were mutated.
std::vector<std::size_t> apply_coefficient_mutation(SolutionTree& tree, const CoeffMutConfig& config,
                                                    const TemperatureState& temperature, Rng& rng,
                                                    std::optional<std::span<const std::size_t>> restrict_to = std::nullopt);

// Once per generation, after the elitist comparison.
TemperatureState update_temperature(TemperatureState state, bool elitist_improved, const CoeffMutConfig& config);

} // namespace gpgomea

#endif
