#include "gpgomea/coeffmut.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gpgomea {

std::string_view to_string(Strategy s) noexcept
{
    switch (s) {
    case Strategy::Never: return "never";
    case Strategy::AfterOnce: return "after1";
    case Strategy::AfterFosSize: return "afterfos";
    case Strategy::Between: return "between";
    case Strategy::Within: return "within";
    }
    return "never";
}

std::string_view to_string(MutationType t) noexcept
{
    return t == MutationType::EsLike ? "es" : "temp";
}

std::optional<Strategy> strategy_from_string(std::string_view s) noexcept
{
    for (auto candidate : { Strategy::Never, Strategy::AfterOnce, Strategy::AfterFosSize, Strategy::Between, Strategy::Within }) {
        if (s == to_string(candidate)) {
            return candidate;
        }
    }
    return std::nullopt;
}

std::optional<MutationType> mutation_type_from_string(std::string_view s) noexcept
{
    if (s == "es") {
        return MutationType::EsLike;
    }
    if (s == "temp") {
        return MutationType::Temperature;
    }
    return std::nullopt;
}

void CoeffMutConfig::validate() const
{
    if (!(probability >= 0.0 && probability <= 1.0)) {
        throw ConfigError("--prob must lie in [0, 1]");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw ConfigError("--tau must be positive");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("--gamma must be positive");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("--epsilon must be positive");
    }
    if (decay && !(*decay > 0.0 && *decay < 1.0)) {
        throw ConfigError("--decay must lie in (0, 1)");
    }
    if (patience && *patience < 1) {
        throw ConfigError("--patience must be at least 1");
    }
}

double sigma_from_log_step(double log_step, double epsilon) noexcept
{
    return std::max(std::exp(log_step), epsilon);
}

double init_sigma(Rng& rng, double gamma, double epsilon)
{
    return sigma_from_log_step(rng.normal(0.0, gamma), epsilon);
}

std::pair<double, double> es_mutate(double c, double sigma, Rng& rng, double gamma, double epsilon)
{
    double c_new = c + sigma * rng.standard_normal();
    double sigma_new = std::max(sigma * std::exp(rng.normal(0.0, gamma)), epsilon);
    return { c_new, sigma_new };
}

double temp_mutate(double c, double tau, Rng& rng)
{
    return c + std::abs(c * tau) * rng.standard_normal();
}

namespace {

void mutate_slot(Node& node, const CoeffMutConfig& config, const TemperatureState& temperature, Rng& rng)
{
    if (config.type == MutationType::EsLike) {
        auto [c, sigma] = es_mutate(node.value, node.sigma, rng, config.gamma, config.epsilon);
        node.value = c;
        node.sigma = sigma;
    } else {
        node.value = temp_mutate(node.value, temperature.tau_current, rng);
    }
}

} // namespace

std::vector<std::size_t> apply_coefficient_mutation(SolutionTree& tree, const CoeffMutConfig& config,
                                                    const TemperatureState& temperature, Rng& rng,
                                                    std::optional<std::span<const std::size_t>> restrict_to)
{
    std::vector<std::size_t> mutated;
    auto visit = [&](std::size_t slot) {
        auto& node = tree[slot];
        if (node.kind != NodeKind::Constant) {
            return;
        }
        if (rng.bernoulli(config.probability)) {
            mutate_slot(node, config, temperature, rng);
            mutated.push_back(slot);
        }
    };
    if (restrict_to) {
        for (auto slot : *restrict_to) {
            visit(slot);
        }
    } else {
        for (std::size_t slot = 0; slot < tree.size(); ++slot) {
            visit(slot);
        }
    }
    return mutated;
}

TemperatureState update_temperature(TemperatureState state, bool elitist_improved, const CoeffMutConfig& config)
{
    if (!config.decay || !config.patience) {
        return state;
    }
    if (elitist_improved) {
        state.stall_counter = 0;
        return state;
    }
    if (++state.stall_counter >= *config.patience) {
        state.tau_current *= *config.decay;
        state.stall_counter = 0;
        ++state.decays_applied;
    }
    return state;
}

} // namespace gpgomea
