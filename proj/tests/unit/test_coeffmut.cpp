#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <set>
#include <tuple>

#include "gpgomea/coeffmut.hpp"
#include "support.hpp"

using namespace gpgomea;
using gpgomea::testing::sample_variance;

namespace {

// depth 2 binary: slots 0,1,4 functions; 2 feature; 3,5,6 constants
SolutionTree mixed_tree()
{
    return gpgomea::testing::make_tree(2, {
        { 0, Node::function(Op::Add) },
        { 1, Node::function(Op::Mul) },
        { 2, Node::variable(0) },
        { 3, Node::constant(2.0) },
        { 4, Node::function(Op::Sin) },
        { 5, Node::constant(-3.0) },
        { 6, Node::constant(4.0) },
    });
}

} // namespace

TEST_CASE("config validation")
{
    CoeffMutConfig c;
    CHECK_NOTHROW(c.validate());
    c.tau = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.probability = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.epsilon = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.decay = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.patience = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    for (auto s : { Strategy::Never, Strategy::AfterOnce, Strategy::AfterFosSize, Strategy::Between, Strategy::Within }) {
        CHECK(strategy_from_string(to_string(s)) == s);
    }
    CHECK(mutation_type_from_string("es") == MutationType::EsLike);
    CHECK(mutation_type_from_string("temp") == MutationType::Temperature);
    CHECK_FALSE(strategy_from_string("sometimes"));
}

TEST_CASE("initial sigma")
{
    CHECK(sigma_from_log_step(0.0, 1e-16) == 1.0);
    CHECK(sigma_from_log_step(-100.0, 1e-16) == 1e-16);
    CHECK(sigma_from_log_step(std::log(2.0), 1e-16) == doctest::Approx(2.0));

    Rng rng(2);
    const int n = 100000;
    std::vector<double> logs(n);
    double mean = 0.0;
    for (auto& v : logs) {
        v = std::log(init_sigma(rng, 0.1, 1e-16));
        mean += v;
    }
    mean /= n;
    // log sigma ~ N(0, gamma^2)
    CHECK(std::abs(mean) < 5 * 0.1 / std::sqrt(double(n)));
    CHECK(sample_variance(logs) == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("es mutation")
{
    Rng rng(4);
    SUBCASE("step size at the floor barely moves the constant")
    {
        auto [c, s] = es_mutate(3.0, 1e-16, rng, 0.1, 1e-16);
        CHECK(std::abs(c - 3.0) < 1e-14);
        CHECK(s >= 1e-16);
    }
    SUBCASE("step variance follows sigma")
    {
        std::vector<double> steps(100000);
        for (auto& d : steps) {
            d = es_mutate(1.0, 2.0, rng, 0.1, 1e-16).first - 1.0;
        }
        CHECK(sample_variance(steps) == doctest::Approx(4.0).epsilon(0.05));
    }
    SUBCASE("sigma never drops below epsilon")
    {
        double c = 0.0;
        double s = 1.0;
        double lowest = 1.0;
        for (int i = 0; i < 1000000; ++i) {
            std::tie(c, s) = es_mutate(c, s, rng, 1.0, 1e-6);
            lowest = std::min(lowest, s);
            if (!std::isfinite(c)) {
                c = 0.0;
            }
        }
        CHECK(lowest >= 1e-6);
    }
}

TEST_CASE("temperature mutation")
{
    Rng rng(6);
    for (int i = 0; i < 1000; ++i) {
        CHECK(temp_mutate(0.0, 0.5, rng) == 0.0);
    }
    std::vector<double> a(100000);
    std::vector<double> b(100000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = temp_mutate(10.0, 0.1, rng);
        b[i] = temp_mutate(-1.0, 0.5, rng);
    }
    // Var = (c tau)^2
    CHECK(sample_variance(a) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(sample_variance(b) == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("apply_coefficient_mutation")
{
    CoeffMutConfig config;
    config.type = MutationType::Temperature;
    auto temp = TemperatureState::from_config(config);
    Rng rng(9);

    SUBCASE("probability zero leaves the tree alone")
    {
        config.probability = 0.0;
        auto tree = mixed_tree();
        auto before = tree;
        CHECK(apply_coefficient_mutation(tree, config, temp, rng).empty());
        for (std::size_t i = 0; i < tree.size(); ++i) {
            CHECK(tree[i].value == before[i].value);
        }
    }
    SUBCASE("probability one touches every constant and nothing else")
    {
        config.probability = 1.0;
        auto tree = mixed_tree();
        auto before = tree;
        auto slots = apply_coefficient_mutation(tree, config, temp, rng);
        CHECK(slots == std::vector<std::size_t> { 3, 5, 6 });
        for (auto i : { 0, 1, 2, 4 }) {
            CHECK(tree[i].kind == before[i].kind);
            CHECK(tree[i].op == before[i].op);
            CHECK(tree[i].feature == before[i].feature);
            CHECK(tree[i].value == before[i].value);
        }
    }
    SUBCASE("introns are eligible")
    {
        // slot 6 is under a unary sin, hence inactive
        config.probability = 1.0;
        auto tree = mixed_tree();
        CHECK_FALSE(compute_active_mask(tree)[6]);
        auto slots = apply_coefficient_mutation(tree, config, temp, rng);
        CHECK(std::find(slots.begin(), slots.end(), 6) != slots.end());
    }
    SUBCASE("per-constant rate")
    {
        for (double p : { 0.5, 0.9 }) {
            config.probability = p;
            long hits = 0;
            long trials = 0;
            for (int rep = 0; rep < 10000; ++rep) {
                auto tree = mixed_tree();
                hits += static_cast<long>(apply_coefficient_mutation(tree, config, temp, rng).size());
                trials += 3;
            }
            double rate = double(hits) / double(trials);
            CHECK(rate > p - 0.02);
            CHECK(rate < p + 0.02);
        }
    }
    SUBCASE("restricted to a subset")
    {
        config.probability = 1.0;
        auto tree = mixed_tree();
        std::vector<std::size_t> subset { 0, 2, 5 };
        auto slots = apply_coefficient_mutation(tree, config, temp, rng, std::span<const std::size_t>(subset));
        CHECK(slots == std::vector<std::size_t> { 5 });
        CHECK(tree[3].value == 2.0);
        CHECK(tree[6].value == 4.0);
    }
    SUBCASE("es variant updates sigma")
    {
        config.probability = 1.0;
        config.type = MutationType::EsLike;
        auto tree = mixed_tree();
        (void)apply_coefficient_mutation(tree, config, temp, rng);
        CHECK(tree[3].sigma != 1.0);
        CHECK(tree[0].sigma == 1.0);
    }
}

TEST_CASE("temperature controller")
{
    CoeffMutConfig config;
    config.tau = 0.1;
    config.decay = 0.5;
    config.patience = 3;
    auto state = TemperatureState::from_config(config);

    SUBCASE("decays after patience stalls")
    {
        state = update_temperature(state, false, config);
        state = update_temperature(state, false, config);
        CHECK(state.tau_current == 0.1);
        CHECK(state.stall_counter == 2);
        state = update_temperature(state, false, config);
        CHECK(state.tau_current == doctest::Approx(0.05));
        CHECK(state.stall_counter == 0);
        CHECK(state.decays_applied == 1);
    }
    SUBCASE("improvement resets the counter")
    {
        state = update_temperature(state, false, config);
        state = update_temperature(state, false, config);
        state = update_temperature(state, true, config);
        CHECK(state.stall_counter == 0);
        state = update_temperature(state, false, config);
        state = update_temperature(state, false, config);
        CHECK(state.tau_current == 0.1);
    }
    SUBCASE("k times patience stalls gives tau times decay to the k")
    {
        for (int k = 1; k <= 6; ++k) {
            auto s = TemperatureState::from_config(config);
            for (int g = 0; g < k * 3; ++g) {
                s = update_temperature(s, false, config);
            }
            CHECK(s.tau_current == doctest::Approx(0.1 * std::pow(0.5, k)).epsilon(1e-12));
        }
    }
    SUBCASE("controller off without decay or patience")
    {
        CoeffMutConfig plain;
        auto s = TemperatureState::from_config(plain);
        for (int g = 0; g < 100; ++g) {
            s = update_temperature(s, false, plain);
        }
        CHECK(s.tau_current == plain.tau);
    }
}
