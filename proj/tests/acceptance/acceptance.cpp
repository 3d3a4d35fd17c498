// Acceptance gate: one [PASS]/[FAIL] line per criterion, exit status 1 if
// any criterion fails. Experiments are scaled down to desk size.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "gpgomea/bench.hpp"
#include "gpgomea/engine.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gpgomea;
using gpgomea::testing::sample_variance;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

RunConfig winning_config(Strategy strategy, std::uint64_t seed)
{
    RunConfig c;
    c.population_size = 200;
    c.depth = 4;
    c.budget = 100'000;
    c.batch_size = 256;
    c.seed = seed;
    c.coeffmut.strategy = strategy;
    c.coeffmut.probability = 1.0;
    c.coeffmut.type = MutationType::Temperature;
    c.coeffmut.tau = 0.1;
    c.coeffmut.decay = 0.1;
    c.coeffmut.patience = 5;
    return c;
}

std::vector<SolutionTree> random_population(std::size_t n, int depth, std::size_t features, Rng& rng)
{
    auto shape = gpgomea::testing::shape(depth);
    TreeInitConfig config;
    config.n_features = features;
    config.coeff_scale = 3.0;
    std::vector<SolutionTree> pop;
    for (std::size_t i = 0; i < n; ++i) {
        pop.push_back(random_tree(i % 2 ? InitMode::Grow : InitMode::Full, shape, config, rng));
    }
    return pop;
}

// --- 1 -------------------------------------------------------------------

bool valid_linkage_tree(const FOS& fos, std::size_t ell)
{
    if (fos.size() != 2 * ell - 2) {
        return false;
    }
    const std::uint64_t full = (ell == 64) ? ~0ULL : ((1ULL << ell) - 1);
    std::vector<std::uint64_t> masks;
    for (const auto& s : fos.subsets) {
        std::uint64_t m = 0;
        for (auto i : s) {
            if (i >= ell || (m >> i) & 1ULL) {
                return false;
            }
            m |= 1ULL << i;
        }
        if (m == full || m == 0) {
            return false;
        }
        masks.push_back(m);
    }
    for (std::size_t i = 0; i < ell; ++i) {
        if (std::find(masks.begin(), masks.end(), 1ULL << i) == masks.end()) {
            return false;
        }
    }
    // every merged subset is the disjoint union of two earlier, unused roots
    std::vector<bool> consumed(masks.size(), false);
    for (std::size_t k = 0; k < masks.size(); ++k) {
        if (std::popcount(masks[k]) == 1) {
            continue;
        }
        bool found = false;
        for (std::size_t a = 0; a < k && !found; ++a) {
            for (std::size_t b = a + 1; b < k && !found; ++b) {
                if (!consumed[a] && !consumed[b] && (masks[a] & masks[b]) == 0 && (masks[a] | masks[b]) == masks[k]) {
                    consumed[a] = consumed[b] = true;
                    found = true;
                }
            }
        }
        if (!found) {
            return false;
        }
    }
    std::vector<std::uint64_t> roots;
    for (std::size_t k = 0; k < masks.size(); ++k) {
        if (!consumed[k]) {
            roots.push_back(masks[k]);
        }
    }
    return roots.size() == 2 && (roots[0] & roots[1]) == 0 && (roots[0] | roots[1]) == full;
}

Outcome criterion_1()
{
    auto t0 = Clock::now();
    Rng rng(101);
    int bad = 0;
    const int depths[] = { 2, 3, 4 };
    for (int p = 0; p < 200; ++p) {
        int depth = depths[p % 3];
        auto pop = random_population(20 + rng.index(180), depth, 1 + rng.index(4), rng);
        auto fos = build_linkage_tree(pairwise_nmi(symbolize_population(pop)));
        bad += valid_linkage_tree(fos, pop.front().size()) ? 0 : 1;
    }
    double secs = seconds_since(t0);
    return { bad == 0 && secs < 10.0, std::to_string(bad) + " invalid of 200 populations (l in {7,15,31}), " + fmt("%.2f s", secs) };
}

// --- 2 -------------------------------------------------------------------

Outcome criterion_2()
{
    auto t0 = Clock::now();
    auto data = gpgomea::testing::synthetic(200, 2, -3.0, 3.0, 202,
                                            [](const std::vector<double>& x) { return 1.7 * x[0] * x[0] + std::sin(2.0 * x[1]) - 0.4; });
    const Strategy strategies[] = { Strategy::Never, Strategy::AfterOnce, Strategy::AfterFosSize, Strategy::Between, Strategy::Within };
    long offspring_violations = 0;
    long elitist_violations = 0;
    long offspring = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto c = winning_config(strategies[seed % 5], seed);
        c.population_size = 40;
        c.batch_size = 64;
        c.budget = 1'000'000'000;
        c.max_generations = 20;
        Engine engine(c, data);
        engine.initialize();
        double elitist = engine.elitist().fitness.mse;
        while (!engine.finished()) {
            engine.step();
            for (std::size_t i = 0; i < engine.population().size(); ++i) {
                const auto& child = engine.population()[i].fitness;
                const auto& parent = engine.parents()[i].fitness;
                ++offspring;
                if (child.batch_id != parent.batch_id || !(child.mse <= parent.mse || parent.is_worst())) {
                    ++offspring_violations;
                }
            }
            if (engine.elitist().fitness.mse > elitist) {
                ++elitist_violations;
            }
            elitist = engine.elitist().fitness.mse;
        }
    }
    double secs = seconds_since(t0);
    return { offspring_violations == 0 && elitist_violations == 0 && secs < 120.0,
             std::to_string(offspring_violations) + " offspring and " + std::to_string(elitist_violations) + " elitist violations over "
                 + std::to_string(offspring) + " offspring, " + fmt("%.1f s", secs) };
}

// --- 3 -------------------------------------------------------------------

Outcome criterion_3()
{
    auto data = gpgomea::testing::synthetic(150, 2, -2.0, 2.0, 303, [](const std::vector<double>& x) { return x[0] * x[1] + 0.3 * x[0]; });
    long violations = 0;
    long overshoot_violations = 0;
    std::int64_t worst_overshoot = 0;
    std::array<std::size_t, 5> max_extra {};
    for (int s = 0; s < 5; ++s) {
        auto strategy = static_cast<Strategy>(s);
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            auto c = winning_config(strategy, seed);
            c.population_size = 30 + 17 * seed;
            c.batch_size = 64;
            c.budget = 15'000 + 3'331 * static_cast<std::int64_t>(seed);
            c.depth = seed % 2 ? 4 : 3;
            Engine engine(c, data);
            engine.initialize();
            const auto pop = static_cast<std::int64_t>(c.population_size);
            while (!engine.finished()) {
                auto before = engine.budget().used();
                bool restamped = engine.generation() > 0;
                engine.step();
                const auto fos = engine.last_fos().size();
                std::size_t bound = 0;
                switch (strategy) {
                case Strategy::Never:
                case Strategy::Within:
                    bound = 0;
                    break;
                case Strategy::AfterOnce:
                    bound = 1;
                    break;
                case Strategy::AfterFosSize:
                case Strategy::Between:
                    bound = fos;
                    break;
                }
                std::int64_t traced = 0;
                for (const auto& t : engine.last_traces()) {
                    max_extra[static_cast<std::size_t>(s)] = std::max(max_extra[static_cast<std::size_t>(s)], t.mutation_evaluations);
                    if (t.mutation_evaluations > bound || t.mixing_evaluations > fos) {
                        ++violations;
                    }
                    traced += static_cast<std::int64_t>(t.evaluations_spent);
                }
                // the shared counter must agree with the per-offspring tallies
                if (engine.budget().used() - before != (restamped ? pop : 0) + traced + 1) {
                    ++violations;
                }
            }
            auto over = engine.budget().used() - c.budget;
            worst_overshoot = std::max(worst_overshoot, over);
            if (over > pop + 1) {
                ++overshoot_violations;
            }
        }
    }
    std::string detail = std::to_string(violations) + " bound violations, " + std::to_string(overshoot_violations)
        + " overshoot violations (largest overshoot " + std::to_string(worst_overshoot) + "); max extra evals per offspring:";
    const char* names[] = { " never=", " after1=", " afterfos=", " between=", " within=" };
    for (int s = 0; s < 5; ++s) {
        detail += names[s] + std::to_string(max_extra[static_cast<std::size_t>(s)]);
    }
    return { violations == 0 && overshoot_violations == 0, detail };
}

// --- 4 -------------------------------------------------------------------

Outcome criterion_4()
{
    auto t0 = Clock::now();
    Rng rng(404);
    const int n = 100'000;
    auto temp_var = [&](double c, double tau) {
        std::vector<double> v(n);
        for (auto& x : v) {
            x = temp_mutate(c, tau, rng);
        }
        return sample_variance(v);
    };
    auto es_var = [&](double sigma) {
        std::vector<double> v(n);
        for (auto& x : v) {
            x = es_mutate(0.0, sigma, rng, 0.1, 1e-16).first;
        }
        return sample_variance(v);
    };
    double v10 = temp_var(10.0, 0.1);
    double v5 = temp_var(-5.0, 0.1);
    double es2 = es_var(2.0);
    double es05 = es_var(0.5);
    auto within = [](double got, double want) { return std::abs(got - want) <= 0.05 * want; };

    double lowest = 1.0;
    double sigma = 1.0;
    double c = 0.0;
    for (int i = 0; i < 1'000'000; ++i) {
        std::tie(c, sigma) = es_mutate(c, sigma, rng, 0.1, 1e-16);
        lowest = std::min(lowest, sigma);
    }
    // a chain started at the floor with a large learning rate keeps hitting the clamp
    sigma = 1e-16;
    for (int i = 0; i < 1'000'000; ++i) {
        std::tie(c, sigma) = es_mutate(c, sigma, rng, 2.0, 1e-16);
        lowest = std::min(lowest, sigma);
        if (!std::isfinite(sigma) || sigma > 1e100) {
            sigma = 1e-16;
        }
    }
    double secs = seconds_since(t0);
    bool pass = within(v10, 1.0) && within(v5, 0.25) && within(es2, 4.0) && within(es05, 0.25) && lowest >= 1e-16 && secs < 30.0;
    return { pass,
             "temp var(c=10)=" + fmt("%.4f", v10) + " var(c=-5)=" + fmt("%.4f", v5) + "; es var(sigma=2)=" + fmt("%.4f", es2)
                 + " var(sigma=0.5)=" + fmt("%.4f", es05) + "; min sigma " + fmt("%.3g", lowest) + ", " + fmt("%.1f s", secs) };
}

// --- 5 -------------------------------------------------------------------

Outcome criterion_5()
{
    Rng rng(505);
    long beaten = 0;
    long oracle_misses = 0;
    double worst_gap = 0.0;
    for (int inst = 0; inst < 1000; ++inst) {
        std::size_t n = 3 + rng.index(40);
        std::vector<double> f(n);
        std::vector<double> y(n);
        double slope = rng.normal(0.0, 2.0);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = rng.uniform(-2.0, 2.0);
            y[i] = slope * f[i] + rng.normal(0.0, 1.0);
        }
        auto s = linear_scale(f, y);
        auto best = scaled_mse(f, y, s);
        for (int k = 0; k < 100; ++k) {
            LinearScaling other { s.a + rng.normal(0.0, 1.0), s.b + rng.normal(0.0, 1.0) };
            if (scaled_mse(f, y, other) < best) {
                ++beaten;
            }
        }
        auto [ga, gb] = gpgomea::testing::grid_refine_linear_fit(f, y);
        double gap = gpgomea::testing::affine_mse(f, y, s.a, s.b) - gpgomea::testing::affine_mse(f, y, ga, gb);
        worst_gap = std::max(worst_gap, std::abs(gap));
        if (std::abs(gap) > 1e-10) {
            ++oracle_misses;
        }
    }
    return { beaten == 0 && oracle_misses == 0,
             std::to_string(beaten) + " of 100000 random alternatives better; " + std::to_string(oracle_misses)
                 + " instances off the grid oracle by > 1e-10 in mse (largest " + fmt("%.2e", worst_gap) + ")" };
}

// --- 6 -------------------------------------------------------------------

Outcome criterion_6()
{
    auto t0 = Clock::now();
    auto data = gpgomea::testing::synthetic(200, 1, -3.0, 3.0, 606, [](const std::vector<double>& x) { return 2.3 * x[0] + 1.1 * std::sin(x[0]); });
    int solved = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto report = run(winning_config(Strategy::Between, seed), data);
        solved += report.best_train_mse_fullset <= 1e-6 ? 1 : 0;
        worst = std::max(worst, report.best_train_mse_fullset);
    }
    double secs = seconds_since(t0);
    return { solved >= 8 && secs < 300.0,
             std::to_string(solved) + "/10 seeds reach mse <= 1e-6 (worst " + fmt("%.2e", worst) + "), " + fmt("%.1f s", secs) };
}

// --- 7 -------------------------------------------------------------------

Outcome criterion_7()
{
    auto t0 = Clock::now();
    struct Target {
        const char* name;
        std::size_t features;
        std::function<double(const std::vector<double>&)> fn;
    };
    const Target targets[] = {
        { "3.7*x1^2 - 2.1*x2 + 0.5*x1*x2", 2, [](const std::vector<double>& x) { return 3.7 * x[0] * x[0] - 2.1 * x[1] + 0.5 * x[0] * x[1]; } },
        { "0.3*x1^3 - 1.7*x1 + 4.2", 1, [](const std::vector<double>& x) { return 0.3 * x[0] * x[0] * x[0] - 1.7 * x[0] + 4.2; } },
    };
    const Strategy order[] = { Strategy::Never, Strategy::AfterOnce, Strategy::AfterFosSize, Strategy::Between };
    const double tie = 1e-8;
    auto le = [&](double a, double b) { return a <= b || (a <= tie && b <= tie); };
    auto lt = [&](double a, double b) { return a < b || (a <= tie && b <= tie); };
    bool pass = true;
    std::string detail;
    std::uint64_t data_seed = 7001;
    for (const auto& t : targets) {
        auto data = gpgomea::testing::synthetic(200, t.features, -3.0, 3.0, data_seed++, t.fn);
        std::array<double, 4> med {};
        for (std::size_t k = 0; k < 4; ++k) {
            std::vector<double> finals;
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                finals.push_back(run(winning_config(order[k], seed), data).best_train_mse_fullset);
            }
            med[k] = median(finals);
        }
        double never = med[0], after1 = med[1], afterfos = med[2], between = med[3];
        bool ok = le(between, afterfos) && le(afterfos, after1) && lt(between, never);
        pass = pass && ok;
        detail += std::string(detail.empty() ? "" : "; ") + t.name + ": never=" + fmt("%.3e", never) + " after1=" + fmt("%.3e", after1)
            + " afterfos=" + fmt("%.3e", afterfos) + " between=" + fmt("%.3e", between) + (ok ? "" : " (order violated)");
    }
    double secs = seconds_since(t0);
    return { pass && secs < 900.0, detail + ", " + fmt("%.1f s", secs) };
}

// --- 8 -------------------------------------------------------------------

Outcome criterion_8()
{
    auto t0 = Clock::now();
    const char* truths[] = {
        "x1 * x1 + 0.5 * x2",
        "sin(1.5 * x1) * x2",
        "x1 / (x2 + 2.0)",
        "0.3 * x1 * x1 * x1 - 1.7 * x1",
        "x1 * x2 + 0.8 * x1",
    };
    struct Rates {
        int with_mutation = 0;
        int without_mutation = 0;
    };
    Rates clean;
    Rates noisy;
    std::string table = "\n      truth                            noise  depth4+mut  depth4";
    std::uint64_t data_seed = 8001;
    for (const auto* truth : truths) {
        auto expr = Expression::parse(truth);
        auto f = [&](const std::vector<double>& x) { return expr.evaluate(x); };
        auto data = gpgomea::testing::synthetic(200, 2, -3.0, 3.0, data_seed, f);
        // signal-to-noise 10 in variance
        double noise_sd = std::sqrt(sample_variance(std::vector<double>(data.y().begin(), data.y().end())) / 10.0);
        auto noisy_data = gpgomea::testing::synthetic(200, 2, -3.0, 3.0, data_seed, f, noise_sd);
        ++data_seed;
        for (int with_noise = 0; with_noise < 2; ++with_noise) {
            const auto& d = with_noise ? noisy_data : data;
            GroundTruthSpec spec { truth, feature_ranges(d), 1000, {} };
            int hits[2] = { 0, 0 };
            for (int m = 0; m < 2; ++m) {
                for (std::uint64_t seed = 0; seed < 10; ++seed) {
                    auto report = run(winning_config(m == 0 ? Strategy::Between : Strategy::Never, seed), d);
                    Rng rng(derive_seed(seed, 0x8008));
                    hits[m] += numeric_ground_truth_match(report.best_expression, spec, rng) ? 1 : 0;
                }
            }
            auto& r = with_noise ? noisy : clean;
            r.with_mutation += hits[0];
            r.without_mutation += hits[1];
            char line[160];
            std::snprintf(line, sizeof line, "\n      %-32s %-6s %7d/10  %5d/10", truth, with_noise ? "snr10" : "none", hits[0], hits[1]);
            table += line;
        }
    }
    double secs = seconds_since(t0);
    char summary[200];
    std::snprintf(summary, sizeof summary, "noiseless rate %d/50 with mutation vs %d/50 without; snr10 %d/50 vs %d/50 (not asserted), %.1f s",
                  clean.with_mutation, clean.without_mutation, noisy.with_mutation, noisy.without_mutation, secs);
    return { clean.with_mutation >= clean.without_mutation && secs < 1800.0, summary + table };
}

// --- 9 -------------------------------------------------------------------

Outcome criterion_9()
{
    auto data = gpgomea::testing::synthetic(150, 2, -2.0, 2.0, 909, [](const std::vector<double>& x) { return x[0] * std::cos(x[1]) + 1.3; });
    auto test = gpgomea::testing::synthetic(60, 2, -2.0, 2.0, 910, [](const std::vector<double>& x) { return x[0] * std::cos(x[1]) + 1.3; });
    auto dir = std::filesystem::temp_directory_path() / ("gpgomea_acceptance_" + std::to_string(Clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(dir);
    int identical = 0;
    int configs = 0;
    for (auto strategy : { Strategy::Never, Strategy::Between, Strategy::Within }) {
        for (auto type : { MutationType::Temperature, MutationType::EsLike }) {
            auto c = winning_config(strategy, 99);
            c.coeffmut.type = type;
            c.population_size = 60;
            c.budget = 30'000;
            c.threads = 1;
            std::string bytes[2];
            for (int rep = 0; rep < 2; ++rep) {
                auto path = dir / ("report" + std::to_string(rep) + ".json");
                {
                    std::ofstream out(path, std::ios::binary);
                    out << report_to_json(run(c, data, &test), c);
                }
                std::ifstream in(path, std::ios::binary);
                bytes[rep].assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
            }
            ++configs;
            identical += (!bytes[0].empty() && bytes[0] == bytes[1]) ? 1 : 0;
        }
    }
    std::filesystem::remove_all(dir);
    return { identical == configs, std::to_string(identical) + "/" + std::to_string(configs) + " configurations byte-identical across two runs" };
}

// --- 10 ------------------------------------------------------------------

Node random_node(Rng& rng, std::size_t features)
{
    switch (rng.index(3)) {
    case 0:
        return Node::function(static_cast<Op>(rng.index(8)));
    case 1:
        return Node::variable(static_cast<std::uint32_t>(rng.index(features)));
    default:
        return Node::constant(rng.normal(0.0, 5.0), rng.uniform(0.1, 2.0));
    }
}

Outcome criterion_10()
{
    Rng rng(1010);
    auto data = gpgomea::testing::synthetic(64, 3, -2.0, 2.0, 1011, [](const std::vector<double>& x) { return x[0] - x[1] * x[2]; });
    auto batch = full_batch(data);
    TreeInitConfig config;
    config.n_features = 3;
    config.coeff_scale = 2.0;
    long cases = 0;
    long prediction_changes = 0;
    long ticks = 0;
    long not_skipped = 0;
    long same_symbol_cases = 0;
    while (cases < 10'000) {
        auto shape = gpgomea::testing::shape(2 + static_cast<int>(rng.index(3)));
        auto tree = random_tree(InitMode::Grow, shape, config, rng);
        auto mask = compute_active_mask(tree);
        std::vector<std::size_t> introns;
        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            (mask[i] ? active : introns).push_back(i);
        }
        auto edited = tree;
        std::vector<std::size_t> changed;
        if (!introns.empty() && rng.bernoulli(0.8)) {
            // rewrite a random set of intron slots
            for (auto slot : introns) {
                if (rng.bernoulli(0.5) || changed.empty()) {
                    edited[slot] = random_node(rng, 3);
                    changed.push_back(slot);
                }
            }
        } else {
            // active slots rewritten with the same symbol (sigma may differ)
            auto slot = active[rng.index(active.size())];
            edited[slot].sigma = rng.uniform(0.1, 5.0);
            changed.push_back(slot);
            ++same_symbol_cases;
        }
        ++cases;
        auto before = predict(tree, batch);
        auto after = predict(edited, batch);
        if (std::memcmp(before.data(), after.data(), before.size() * sizeof(double)) != 0) {
            ++prediction_changes;
        }
        tree.fitness = compute_fitness(tree, batch);
        EvalBudget budget(1'000'000);
        auto incumbent = tree;
        auto outcome = assess_changes_and_return_best(edited, incumbent, changed, batch, budget);
        ticks += budget.used();
        if (outcome != AssessOutcome::Unchanged) {
            ++not_skipped;
        }
    }
    return { prediction_changes == 0 && ticks == 0 && not_skipped == 0,
             std::to_string(cases) + " edits (" + std::to_string(same_symbol_cases) + " same-symbol): " + std::to_string(prediction_changes)
                 + " changed predictions, " + std::to_string(ticks) + " budget ticks, " + std::to_string(not_skipped) + " not skipped" };
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> fn;
    };
    const Criterion criteria[] = {
        { 1, "linkage tree structure", criterion_1 },
        { 2, "GOM monotonicity", criterion_2 },
        { 3, "evaluation accounting", criterion_3 },
        { 4, "mutation-law statistics", criterion_4 },
        { 5, "linear-scaling optimality", criterion_5 },
        { 6, "coefficient recovery", criterion_6 },
        { 7, "directional strategy effect", criterion_7 },
        { 8, "noiseless recovery proxy", criterion_8 },
        { 9, "determinism", criterion_9 },
        { 10, "intron invariance", criterion_10 },
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = { false, std::string("exception: ") + e.what() };
        }
        failed += o.pass ? 0 : 1;
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
