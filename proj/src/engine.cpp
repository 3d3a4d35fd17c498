#include "gpgomea/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <json.hpp>

namespace gpgomea {

namespace {

constexpr std::uint64_t init_stream = 1;
constexpr std::uint64_t batch_stream = 2;
constexpr std::uint64_t gom_stream = 3;

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next { 0 };
    std::vector<std::jthread> workers;
    auto count = std::min<std::size_t>(threads, n);
    workers.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        workers.emplace_back([&] {
            for (auto i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                fn(i);
            }
        });
    }
}

} // namespace

void RunConfig::validate() const
{
    if (population_size < 2) {
        throw ConfigError("--pop must be at least 2");
    }
    if (depth < 1) {
        throw ConfigError("--depth must be at least 1");
    }
    if (budget < 0) {
        throw ConfigError("--budget must be non-negative");
    }
    if (batch_size < 1) {
        throw ConfigError("--batch must be at least 1");
    }
    if (threads < 1) {
        throw ConfigError("--threads must be at least 1");
    }
    if (functions.empty()) {
        throw ConfigError("--functions must name at least one function");
    }
    (void)template_size(depth, std::max(1, max_arity(functions)));
    coeffmut.validate();
}

std::vector<SolutionTree> initialize_population(const RunConfig& config, const std::shared_ptr<const TemplateShape>& shape,
                                                const DataMatrix& data, Rng& rng)
{
    TreeInitConfig init;
    init.functions = config.functions;
    init.n_features = data.features();
    init.coeff_scale = coefficient_scale(data);
    init.gamma = config.coeffmut.gamma;
    init.epsilon = config.coeffmut.epsilon;
    const auto n_full = config.population_size / 2;
    std::vector<SolutionTree> population;
    population.reserve(config.population_size);
    for (std::size_t i = 0; i < config.population_size; ++i) {
        population.push_back(random_tree(i < n_full ? InitMode::Full : InitMode::Grow, shape, init, rng));
    }
    return population;
}

Engine::Engine(RunConfig config, const DataMatrix& train, const DataMatrix* test)
    : config_(std::move(config))
    , train_(train)
    , test_(test)
    , sampler_(config_.batch_size, derive_seed(config_.seed, batch_stream))
    , budget_(config_.budget)
    , temperature_(TemperatureState::from_config(config_.coeffmut))
{
    config_.validate();
    if (test_ && test_->features() != train_.features()) {
        throw ConfigError("train and test data have different feature counts");
    }
    shape_ = std::make_shared<const TemplateShape>(config_.depth, std::max(1, max_arity(config_.functions)));
    full_train_ = full_batch(train_, FitnessInfo::full_set);
    if (coefficient_scale(train_) == 0.0) {
        warnings_.emplace_back("all feature values are zero: every initial constant is 0");
    }
}

void Engine::initialize()
{
    if (initialized_) {
        return;
    }
    Rng rng(derive_seed(config_.seed, init_stream));
    population_ = initialize_population(config_, shape_, train_, rng);
    batch_ = make_batch(train_, sampler_.resample(train_.rows()), 0);
    restamp();
    update_elitist();
    initialized_ = true;
}

bool Engine::finished() const noexcept
{
    if (!initialized_) {
        return false;
    }
    return budget_.exhausted() || (config_.max_generations > 0 && generation_ >= config_.max_generations);
}

void Engine::restamp()
{
    parallel_for(population_.size(), config_.threads, [&](std::size_t i) {
        population_[i].fitness = evaluate_fitness(population_[i], batch_, budget_);
    });
}

bool Engine::update_elitist()
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < population_.size(); ++i) {
        if (population_[i].fitness.mse < population_[best].fitness.mse) {
            best = i;
        }
    }
    auto full = evaluate_fitness(population_[best], full_train_, budget_);
    if (elitist_.size() == 0 || full.mse < elitist_.fitness.mse) {
        bool improved = elitist_.size() != 0 || !full.is_worst();
        elitist_ = population_[best];
        elitist_.fitness = full;
        return improved;
    }
    return false;
}

void Engine::run_gom_all()
{
    parents_ = std::move(population_);
    population_.assign(parents_.size(), SolutionTree {});
    traces_.assign(parents_.size(), GomTrace {});
    const GomContext ctx { fos_, parents_, batch_, budget_, config_.coeffmut, temperature_ };
    const auto stream = derive_seed(config_.seed, gom_stream);
    parallel_for(parents_.size(), config_.threads, [&](std::size_t i) {
        Rng rng(derive_seed(stream, generation_, i));
        auto result = gom(parents_[i], ctx, rng);
        population_[i] = std::move(result.offspring);
        traces_[i] = std::move(result.trace);
    });
}

void Engine::step()
{
    if (!initialized_) {
        initialize();
    }
    if (finished()) {
        return;
    }
    if (generation_ > 0) {
        batch_ = make_batch(train_, sampler_.resample(train_.rows()), static_cast<std::int64_t>(generation_));
        restamp();
    }
    fos_ = build_linkage_tree(pairwise_nmi(symbolize_population(population_)));
    if (on_fos) {
        on_fos(generation_, fos_);
    }
    run_gom_all();
    bool improved = update_elitist();
    temperature_ = update_temperature(temperature_, improved, config_.coeffmut);

    GenerationStats gs;
    gs.generation = generation_;
    gs.fos_size = fos_.size();
    gs.best_mse = FitnessInfo::worst;
    double sum = 0.0;
    std::size_t finite = 0;
    for (std::size_t i = 0; i < population_.size(); ++i) {
        auto mse = population_[i].fitness.mse;
        gs.best_mse = std::min(gs.best_mse, mse);
        if (std::isfinite(mse)) {
            sum += mse;
            ++finite;
        }
        if (!is_better_or_equal(population_[i].fitness, parents_[i].fitness)) {
            ++gs.monotonicity_violations;
        }
        gs.max_mixing_evaluations = std::max(gs.max_mixing_evaluations, traces_[i].mixing_evaluations);
        gs.max_mutation_evaluations = std::max(gs.max_mutation_evaluations, traces_[i].mutation_evaluations);
    }
    gs.mean_mse = finite > 0 ? sum / static_cast<double>(finite) : FitnessInfo::worst;
    gs.tau_current = temperature_.tau_current;
    gs.evaluations = budget_.used();
    gs.elitist_mse = elitist_.fitness.mse;
    stats_.push_back(gs);
    ++generation_;
}

void Engine::run_to_completion()
{
    initialize();
    while (!finished()) {
        step();
    }
}

RunReport Engine::report() const
{
    RunReport r;
    r.best_expression = to_expression_string(elitist_, train_.feature_names());
    r.scale_a = elitist_.fitness.scale_a;
    r.scale_b = elitist_.fitness.scale_b;
    r.best_train_mse_fullset = elitist_.fitness.mse;
    r.best_active_nodes = active_node_count(elitist_);
    if (test_) {
        auto batch = full_batch(*test_);
        auto f = predict(elitist_, batch);
        for (auto& v : f) {
            v = r.scale_a + r.scale_b * v;
        }
        r.test_mse = scaled_mse(f, batch.y, { 0.0, 1.0 });
        r.test_r2 = r2_score(f, batch.y);
    }
    r.evaluations_used = budget_.used();
    r.generations = generation_;
    r.per_generation_stats = stats_;
    r.warnings = warnings_;
    return r;
}

RunReport run(const RunConfig& config, const DataMatrix& train, const DataMatrix* test)
{
    Engine engine(config, train, test);
    engine.run_to_completion();
    return engine.report();
}

namespace {

nlohmann::json number_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

} // namespace

std::string report_to_json(const RunReport& report, const RunConfig& config)
{
    using nlohmann::json;
    json functions = json::array();
    for (auto op : config.functions) {
        functions.push_back(std::string(function_spec(op).name));
    }
    const auto& cm = config.coeffmut;
    json cfg {
        { "population_size", config.population_size },
        { "depth", config.depth },
        { "budget", config.budget },
        { "batch_size", config.batch_size },
        { "seed", config.seed },
        { "threads", config.threads },
        { "max_generations", config.max_generations },
        { "functions", functions },
        { "strategy", std::string(to_string(cm.strategy)) },
        { "probability", cm.probability },
        { "mutation", std::string(to_string(cm.type)) },
        { "tau", cm.tau },
        { "gamma", cm.gamma },
        { "epsilon", cm.epsilon },
        { "decay", cm.decay ? json(*cm.decay) : json(nullptr) },
        { "patience", cm.patience ? json(*cm.patience) : json(nullptr) },
    };
    json gens = json::array();
    for (const auto& g : report.per_generation_stats) {
        gens.push_back(json {
            { "generation", g.generation },
            { "best_mse", number_or_null(g.best_mse) },
            { "mean_mse", number_or_null(g.mean_mse) },
            { "tau_current", g.tau_current },
            { "evaluations", g.evaluations },
            { "elitist_mse", number_or_null(g.elitist_mse) },
        });
    }
    json doc {
        { "best_expression", report.best_expression },
        { "scale_a", number_or_null(report.scale_a) },
        { "scale_b", number_or_null(report.scale_b) },
        { "best_train_mse_fullset", number_or_null(report.best_train_mse_fullset) },
        { "test_mse", report.test_mse ? number_or_null(*report.test_mse) : json(nullptr) },
        { "test_r2", report.test_r2 ? number_or_null(*report.test_r2) : json(nullptr) },
        { "evaluations_used", report.evaluations_used },
        { "generations", report.generations },
        { "best_active_nodes", report.best_active_nodes },
        { "warnings", report.warnings },
        { "config", cfg },
        { "per_generation_stats", gens },
    };
    if (report.ground_truth_match) {
        doc["ground_truth_match"] = *report.ground_truth_match;
    }
    return doc.dump(2) + "\n";
}

void write_stats_csv(std::ostream& out, const std::vector<GenerationStats>& stats)
{
    out << "generation,best_mse,mean_mse,tau_current,evaluations,elitist_mse,fos_size\n";
    for (const auto& g : stats) {
        out << g.generation << ',' << format_number(g.best_mse) << ',' << format_number(g.mean_mse) << ','
            << format_number(g.tau_current) << ',' << g.evaluations << ',' << format_number(g.elitist_mse) << ','
            << g.fos_size << '\n';
    }
}

} // namespace gpgomea
