#include "gpgomea/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

namespace gpgomea {

namespace {

double parse_double(const std::string& text, const std::string& flag)
{
    double value = 0.0;
    auto first = text.data();
    auto last = text.data() + text.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc {} || ptr != last) {
        throw UsageError(flag + ": '" + text + "' is not a number");
    }
    return value;
}

long long parse_integer(const std::string& text, const std::string& flag)
{
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc {} || ptr != text.data() + text.size()) {
        throw UsageError(flag + ": '" + text + "' is not an integer");
    }
    return value;
}

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

bool is_none(const std::string& v)
{
    return v == "none" || v == "None" || v == "inf" || v == "infinite" || v.empty();
}

} // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value)
{
    auto& cm = config.coeffmut;
    if (key == "strategy") {
        auto s = strategy_from_string(value);
        if (!s) {
            throw UsageError("--strategy: '" + value + "' is not one of never, after1, afterfos, between, within");
        }
        cm.strategy = *s;
    } else if (key == "prob") {
        cm.probability = parse_double(value, "--prob");
        if (!(cm.probability >= 0.0 && cm.probability <= 1.0)) {
            throw UsageError("--prob must lie in [0, 1]");
        }
    } else if (key == "mut") {
        auto t = mutation_type_from_string(value);
        if (!t) {
            throw UsageError("--mut: '" + value + "' is not one of es, temp");
        }
        cm.type = *t;
    } else if (key == "tau") {
        cm.tau = parse_double(value, "--tau");
        if (!(cm.tau > 0.0)) {
            throw UsageError("--tau must be positive");
        }
    } else if (key == "gamma") {
        cm.gamma = parse_double(value, "--gamma");
        if (!(cm.gamma > 0.0)) {
            throw UsageError("--gamma must be positive");
        }
    } else if (key == "epsilon") {
        cm.epsilon = parse_double(value, "--epsilon");
        if (!(cm.epsilon > 0.0)) {
            throw UsageError("--epsilon must be positive");
        }
    } else if (key == "decay") {
        if (is_none(value)) {
            cm.decay.reset();
        } else {
            cm.decay = parse_double(value, "--decay");
            if (!(*cm.decay > 0.0 && *cm.decay < 1.0)) {
                throw UsageError("--decay must lie in (0, 1)");
            }
        }
    } else if (key == "patience") {
        if (is_none(value)) {
            cm.patience.reset();
        } else {
            auto p = parse_integer(value, "--patience");
            if (p < 1) {
                throw UsageError("--patience must be at least 1");
            }
            cm.patience = static_cast<int>(p);
        }
    } else if (key == "depth") {
        auto d = parse_integer(value, "--depth");
        if (d != 4 && d != 6) {
            throw UsageError("--depth must be 4 or 6");
        }
        config.depth = static_cast<int>(d);
    } else if (key == "pop") {
        auto p = parse_integer(value, "--pop");
        if (p < 2) {
            throw UsageError("--pop must be at least 2");
        }
        config.population_size = static_cast<std::size_t>(p);
    } else if (key == "budget") {
        auto b = parse_integer(value, "--budget");
        if (b < 0) {
            throw UsageError("--budget must be non-negative");
        }
        config.budget = b;
    } else if (key == "batch") {
        auto b = parse_integer(value, "--batch");
        if (b < 1) {
            throw UsageError("--batch must be at least 1");
        }
        config.batch_size = static_cast<std::size_t>(b);
    } else if (key == "generations") {
        auto g = parse_integer(value, "--generations");
        if (g < 0) {
            throw UsageError("--generations must be non-negative");
        }
        config.max_generations = static_cast<std::size_t>(g);
    } else if (key == "functions") {
        try {
            config.functions = parse_function_set(value);
        } catch (const ConfigError& e) {
            throw UsageError(std::string("--functions: ") + e.what());
        }
    } else {
        throw UsageError("unknown setting '" + key + "'");
    }
}

CliOptions parse_config(const std::vector<std::string>& argv)
{
    CliOptions opts;
    CLI::App app { "GP-GOMEA symbolic regression with coefficient mutation", argv.empty() ? "gpgomea" : argv.front() };
    app.set_help_flag();
    bool help = false;
    app.add_flag("-h,--help", help, "Print this help");

    app.add_option("--data", opts.data, "Training CSV with a header row");
    app.add_option("--test-data", opts.test_data, "Test CSV with the same columns");
    app.add_option("--target", opts.target, "Name of the target column")->capture_default_str();
    app.add_option("--split", opts.split, "Train fraction for a seeded split when no test file is given");

    std::string depth = "4", pop = "1000", budget = "1000000", batch = "256", strategy = "never", prob = "0.5", mut = "temp",
                tau = "0.1", gamma = "0.1", epsilon = "1e-16", decay = "none", patience = "none", functions = "add,sub,mul,div,log,sqrt,sin,cos",
                generations = "0";
    app.add_option("--depth", depth, "Template depth {4,6}")->capture_default_str();
    app.add_option("--pop", pop, "Population size")->capture_default_str();
    app.add_option("--budget", budget, "Fitness evaluation budget")->capture_default_str();
    app.add_option("--batch", batch, "Mini-batch size")->capture_default_str();
    app.add_option("--generations", generations, "Generation cap (0 = budget only)")->capture_default_str();
    app.add_option("--seed", opts.run.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", opts.run.threads, "Worker threads for mixing")->capture_default_str();
    app.add_option("--functions", functions, "Comma-separated atomic functions")->capture_default_str();
    app.add_option("--strategy", strategy, "Coefficient mutation strategy {never,after1,afterfos,between,within}")->capture_default_str();
    app.add_option("--prob", prob, "Per-coefficient mutation probability")->capture_default_str();
    app.add_option("--mut", mut, "Mutation type {es,temp}")->capture_default_str();
    app.add_option("--tau", tau, "Initial temperature")->capture_default_str();
    app.add_option("--gamma", gamma, "Step-size learning rate of ES-like mutation")->capture_default_str();
    app.add_option("--epsilon", epsilon, "Step-size floor of ES-like mutation")->capture_default_str();
    app.add_option("--decay", decay, "Temperature decay factor in (0,1), or none")->capture_default_str();
    app.add_option("--patience", patience, "Stalled generations before decaying, or none")->capture_default_str();

    app.add_option("--sweep", opts.sweep, "Sweep specification file");
    app.add_option("--truth", opts.truth, "Ground-truth expression for the recovery check");
    app.add_option("--n-probe", opts.n_probe, "Probe points for the recovery check")->capture_default_str();
    app.add_option("--match-r2", opts.match_r2, "R^2 threshold for the recovery check")->capture_default_str();
    app.add_option("--match-size-factor", opts.match_size_factor, "Size factor for the recovery check")->capture_default_str();
    app.add_option("--dump-fos", opts.dump_fos, "Write every linkage tree to this file");
    app.add_option("--report", opts.report, "Run report (JSON)")->capture_default_str();
    app.add_option("--stats", opts.stats, "Per-generation statistics (CSV)")->capture_default_str();
    app.add_option("--results", opts.results, "Sweep results (CSV)")->capture_default_str();

    std::vector<const char*> args;
    args.reserve(argv.size() + 1);
    if (argv.empty()) {
        args.push_back("gpgomea");
    }
    for (const auto& a : argv) {
        args.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(args.size()), args.data());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    if (help) {
        opts.help = true;
        opts.help_text = app.help();
        return opts;
    }

    apply_setting(opts.run, "depth", depth);
    apply_setting(opts.run, "pop", pop);
    apply_setting(opts.run, "budget", budget);
    apply_setting(opts.run, "batch", batch);
    apply_setting(opts.run, "generations", generations);
    apply_setting(opts.run, "functions", functions);
    apply_setting(opts.run, "strategy", strategy);
    apply_setting(opts.run, "prob", prob);
    apply_setting(opts.run, "mut", mut);
    apply_setting(opts.run, "tau", tau);
    apply_setting(opts.run, "gamma", gamma);
    apply_setting(opts.run, "epsilon", epsilon);
    apply_setting(opts.run, "decay", decay);
    apply_setting(opts.run, "patience", patience);
    if (opts.run.threads < 1) {
        throw UsageError("--threads must be at least 1");
    }
    if (!(opts.split >= 0.0 && opts.split < 1.0)) {
        throw UsageError("--split must lie in (0, 1)");
    }
    if (opts.n_probe < 10) {
        throw UsageError("--n-probe must be at least 10");
    }
    if (!(opts.match_r2 > 0.0 && opts.match_r2 <= 1.0)) {
        throw UsageError("--match-r2 must lie in (0, 1]");
    }
    if (!(opts.match_size_factor > 0.0)) {
        throw UsageError("--match-size-factor must be positive");
    }
    try {
        opts.run.validate();
    } catch (const UsageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return opts;
}

std::vector<std::pair<double, double>> feature_ranges(const DataMatrix& data)
{
    std::vector<std::pair<double, double>> ranges;
    for (std::size_t j = 0; j < data.features(); ++j) {
        auto col = data.column(j);
        auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        ranges.emplace_back(*lo, *hi);
    }
    return ranges;
}

bool numeric_ground_truth_match(const std::string& candidate, const GroundTruthSpec& truth, Rng& rng, const MatchOptions& options)
{
    auto truth_expr = Expression::parse(truth.expression, truth.feature_names);
    auto cand_expr = Expression::parse(candidate, truth.feature_names);
    const auto d = truth.sample_domain.size();
    if (truth_expr.features_used() > d || cand_expr.features_used() > d) {
        throw ParseError("expression uses more features than the probe domain provides");
    }
    if (static_cast<double>(cand_expr.node_count()) > options.size_factor * static_cast<double>(truth_expr.node_count())) {
        return false;
    }
    std::vector<double> row(d);
    std::vector<double> f;
    std::vector<double> t;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < truth.n_probe; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const auto [lo, hi] = truth.sample_domain[j];
            row[j] = lo < hi ? rng.uniform(lo, hi) : lo;
        }
        auto tv = truth_expr.evaluate(row);
        if (!std::isfinite(tv)) {
            continue;
        }
        auto cv = cand_expr.evaluate(row);
        if (!std::isfinite(cv)) {
            ++bad;
            continue;
        }
        f.push_back(cv);
        t.push_back(tv);
    }
    if (f.empty() || static_cast<double>(bad) > 0.01 * static_cast<double>(truth.n_probe)) {
        return false;
    }
    auto scaling = linear_scale(f, t);
    for (auto& v : f) {
        v = scaling.a + scaling.b * v;
    }
    return r2_score(f, t) >= options.r2_threshold;
}

std::size_t SweepSpec::grid_points() const
{
    std::size_t n = 1;
    for (const auto& [key, values] : grid) {
        n *= values.size();
    }
    return n;
}

SweepSpec parse_sweep_spec(std::istream& in)
{
    static const std::set<std::string> grid_keys { "strategy", "prob", "mut", "tau", "decay", "patience", "depth" };
    SweepSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("sweep spec line " + std::to_string(line_no) + ": expected 'key = values'");
        }
        auto key = trim(std::string_view(line).substr(0, eq));
        auto values = split(std::string_view(line).substr(eq + 1), ',');
        if (values.empty() || (values.size() == 1 && values.front().empty())) {
            throw UsageError("sweep spec line " + std::to_string(line_no) + ": no values for '" + key + "'");
        }
        if (grid_keys.contains(key)) {
            RunConfig probe;
            for (const auto& v : values) {
                apply_setting(probe, key, v);
            }
            spec.grid.emplace_back(key, values);
        } else if (key == "seeds") {
            spec.seeds.clear();
            for (const auto& v : values) {
                auto s = parse_integer(v, "seeds");
                if (s < 0) {
                    throw UsageError("seeds must be non-negative");
                }
                spec.seeds.push_back(static_cast<std::uint64_t>(s));
            }
        } else if (key == "datasets") {
            for (const auto& v : values) {
                auto parts = split(v, '|');
                SweepDataset ds;
                ds.train = parts[0];
                if (parts.size() > 1) {
                    ds.test = parts[1];
                }
                if (parts.size() > 2) {
                    ds.truth = parts[2];
                }
                spec.datasets.push_back(ds);
            }
        } else if (key == "target") {
            spec.target = values.front();
        } else if (key == "workers") {
            auto w = parse_integer(values.front(), "workers");
            if (w < 1) {
                throw UsageError("workers must be at least 1");
            }
            spec.workers = static_cast<unsigned>(w);
        } else if (key == "n_probe") {
            spec.n_probe = static_cast<std::size_t>(std::max<long long>(10, parse_integer(values.front(), "n_probe")));
        } else {
            apply_setting(spec.base, key, values.front());
        }
    }
    if (spec.datasets.empty()) {
        throw UsageError("sweep spec lists no datasets");
    }
    return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw UsageError("--sweep: cannot open '" + path.string() + "'");
    }
    return parse_sweep_spec(in);
}

namespace {

constexpr std::string_view header_fields[] = {
    "run_key", "dataset", "seed", "config_key", "strategy", "prob", "mut", "tau", "decay", "patience", "depth",
    "train_mse", "test_mse", "test_r2", "evaluations", "generations", "match", "wall_time_s", "expression", "error",
};

std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string optional_text(const std::optional<double>& v)
{
    return v ? format_number(*v) : "none";
}

double read_number(const std::string& s)
{
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    if (s == "nan" || s == "-nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return parse_double(s, "results");
}

} // namespace

std::string results_header()
{
    std::string out;
    for (auto f : header_fields) {
        if (!out.empty()) {
            out += ',';
        }
        out += f;
    }
    return out;
}

std::string format_result_row(const ResultRow& r)
{
    std::ostringstream out;
    out << csv_quote(r.run_key) << ',' << csv_quote(r.dataset) << ',' << r.seed << ',' << csv_quote(r.config_key) << ','
        << r.strategy << ',' << format_number(r.probability) << ',' << r.mutation << ',' << format_number(r.tau) << ','
        << r.decay << ',' << r.patience << ',' << r.depth << ',' << format_number(r.train_mse) << ','
        << format_number(r.test_mse) << ',' << format_number(r.test_r2) << ',' << r.evaluations << ',' << r.generations << ','
        << r.match << ',' << format_number(r.wall_time_s) << ',' << csv_quote(r.expression) << ',' << csv_quote(r.error);
    return out.str();
}

std::vector<ResultRow> read_results(const std::filesystem::path& path)
{
    std::vector<ResultRow> rows;
    std::ifstream in(path);
    if (!in) {
        return rows;
    }
    std::string line;
    if (!std::getline(in, line)) {
        return rows;
    }
    constexpr auto n_fields = std::size(header_fields);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto f = csv_fields(line);
        if (f.size() != n_fields) {
            // a row cut short by an interrupted write is dropped and rerun
            continue;
        }
        ResultRow r;
        r.run_key = f[0];
        r.dataset = f[1];
        r.seed = static_cast<std::uint64_t>(parse_integer(f[2], "seed"));
        r.config_key = f[3];
        r.strategy = f[4];
        r.probability = read_number(f[5]);
        r.mutation = f[6];
        r.tau = read_number(f[7]);
        r.decay = f[8];
        r.patience = f[9];
        r.depth = static_cast<int>(parse_integer(f[10], "depth"));
        r.train_mse = read_number(f[11]);
        r.test_mse = read_number(f[12]);
        r.test_r2 = read_number(f[13]);
        r.evaluations = parse_integer(f[14], "evaluations");
        r.generations = static_cast<std::size_t>(parse_integer(f[15], "generations"));
        r.match = f[16];
        r.wall_time_s = read_number(f[17]);
        r.expression = f[18];
        r.error = f[19];
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

struct PlannedRun {
    RunConfig config;
    std::string config_key;
    const SweepDataset* dataset;
    std::string run_key;
};

ResultRow execute(const PlannedRun& plan, const SweepSpec& spec)
{
    ResultRow row;
    const auto& cm = plan.config.coeffmut;
    row.run_key = plan.run_key;
    row.dataset = plan.dataset->train;
    row.seed = plan.config.seed;
    row.config_key = plan.config_key;
    row.strategy = std::string(to_string(cm.strategy));
    row.probability = cm.probability;
    row.mutation = std::string(to_string(cm.type));
    row.tau = cm.tau;
    row.decay = optional_text(cm.decay);
    row.patience = cm.patience ? std::to_string(*cm.patience) : "none";
    row.depth = plan.config.depth;
    row.train_mse = row.test_mse = std::numeric_limits<double>::quiet_NaN();
    row.test_r2 = std::numeric_limits<double>::quiet_NaN();
    row.match = "na";
    auto start = std::chrono::steady_clock::now();
    try {
        auto train = load_csv(plan.dataset->train, spec.target);
        std::optional<DataMatrix> test;
        if (!plan.dataset->test.empty()) {
            test = load_csv(plan.dataset->test, spec.target);
        }
        auto report = run(plan.config, train, test ? &*test : nullptr);
        row.train_mse = report.best_train_mse_fullset;
        row.test_mse = report.test_mse.value_or(std::numeric_limits<double>::quiet_NaN());
        row.test_r2 = report.test_r2.value_or(std::numeric_limits<double>::quiet_NaN());
        row.evaluations = report.evaluations_used;
        row.generations = report.generations;
        row.expression = report.best_expression;
        if (!plan.dataset->truth.empty()) {
            GroundTruthSpec truth { plan.dataset->truth, feature_ranges(train), spec.n_probe, train.feature_names() };
            Rng rng(derive_seed(plan.config.seed, 0x7275746fULL));
            row.match = numeric_ground_truth_match(report.best_expression, truth, rng, spec.match) ? "1" : "0";
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

} // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& results_path, std::ostream* log)
{
    std::vector<PlannedRun> plan;
    // grid points in odometer order over the keys as listed
    const auto points = spec.grid_points();
    for (const auto& ds : spec.datasets) {
        for (std::size_t p = 0; p < points; ++p) {
            RunConfig config = spec.base;
            std::string key;
            auto rest = p;
            std::vector<std::size_t> digits(spec.grid.size());
            for (std::size_t k = spec.grid.size(); k-- > 0;) {
                digits[k] = rest % spec.grid[k].second.size();
                rest /= spec.grid[k].second.size();
            }
            for (std::size_t k = 0; k < spec.grid.size(); ++k) {
                const auto& [name, values] = spec.grid[k];
                apply_setting(config, name, values[digits[k]]);
                if (!key.empty()) {
                    key += ';';
                }
                key += name + '=' + values[digits[k]];
            }
            for (auto seed : spec.seeds) {
                config.seed = seed;
                config.threads = 1;
                plan.push_back({ config, key, &ds, ds.train + '#' + key + "#seed=" + std::to_string(seed) });
            }
        }
    }

    auto existing = read_results(results_path);
    std::set<std::string> done;
    for (const auto& r : existing) {
        done.insert(r.run_key);
    }
    std::vector<const PlannedRun*> todo;
    for (const auto& p : plan) {
        if (!done.contains(p.run_key)) {
            todo.push_back(&p);
        }
    }

    bool write_header = !std::filesystem::exists(results_path) || std::filesystem::file_size(results_path) == 0;
    bool needs_newline = false;
    if (!write_header) {
        std::ifstream tail(results_path, std::ios::binary);
        tail.seekg(-1, std::ios::end);
        needs_newline = tail.get() != '\n';
    }
    std::ofstream out(results_path, std::ios::app);
    if (!out) {
        throw UsageError("--results: cannot write '" + results_path.string() + "'");
    }
    if (needs_newline) {
        out << '\n';
    }
    if (write_header) {
        out << results_header() << '\n' << std::flush;
    }

    std::mutex mutex;
    std::atomic<std::size_t> next { 0 };
    std::vector<ResultRow> fresh;
    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < todo.size(); i = next.fetch_add(1)) {
            auto row = execute(*todo[i], spec);
            std::lock_guard lock(mutex);
            out << format_result_row(row) << '\n' << std::flush;
            if (log) {
                *log << "[" << (i + 1) << "/" << todo.size() << "] " << row.run_key << " train_mse=" << format_number(row.train_mse)
                     << (row.error.empty() ? "" : " error=" + row.error) << '\n';
            }
            fresh.push_back(std::move(row));
        }
    };
    {
        std::vector<std::jthread> pool;
        auto n = std::max(1U, std::min<unsigned>(spec.workers, static_cast<unsigned>(std::max<std::size_t>(1, todo.size()))));
        for (unsigned t = 1; t < n; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }
    out.close();
    return read_results(results_path);
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(values.begin(), values.end());
    auto n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SummaryRow> aggregate_results(const std::vector<ResultRow>& rows)
{
    std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>> groups;
    for (const auto& r : rows) {
        if (r.error.empty()) {
            groups[{ r.dataset, r.config_key }].push_back(&r);
        }
    }
    std::vector<SummaryRow> summary;
    for (const auto& [key, members] : groups) {
        SummaryRow s;
        s.dataset = key.first;
        s.config_key = key.second;
        s.runs = members.size();
        std::vector<double> train, test, r2;
        std::size_t matched = 0;
        std::size_t judged = 0;
        for (const auto* r : members) {
            train.push_back(r->train_mse);
            test.push_back(r->test_mse);
            r2.push_back(r->test_r2);
            if (r->match == "0" || r->match == "1") {
                ++judged;
                matched += r->match == "1" ? 1 : 0;
            }
        }
        s.median_train_mse = median(train);
        s.median_test_mse = median(test);
        s.median_test_r2 = median(r2);
        if (judged > 0) {
            s.solution_rate = static_cast<double>(matched) / static_cast<double>(judged);
        }
        summary.push_back(std::move(s));
    }
    return summary;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& summary)
{
    out << "dataset,config_key,runs,median_train_mse,median_test_mse,median_test_r2,solution_rate\n";
    for (const auto& s : summary) {
        out << csv_quote(s.dataset) << ',' << csv_quote(s.config_key) << ',' << s.runs << ',' << format_number(s.median_train_mse) << ','
            << format_number(s.median_test_mse) << ',' << format_number(s.median_test_r2) << ','
            << (s.solution_rate ? format_number(*s.solution_rate) : "na") << '\n';
    }
}

} // namespace gpgomea
