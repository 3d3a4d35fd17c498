#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gpgomea/bench.hpp"
#include "gpgomea/engine.hpp"

using namespace gpgomea;

namespace {

int run_single(const CliOptions& opts)
{
    if (opts.data.empty()) {
        throw UsageError("--data is required (or use --sweep)");
    }
    auto train = load_csv(opts.data, opts.target);
    std::optional<DataMatrix> test;
    if (!opts.test_data.empty()) {
        test = load_csv(opts.test_data, opts.target);
    } else if (opts.split > 0.0) {
        auto parts = split_train_test(train, opts.split, opts.run.seed);
        train = std::move(parts.train);
        test = std::move(parts.test);
    }

    Engine engine(opts.run, train, test ? &*test : nullptr);
    std::ofstream fos_out;
    if (!opts.dump_fos.empty()) {
        fos_out.open(opts.dump_fos);
        if (!fos_out) {
            throw UsageError("--dump-fos: cannot write '" + opts.dump_fos + "'");
        }
        engine.on_fos = [&](std::size_t generation, const FOS& fos) {
            fos_out << "generation " << generation << ": " << format_fos(fos) << '\n';
        };
    }
    engine.run_to_completion();
    auto report = engine.report();
    for (const auto& w : report.warnings) {
        std::cerr << "warning: " << w << '\n';
    }

    if (!opts.truth.empty()) {
        GroundTruthSpec truth { opts.truth, feature_ranges(train), opts.n_probe, train.feature_names() };
        Rng rng(derive_seed(opts.run.seed, 0x7275746fULL));
        report.ground_truth_match = numeric_ground_truth_match(report.best_expression, truth, rng, { opts.match_r2, opts.match_size_factor });
    }

    std::ofstream(opts.report) << report_to_json(report, opts.run);
    std::ofstream stats(opts.stats);
    write_stats_csv(stats, report.per_generation_stats);

    std::cout << "expression: " << format_number(report.scale_a) << " + " << format_number(report.scale_b) << " * ("
              << report.best_expression << ")\n"
              << "train mse:  " << format_number(report.best_train_mse_fullset) << '\n';
    if (report.test_mse) {
        std::cout << "test mse:   " << format_number(*report.test_mse) << "\ntest r2:    " << format_number(*report.test_r2) << '\n';
    }
    if (report.ground_truth_match) {
        std::cout << "truth match: " << (*report.ground_truth_match ? "yes" : "no") << '\n';
    }
    std::cout << "evaluations: " << report.evaluations_used << " in " << report.generations << " generations\n";
    return 0;
}

int run_sweep_command(const CliOptions& opts)
{
    auto spec = load_sweep_spec(opts.sweep);
    auto rows = run_sweep(spec, opts.results, &std::cerr);
    auto summary_path = opts.results + ".summary.csv";
    std::ofstream summary(summary_path);
    write_summary(summary, aggregate_results(rows));
    std::cout << rows.size() << " rows in " << opts.results << ", summary in " << summary_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        auto opts = parse_config(std::vector<std::string>(argv, argv + argc));
        if (opts.help) {
            std::cout << opts.help_text;
            return 0;
        }
        return opts.sweep.empty() ? run_single(opts) : run_sweep_command(opts);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\nrun with --help for the list of flags\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
