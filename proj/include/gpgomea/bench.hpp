#ifndef GPGOMEA_BENCH_HPP
#define GPGOMEA_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpgomea/engine.hpp"
#include "gpgomea/expression.hpp"

namespace gpgomea {

class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Everything the command line can set.
struct CliOptions {
    RunConfig run {};
    std::string data;
    std::string test_data;
    std::string target { "y" };
    double split { 0.0 }; // > 0: seeded train fraction when no test file is given
    std::string sweep;
    std::string truth;
    std::string dump_fos;
    std::string report { "report.json" };
    std::string stats { "stats.csv" };
    std::string results { "results.csv" };
    std::size_t n_probe { 1000 };
    double match_r2 { 0.999 };
    double match_size_factor { 2.0 };
    bool help { false };
    std::string help_text;
};

// Parses and validates argv (argv[0] is the program name). Throws
// UsageError naming the flag on any problem; sets `help` for --help.
[[nodiscard]] CliOptions parse_config(const std::vector<std::string>& argv);

struct GroundTruthSpec {
    std::string expression;
    std::vector<std::pair<double, double>> sample_domain;
    std::size_t n_probe { 1000 };
    std::vector<std::string> feature_names;
};

struct MatchOptions {
    double r2_threshold { 0.999 };
    double size_factor { 2.0 };
};

// Affine-invariant numeric equivalence: R^2 of the linearly scaled candidate
// against the truth on random probes, plus a size guard.
[[nodiscard]] bool numeric_ground_truth_match(const std::string& candidate, const GroundTruthSpec& truth, Rng& rng,
                                              const MatchOptions& options = {});

// Per-feature [min, max] of the data.
[[nodiscard]] std::vector<std::pair<double, double>> feature_ranges(const DataMatrix& data);

struct SweepDataset {
    std::string train;
    std::string test;
    std::string truth;
};

// Text file of "key = v1, v2, ..." lines; '#' starts a comment.
// Grid keys: strategy, prob, mut, tau, decay, patience, depth.
// Other keys: seeds, datasets (entries "train.csv[|test.csv[|truth]]"),
// target, pop, budget, batch, generations, workers, n_probe.
struct SweepSpec {
    std::vector<std::pair<std::string, std::vector<std::string>>> grid;
    std::vector<std::uint64_t> seeds { 0 };
    std::vector<SweepDataset> datasets;
    std::string target { "y" };
    RunConfig base {};
    unsigned workers { 1 };
    std::size_t n_probe { 1000 };
    MatchOptions match {};

    [[nodiscard]] std::size_t grid_points() const;
};

[[nodiscard]] SweepSpec parse_sweep_spec(std::istream& in);
[[nodiscard]] SweepSpec load_sweep_spec(const std::filesystem::path& path);

// Applies one grid value to a run configuration; throws UsageError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

struct ResultRow {
    std::string run_key;
    std::string dataset;
    std::uint64_t seed { 0 };
    std::string config_key;
    std::string strategy;
    double probability { 0.0 };
    std::string mutation;
    double tau { 0.0 };
    std::string decay;
    std::string patience;
    int depth { 0 };
    double train_mse { 0.0 };
    double test_mse { 0.0 };
    double test_r2 { 0.0 };
    std::int64_t evaluations { 0 };
    std::size_t generations { 0 };
    std::string match;
    double wall_time_s { 0.0 };
    std::string expression;
    std::string error;
};

[[nodiscard]] std::string results_header();
[[nodiscard]] std::string format_result_row(const ResultRow& row);
[[nodiscard]] std::vector<ResultRow> read_results(const std::filesystem::path& path);

// Runs the cartesian product grid x seeds x datasets, appending one row per
// run to `results_path`. Rows whose run_key is already in the file are not
// run again. Returns every row present in the file afterwards.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& results_path, std::ostream* log = nullptr);

struct SummaryRow {
    std::string dataset;
    std::string config_key;
    std::size_t runs { 0 };
    double median_train_mse { 0.0 };
    double median_test_mse { 0.0 };
    double median_test_r2 { 0.0 };
    std::optional<double> solution_rate;
};

[[nodiscard]] double median(std::vector<double> values);
[[nodiscard]] std::vector<SummaryRow> aggregate_results(const std::vector<ResultRow>& rows);
void write_summary(std::ostream& out, const std::vector<SummaryRow>& summary);

} // namespace gpgomea

#endif
