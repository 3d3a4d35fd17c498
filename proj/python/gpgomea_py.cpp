#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "gpgomea/bench.hpp"
#include "gpgomea/coeffmut.hpp"
#include "gpgomea/engine.hpp"
#include "gpgomea/expression.hpp"
#include "gpgomea/linkage.hpp"

namespace py = pybind11;
using namespace gpgomea;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Vector = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Vector& v)
{
    if (v.ndim() != 1) {
        throw py::value_error("expected a 1-d array");
    }
    return { v.data(), v.data() + v.shape(0) };
}

DataMatrix to_data(const Matrix& x, const Vector& y)
{
    if (x.ndim() != 2) {
        throw py::value_error("X must be 2-d (rows x features)");
    }
    auto rows = static_cast<std::size_t>(x.shape(0));
    auto cols = static_cast<std::size_t>(x.shape(1));
    auto target = to_vector(y);
    if (target.size() != rows) {
        throw py::value_error("X and y have different row counts");
    }
    std::vector<std::vector<double>> columns(cols, std::vector<double>(rows));
    auto view = x.unchecked<2>();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            columns[j][i] = view(i, j);
        }
    }
    return DataMatrix(std::move(columns), std::move(target));
}

std::string setting_text(const py::handle& value)
{
    if (value.is_none()) {
        return "none";
    }
    if (py::isinstance<py::bool_>(value)) {
        throw py::type_error("boolean settings are not supported");
    }
    return py::str(value);
}

py::dict run_py(const Matrix& x, const Vector& y, std::optional<Matrix> x_test, std::optional<Vector> y_test, std::uint64_t seed,
                unsigned threads, const py::kwargs& settings)
{
    RunConfig config;
    config.seed = seed;
    config.threads = threads;
    for (auto item : settings) {
        apply_setting(config, py::str(item.first), setting_text(item.second));
    }
    auto train = to_data(x, y);
    std::optional<DataMatrix> test;
    if (x_test.has_value() != y_test.has_value()) {
        throw py::value_error("X_test and y_test must be given together");
    }
    if (x_test) {
        test = to_data(*x_test, *y_test);
    }
    RunReport report;
    {
        py::gil_scoped_release release;
        report = run(config, train, test ? &*test : nullptr);
    }
    py::list gens;
    for (const auto& g : report.per_generation_stats) {
        py::dict d;
        d["generation"] = g.generation;
        d["best_mse"] = g.best_mse;
        d["mean_mse"] = g.mean_mse;
        d["elitist_mse"] = g.elitist_mse;
        d["tau_current"] = g.tau_current;
        d["evaluations"] = g.evaluations;
        gens.append(d);
    }
    py::dict out;
    out["best_expression"] = report.best_expression;
    out["scale_a"] = report.scale_a;
    out["scale_b"] = report.scale_b;
    out["train_mse"] = report.best_train_mse_fullset;
    out["test_mse"] = report.test_mse ? py::cast(*report.test_mse) : py::none();
    out["test_r2"] = report.test_r2 ? py::cast(*report.test_r2) : py::none();
    out["evaluations"] = report.evaluations_used;
    out["generations"] = report.generations;
    out["active_nodes"] = report.best_active_nodes;
    out["warnings"] = report.warnings;
    out["per_generation"] = gens;
    out["report_json"] = report_to_json(report, config);
    return out;
}

} // namespace

PYBIND11_MODULE(_gpgomea, m)
{
    m.doc() = "GP-GOMEA symbolic regression with coefficient mutation";

    m.def("template_size", &template_size, py::arg("depth"), py::arg("max_arity") = 2,
          "Number of slots in a full template tree.");

    m.def(
        "linear_scale",
        [](const Vector& f, const Vector& y) {
            auto s = linear_scale(to_vector(f), to_vector(y));
            return py::make_tuple(s.a, s.b);
        },
        py::arg("f"), py::arg("y"), "Least-squares (a, b) such that a + b*f fits y.");

    m.def(
        "temp_mutate",
        [](double c, double tau, std::size_t n, std::uint64_t seed) {
            Rng rng(seed);
            py::array_t<double> out(static_cast<py::ssize_t>(n));
            auto v = out.mutable_unchecked<1>();
            for (std::size_t i = 0; i < n; ++i) {
                v(static_cast<py::ssize_t>(i)) = temp_mutate(c, tau, rng);
            }
            return out;
        },
        py::arg("c"), py::arg("tau"), py::arg("n") = 1, py::arg("seed") = 0, "n independent temperature mutations of c.");

    m.def(
        "es_mutate",
        [](double c, double sigma, std::size_t n, double gamma, double epsilon, std::uint64_t seed) {
            Rng rng(seed);
            py::array_t<double> cs(static_cast<py::ssize_t>(n));
            py::array_t<double> sigmas(static_cast<py::ssize_t>(n));
            auto cv = cs.mutable_unchecked<1>();
            auto sv = sigmas.mutable_unchecked<1>();
            for (std::size_t i = 0; i < n; ++i) {
                auto [c_new, s_new] = es_mutate(c, sigma, rng, gamma, epsilon);
                cv(static_cast<py::ssize_t>(i)) = c_new;
                sv(static_cast<py::ssize_t>(i)) = s_new;
            }
            return py::make_tuple(cs, sigmas);
        },
        py::arg("c"), py::arg("sigma"), py::arg("n") = 1, py::arg("gamma") = 0.1, py::arg("epsilon") = 1e-16, py::arg("seed") = 0,
        "n independent self-adaptive mutations of (c, sigma).");

    m.def(
        "nmi_matrix",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& tokens) {
            if (tokens.ndim() != 2) {
                throw py::value_error("tokens must be 2-d (population x slots)");
            }
            auto rows = static_cast<std::size_t>(tokens.shape(0));
            auto cols = static_cast<std::size_t>(tokens.shape(1));
            SymbolMatrix sm(rows, cols);
            auto v = tokens.unchecked<2>();
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t c = 0; c < cols; ++c) {
                    sm(r, c) = v(r, c);
                }
            }
            auto s = pairwise_nmi(sm);
            py::array_t<double> out({ s.n, s.n });
            std::copy(s.values.begin(), s.values.end(), out.mutable_data());
            return out;
        },
        py::arg("tokens"), "Pairwise normalized mutual information between columns.");

    m.def(
        "linkage_tree",
        [](const Matrix& similarity) {
            if (similarity.ndim() != 2 || similarity.shape(0) != similarity.shape(1)) {
                throw py::value_error("similarity must be square");
            }
            SimilarityMatrix s;
            s.n = static_cast<std::size_t>(similarity.shape(0));
            s.values.assign(similarity.data(), similarity.data() + s.n * s.n);
            return build_linkage_tree(s).subsets;
        },
        py::arg("similarity"), "Linkage-tree family of subsets (0-based slot indices).");

    m.def(
        "ground_truth_match",
        [](const std::string& candidate, const std::string& truth, std::vector<std::pair<double, double>> domain, std::size_t n_probe,
           std::uint64_t seed, double r2_threshold, double size_factor) {
            GroundTruthSpec spec { truth, std::move(domain), n_probe, {} };
            Rng rng(seed);
            return numeric_ground_truth_match(candidate, spec, rng, { r2_threshold, size_factor });
        },
        py::arg("candidate"), py::arg("truth"), py::arg("domain"), py::arg("n_probe") = 1000, py::arg("seed") = 0,
        py::arg("r2_threshold") = 0.999, py::arg("size_factor") = 2.0, "Affine-invariant numeric equivalence test.");

    py::class_<Expression>(m, "Expression")
        .def(py::init([](const std::string& text, std::vector<std::string> names) { return Expression::parse(text, names); }),
             py::arg("text"), py::arg("feature_names") = std::vector<std::string> {})
        .def_property_readonly("node_count", &Expression::node_count)
        .def_property_readonly("features_used", &Expression::features_used)
        .def("__call__", [](const Expression& e, const Matrix& x) {
            if (x.ndim() != 2) {
                throw py::value_error("X must be 2-d (rows x features)");
            }
            auto rows = x.shape(0);
            auto cols = static_cast<std::size_t>(x.shape(1));
            if (cols < e.features_used()) {
                throw py::value_error("X has fewer columns than the expression uses");
            }
            py::array_t<double> out(rows);
            auto o = out.mutable_unchecked<1>();
            for (py::ssize_t i = 0; i < rows; ++i) {
                o(i) = e.evaluate(std::span<const double>(x.data(i, 0), cols));
            }
            return out;
        });

    m.def("run", &run_py, py::arg("X"), py::arg("y"), py::arg("X_test") = py::none(), py::arg("y_test") = py::none(),
          py::arg("seed") = 0, py::arg("threads") = 1,
          "Runs GP-GOMEA. Extra keyword arguments use the command-line setting names "
          "(strategy, prob, mut, tau, gamma, epsilon, decay, patience, depth, pop, budget, batch, generations, functions).");
}
