#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tfluct/combinatorics.hpp"
#include "tfluct/ensembles.hpp"
#include "tfluct/experiments.hpp"
#include "tfluct/theory.hpp"
#include "tfluct/vectors.hpp"

namespace py = pybind11;
using namespace tfluct;

namespace {

using PairList = std::vector<std::pair<int, int>>;

PairPartition to_partition(const PairList& blocks)
{
    std::vector<Pair> out;
    for (const auto& [a, b] : blocks) {
        out.push_back({a, b});
    }
    return PairPartition(std::move(out));
}

PairList from_partition(const PairPartition& pi)
{
    PairList out;
    for (const auto& b : pi.blocks()) {
        out.emplace_back(b[0], b[1]);
    }
    return out;
}

py::tuple mc(const McEstimate& e) { return py::make_tuple(e.estimate, e.stderr_); }

py::dict result_dict(const EstimateResult& r)
{
    py::dict d;
    d["label"] = r.label;
    d["model"] = model_name(r.model);
    d["powers"] = r.powers;
    d["times"] = r.times;
    d["n"] = r.n;
    d["bn"] = r.bn;
    d["kappa"] = r.kappa;
    d["replicas"] = r.replicas;
    d["estimate"] = r.estimate;
    d["stderr"] = r.stderr_;
    d["theory"] = r.theory ? py::object(py::float_(*r.theory)) : py::object(py::none());
    d["theory_exact"] = r.theory_exact ? py::object(py::float_(*r.theory_exact)) : py::object(py::none());
    d["z"] = r.z;
    d["seed"] = r.seed;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Exact counts, limiting covariances and Monte Carlo estimates for band Toeplitz fluctuations";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<WorkCapExceeded>(m, "WorkCapExceeded", PyExc_RuntimeError);

    m.def("double_factorial", &double_factorial, py::arg("m"));
    m.def("binomial", &binomial, py::arg("n"), py::arg("k"));
    m.def("r1", &r1, py::arg("p"), py::arg("q"), py::arg("k"));
    m.def("r2", &r2, py::arg("p"), py::arg("q"));
    m.def("r3", &r3, py::arg("p"), py::arg("r"));
    m.def("r4", &r4, py::arg("p"), py::arg("r"));
    m.def("card_p2tilde_even", &card_p2tilde_even, py::arg("p"), py::arg("r"));
    m.def(
        "enumerate_pair_partitions",
        [](int k) {
            std::vector<PairList> out;
            for (const auto& pi : enumerate_pair_partitions(k)) {
                out.push_back(from_partition(pi));
            }
            return out;
        },
        py::arg("k"), "All pairings of 1..2k as lists of (a, b) blocks.");
    m.def(
        "count_crosses", [](const PairList& blocks, int p) { return count_crosses(to_partition(blocks), p); },
        py::arg("blocks"), py::arg("p"));

    m.def("cov_model_a_b0", &cov_model_a_b0, py::arg("p"), py::arg("q"), py::arg("t1"), py::arg("t2"),
          py::arg("kappa") = 3.0);
    m.def(
        "cov_model_a_general",
        [](int p, int q, double t1, double t2, double b, double kappa, std::uint64_t budget, std::uint64_t seed) {
            McEstimate e;
            {
                py::gil_scoped_release release;
                e = cov_model_a_general({Model::A, p, q, t1, t2, b, kappa}, budget, seed);
            }
            return mc(e);
        },
        py::arg("p"), py::arg("q"), py::arg("t1"), py::arg("t2"), py::arg("b"), py::arg("kappa") = 3.0,
        py::arg("budget") = 100000, py::arg("seed") = 1, "Returns (estimate, stderr).");
    m.def(
        "sigma2", [](int p, double kappa, double b, std::uint64_t budget) { return mc(sigma2(p, kappa, b, budget)); },
        py::arg("p"), py::arg("kappa") = 3.0, py::arg("b") = 0.0, py::arg("budget") = 100000);
    m.def("cov_model_b", &cov_model_b, py::arg("p"), py::arg("q"), py::arg("t1"), py::arg("t2"));
    m.def(
        "wick_joint_prediction",
        [](const std::vector<std::pair<int, double>>& targets, const std::string& model, double kappa) {
            std::vector<TimedPower> tp;
            for (const auto& [p, t] : targets) {
                tp.push_back({p, t});
            }
            if (model != "A" && model != "B") {
                throw std::invalid_argument("model must be 'A' or 'B'");
            }
            return wick_joint_prediction(tp, model == "A" ? Model::A : Model::B, 0.0, kappa);
        },
        py::arg("targets"), py::arg("model") = "B", py::arg("kappa") = 3.0);

    m.def(
        "trace_product_formula",
        [](const std::vector<std::vector<double>>& coeffs, const std::vector<int>& widths, int n) {
            return trace_product_formula(coeffs, widths, n);
        },
        py::arg("coeffs"), py::arg("widths"), py::arg("n"));
    m.def(
        "trace_power",
        [](int n, const std::vector<double>& coeffs, int p) {
            return trace_power_dense(toeplitz_band(n, coeffs, static_cast<int>(coeffs.size()) - 1), p);
        },
        py::arg("n"), py::arg("coeffs"), py::arg("p"), "Trace of the p-th power of a symmetric band Toeplitz matrix.");

    m.def(
        "reduce_pair",
        [](const std::vector<int>& j, const std::vector<int>& jp) {
            const auto r = reduce_pair(BalancedVector(j), BalancedVector(jp));
            return py::make_tuple(r.merged.components(), r.negated);
        },
        py::arg("j"), py::arg("jp"));
    m.def(
        "enumerate_preimages",
        [](const std::vector<int>& l, int p, int q, int bound) {
            std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
            for (const auto& pre : enumerate_preimages(BalancedVector(l), p, q, bound)) {
                out.emplace_back(pre.first.components(), pre.second.components());
            }
            return out;
        },
        py::arg("l"), py::arg("p"), py::arg("q"), py::arg("bound"));
    m.def(
        "count_cluster_set",
        [](int l, const std::vector<int>& lengths, int bound) { return count_cluster_set(l, lengths, bound); },
        py::arg("l"), py::arg("lengths"), py::arg("bound"));

    m.def(
        "run_config",
        [](const py::object& config) {
            const std::string text = py::isinstance<py::str>(config)
                                         ? config.cast<std::string>()
                                         : py::module_::import("json").attr("dumps")(config).cast<std::string>();
            const ExperimentConfig c = config_from_json(text);
            std::vector<EstimateResult> results;
            {
                py::gil_scoped_release release;
                results = run_experiment(c);
            }
            py::list out;
            for (const auto& r : results) {
                out.append(result_dict(r));
            }
            return out;
        },
        py::arg("config"), "Runs an experiment config (dict or JSON text) and returns one dict per estimate.");
}
