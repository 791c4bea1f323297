#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mckm/dataset.hpp"
#include "mckm/metrics.hpp"
#include "mckm/pipeline.hpp"

namespace py = pybind11;
using namespace mckm;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<long, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("points must be a 2-d array");
    const auto n = static_cast<std::size_t>(arr.shape(0));
    const auto p = static_cast<std::size_t>(arr.shape(1));
    Matrix m(n, p);
    const double* src = arr.data();
    std::copy(src, src + n * p, m.data());
    return m;
}

py::array_t<double> from_matrix(const Matrix& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.rows() * m.cols(), arr.mutable_data());
    return arr;
}

// accepts arbitrary integer labels, densely remapped to 1..k by first appearance
Partition to_partition(const IntArray& labels) {
    if (labels.ndim() != 1) throw std::invalid_argument("labels must be a 1-d array");
    Partition part;
    std::map<long, int> ids;
    const long* src = labels.data();
    for (py::ssize_t i = 0; i < labels.shape(0); ++i) {
        auto [it, fresh] = ids.try_emplace(src[i], static_cast<int>(ids.size()) + 1);
        (void)fresh;
        part.assignments.push_back(it->second);
    }
    part.k = static_cast<int>(ids.size());
    return part;
}

py::array_t<int> assignments_array(const Partition& part) {
    py::array_t<int> arr(static_cast<py::ssize_t>(part.assignments.size()));
    std::copy(part.assignments.begin(), part.assignments.end(), arr.mutable_data());
    return arr;
}

AlgorithmSpec make_spec(const std::string& algorithm, std::optional<int> k, double rho,
                        double gamma, std::optional<int> q, double kappa, double nu, double eta,
                        double tol, int max_iter, std::optional<double> epsilon, bool drop_last,
                        int max_cycles, std::uint64_t seed) {
    AlgorithmSpec spec;
    spec.algorithm = algorithm;
    spec.k = k;
    spec.rho = rho;
    spec.gamma = gamma;
    spec.q = q;
    spec.kappa = kappa;
    spec.nu = nu;
    spec.eta = eta;
    spec.tol = tol;
    spec.max_iter = max_iter;
    spec.epsilon = epsilon;
    spec.drop_last = drop_last;
    spec.max_cycles = max_cycles;
    spec.seed = seed;
    spec.validate();
    return spec;
}

}  // namespace

PYBIND11_MODULE(_mckm, m) {
    m.doc() = "multi-prototype sampling + convex merging clustering";

    m.def(
        "generate",
        [](const std::string& spec_text, std::uint64_t seed) {
            const Dataset ds = generate_synthetic(parse_generator_spec(spec_text), seed);
            py::dict out;
            out["points"] = from_matrix(ds.points);
            out["labels"] = assignments_array(ds.label_partition());
            out["name"] = ds.name;
            return out;
        },
        py::arg("spec"), py::arg("seed") = 0,
        "Build a synthetic dataset from a generator spec string.");

    m.def(
        "normalize",
        [](const DoubleArray& points) {
            Dataset ds;
            ds.points = to_matrix(points);
            return from_matrix(normalize(ds).points);
        },
        py::arg("points"), "Min-max scale each feature to [0, 1].");

    m.def(
        "fit",
        [](const DoubleArray& points, const std::string& algorithm,
           std::optional<IntArray> labels, std::optional<int> k, double rho, double gamma,
           std::optional<int> q, double kappa, double nu, double eta, double tol, int max_iter,
           std::optional<double> epsilon, bool drop_last, int max_cycles, std::uint64_t seed) {
            Dataset ds;
            ds.points = to_matrix(points);
            ds.name = "array";
            if (labels) {
                const Partition truth = to_partition(*labels);
                if (truth.size() != ds.n())
                    throw std::invalid_argument("labels length must match points");
                ds.labels = truth.assignments;
            }
            const AlgorithmSpec spec =
                make_spec(algorithm, k, rho, gamma, q, kappa, nu, eta, tol, max_iter, epsilon,
                          drop_last, max_cycles, seed);
            RunReport rep;
            {
                py::gil_scoped_release release;
                rep = run(ds, spec);
            }
            py::dict out;
            out["algorithm"] = rep.algorithm;
            out["k_star"] = rep.k_star;
            out["assignments"] = assignments_array(rep.partition);
            out["s_star"] = rep.s_star;
            out["cost"] = rep.cost;
            out["runtime_seconds"] = rep.runtime_seconds;
            out["admm_iterations"] = rep.admm_iterations;
            out["admm_converged"] = rep.admm_converged;
            if (rep.has_metrics) {
                out["f_star"] = rep.f_star;
                out["nmi"] = rep.nmi;
                out["ari"] = rep.ari;
                out["cost_gap"] = rep.cost_gap;
            }
            return out;
        },
        py::arg("points"), py::arg("algorithm") = "mckm", py::arg("labels") = py::none(),
        py::arg("k") = py::none(), py::arg("rho") = 1.0, py::arg("gamma") = 0.5,
        py::arg("q") = py::none(), py::arg("kappa") = 0.9, py::arg("nu") = 1.0,
        py::arg("eta") = 1e-6, py::arg("tol") = 1e-6, py::arg("max_iter") = 10000,
        py::arg("epsilon") = py::none(), py::arg("drop_last") = false,
        py::arg("max_cycles") = 50, py::arg("seed") = 0,
        "Run one clustering algorithm and return its report as a dict.");

    auto pairwise = [](const IntArray& truth, const IntArray& pred, auto&& metric) {
        const Partition a = to_partition(truth);
        const Partition b = to_partition(pred);
        if (a.size() != b.size()) throw std::invalid_argument("label lengths differ");
        return metric(a, b);
    };
    m.def(
        "f_star",
        [pairwise](const IntArray& t, const IntArray& p) {
            return pairwise(t, p, [](const auto& a, const auto& b) { return f_star(a, b); });
        },
        py::arg("truth"), py::arg("pred"), "Pairwise F-measure between two labelings.");
    m.def(
        "nmi",
        [pairwise](const IntArray& t, const IntArray& p) {
            return pairwise(t, p, [](const auto& a, const auto& b) { return nmi(a, b); });
        },
        py::arg("truth"), py::arg("pred"),
        "Normalized mutual information (geometric normalization).");
    m.def(
        "ari",
        [pairwise](const IntArray& t, const IntArray& p) {
            return pairwise(t, p, [](const auto& a, const auto& b) { return ari(a, b); });
        },
        py::arg("truth"), py::arg("pred"), "Adjusted Rand index between two labelings.");
}
