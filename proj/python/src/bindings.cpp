#include "mixlab/cutoff_lab.hpp"
#include "mixlab/distances.hpp"
#include "mixlab/error.hpp"
#include "mixlab/io.hpp"
#include "mixlab/kernel_eval.hpp"
#include "mixlab/models.hpp"
#include "mixlab/product.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace mixlab;

namespace {

// None -> maximum over point masses, int -> point mass, array -> that distribution.
Start to_start(const py::object& obj, Eigen::Index n) {
    if (obj.is_none()) return Start::max();
    if (py::isinstance<py::str>(obj)) {
        if (obj.cast<std::string>() == "max") return Start::max();
        throw Error(ErrorCode::InvalidArgument, "start must be None, 'max', a state index or a distribution");
    }
    if (py::isinstance<py::int_>(obj)) return Start::state(n, obj.cast<Eigen::Index>());
    return Start::from(obj.cast<Vector>());
}

ProductStart to_product_start(const py::object& obj, const ProductSpec& spec) {
    if (obj.is_none()) return all_max(spec);
    auto items = obj.cast<py::list>();
    if (items.size() != spec.size()) throw Error(ErrorCode::DimensionMismatch, "one start per coordinate is required");
    ProductStart out;
    for (std::size_t i = 0; i < spec.size(); ++i) out.push_back(to_start(items[i], spec.coords[i].size()));
    return out;
}

Kind to_kind(const std::string& s) { return parse_kind(s); }

UniformizationParams params_with(double tail_tol) {
    UniformizationParams p;
    p.tail_tol = tail_tol;
    p.validate();
    return p;
}

py::dict report_dict(const CutoffReport& r) {
    py::dict d;
    d["indices"] = r.indices;
    d["t_eps"] = r.t_eps;
    d["t_delta"] = r.t_delta;
    d["ratios"] = r.ratios;
    d["windows"] = r.windows;
    d["relative_windows"] = r.relative_windows;
    d["verdict"] = std::string(verdict_name(r.verdict));
    d["rule"] = r.trend.rule;
    d["sharpness_slope"] = r.trend.sharpness_slope;
    py::list failures;
    for (const auto& f : r.failures) failures.append(py::make_tuple(f.n, error_code_name(f.code), f.message));
    d["failures"] = failures;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mixing times, distances to stationarity and cutoff diagnostics for finite Markov chains";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    py::class_<MarkovChain>(m, "MarkovChain")
        .def(py::init([](const Matrix& kernel, const std::string& label, std::optional<Vector> stationary) {
                 return MarkovChain::from_kernel(kernel, label, std::move(stationary));
             }),
             py::arg("kernel"), py::arg("label") = "", py::arg("stationary") = py::none())
        .def_property_readonly("kernel", &MarkovChain::kernel)
        .def_property_readonly("stationary", &MarkovChain::stationary)
        .def_property_readonly("reversible", &MarkovChain::reversible)
        .def_property_readonly("label", &MarkovChain::label)
        .def_property_readonly("size", &MarkovChain::size)
        .def("__repr__", [](const MarkovChain& c) {
            return "<MarkovChain '" + c.label() + "' with " + std::to_string(c.size()) + " states>";
        });

    py::class_<ProductSpec>(m, "ProductSpec")
        .def(py::init([](std::vector<MarkovChain> coords, std::vector<double> weights) {
                 ProductSpec s{std::move(coords), std::move(weights)};
                 s.validate();
                 return s;
             }),
             py::arg("coords"), py::arg("weights"))
        .def_readonly("coords", &ProductSpec::coords)
        .def_readonly("weights", &ProductSpec::weights)
        .def_property_readonly("q", &ProductSpec::q)
        .def_property_readonly("state_count", &ProductSpec::state_count)
        .def("__len__", &ProductSpec::size);

    m.def("stationary_distribution", &stationary_distribution, py::arg("kernel"));
    m.def("spectral_gap", &spectral_gap, py::arg("chain"));
    m.def("validate_chain",
          [](const Matrix& kernel) {
              ValidationReport r = validate_chain(kernel);
              return py::make_tuple(r.ok, r.summary());
          },
          py::arg("kernel"));

    m.def("tv_distance", &tv_distance, py::arg("mu"), py::arg("nu"));
    m.def("hellinger_distance", &hellinger_distance, py::arg("mu"), py::arg("nu"));
    m.def("l2_distance", &l2_distance, py::arg("mu"), py::arg("pi"));

    m.def("heat_kernel_matrix",
          [](const MarkovChain& c, double t, double tail_tol) { return heat_kernel_matrix(c.kernel(), t, params_with(tail_tol)); },
          py::arg("chain"), py::arg("t"), py::arg("tail_tol") = 1e-12);

    m.def("distance_curve",
          [](const MarkovChain& c, const std::string& kind, const std::vector<double>& times, const py::object& start,
             double tail_tol) {
              return distance_curve(c, to_kind(kind), to_start(start, c.size()), times, params_with(tail_tol)).values;
          },
          py::arg("chain"), py::arg("kind"), py::arg("times"), py::arg("start") = py::none(), py::arg("tail_tol") = 1e-12);

    m.def("mixing_time",
          [](const MarkovChain& c, const std::string& kind, double eps, const py::object& start, bool discrete) {
              MixingTime mt = mixing_time(c, to_kind(kind), eps, to_start(start, c.size()),
                                          discrete ? TimeMode::Discrete : TimeMode::Continuous);
              return py::make_tuple(mt.value, mt.resolution);
          },
          py::arg("chain"), py::arg("kind"), py::arg("epsilon"), py::arg("start") = py::none(), py::arg("discrete") = false,
          "Returns (time, resolution).");

    m.def("product_hellinger",
          [](const ProductSpec& s, double t, const py::object& starts) {
              return product_hellinger_exact(s, t, to_product_start(starts, s));
          },
          py::arg("spec"), py::arg("t"), py::arg("starts") = py::none());
    m.def("product_tv_bracket",
          [](const ProductSpec& s, double t, const py::object& starts) {
              BoundBracket b = product_tv_bracket(s, t, to_product_start(starts, s));
              return py::make_tuple(b.lower, b.upper);
          },
          py::arg("spec"), py::arg("t"), py::arg("starts") = py::none());
    m.def("prodmixing_bounds",
          [](const ProductSpec& s, double t, const std::string& kind, const py::object& starts) {
              ProdMixingBounds b = prodmixing_bounds(s, t, to_kind(kind), to_product_start(starts, s));
              return py::make_tuple(b.bracket.lower, b.bracket.upper);
          },
          py::arg("spec"), py::arg("t"), py::arg("kind"), py::arg("starts") = py::none(),
          "Bracket on the d^rho scale.");
    m.def("dense_product_distance",
          [](const ProductSpec& s, const std::string& kind, double t, const py::object& starts) {
              return dense_product_distance(s, to_kind(kind), t, to_product_start(starts, s));
          },
          py::arg("spec"), py::arg("kind"), py::arg("t"), py::arg("starts") = py::none());

    m.def("two_state_chain", [](double a, double b) { return two_state_chain({a, b}); }, py::arg("alpha"), py::arg("beta"));
    m.def("cycle_chain", &cycle_chain, py::arg("n"));
    m.def("ehrenfest_chain", &ehrenfest_chain, py::arg("n"));
    m.def("lazy_path_chain", &lazy_path_chain, py::arg("n"));
    m.def("lacoin_chain", [](int n, double a, double b, double beta) { return lacoin_chain({n, a, b, beta}); },
          py::arg("n"), py::arg("a"), py::arg("b"), py::arg("beta") = 0.0);
    m.def("model_names", &model_names);

    m.def("cutoff_scan",
          [](const std::string& model, const std::vector<int>& indices, const std::string& kind, double eps, double delta,
             const std::map<std::string, std::string>& params) {
              return report_dict(cutoff_ratio_diagnostic(make_family(model, params), to_kind(kind), eps, delta, indices));
          },
          py::arg("model"), py::arg("indices"), py::arg("kind") = "tv", py::arg("epsilon") = 0.1, py::arg("delta") = 0.9,
          py::arg("params") = std::map<std::string, std::string>{});

    m.def("load_chain", [](const std::string& path) { return load_chain(path); }, py::arg("path"));
    m.def("save_chain", [](const MarkovChain& c, const std::string& path) { save_chain(c, path); }, py::arg("chain"),
          py::arg("path"));
}
