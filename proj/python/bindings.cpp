#include "mixlab/mixlab.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace mixlab;

namespace {

ModelPtr model_from(const py::dict& kw) {
    ModelConfig c;
    for (auto [k, v] : kw) c.set(py::str(k), py::str(v));
    return make_model(c);
}

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

ComplexFunction ones(const GibbsMeasure& g) { return ComplexFunction(g.model->grid_ptr(), Complex(1.0, 0.0)); }

} // namespace

PYBIND11_MODULE(_mixlab, m) {
    m.doc() = "Transfer operators, Dolgopyat majorants and orbit counting for Markov suspension flows";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<SizeError>(m, "SizeError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<InvariantViolation>(m, "InvariantViolation", base.ptr());

    py::class_<MarkovModel, std::shared_ptr<MarkovModel>>(m, "Model")
        .def(py::init([](py::kwargs kw) {
            return std::const_pointer_cast<MarkovModel>(model_from(kw ? py::dict(kw) : py::dict()));
        }))
        .def_static("parse", [](const std::string& text) {
            return std::const_pointer_cast<MarkovModel>(make_model(ModelConfig::parse(text)));
        })
        .def_readonly("hash", &MarkovModel::hash)
        .def_readonly("theta", &MarkovModel::theta)
        .def_readonly("tau0", &MarkovModel::tau0)
        .def_readonly("tau_star", &MarkovModel::tau_star)
        .def_readonly("chi0", &MarkovModel::chi0)
        .def_property_readonly("alphabet", &MarkovModel::alphabet)
        .def_property_readonly("grid_size", [](const MarkovModel& x) { return x.config.grid_size; })
        .def_property_readonly("nodes", [](const MarkovModel& x) { return x.grid().size(); })
        .def_property_readonly("config", [](const MarkovModel& x) { return x.config.serialize(); })
        .def("tau", [](const MarkovModel& x, double t) { return x.tau(x.point(t)); })
        .def("mu", [](const MarkovModel& x, double t) { return x.mu(x.point(t)); });

    py::class_<GibbsMeasure>(m, "Gibbs")
        .def_readonly("flow_pressure", &GibbsMeasure::flow_pressure)
        .def_readonly("fiber_defect", &GibbsMeasure::fiber_defect)
        .def_readonly("invariance_defect", &GibbsMeasure::invariance_defect)
        .def_property_readonly("weights", [](const GibbsMeasure& g) { return to_array(g.nu.weights()); })
        .def_property_readonly("nodes", [](const GibbsMeasure& g) {
            std::vector<double> x(g.model->grid().size());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = g.model->grid().node(i).x;
            return to_array(x);
        });

    m.def("gibbs", [](const std::shared_ptr<MarkovModel>& x) { return gibbs_measure(x); });
    m.def("pressure", [](const MarkovModel& x, const std::function<double(double)>& f) {
        return pressure(x, [&](const PointRef& p) { return f(p.x); });
    });
    m.def("entropy", [](const MarkovModel& x) { return entropy(x); });
    m.def("fixed_point_count", &fixed_point_count);
    m.def("necklace_count", &necklace_count);
    m.def("li", &li);
    m.def("set_thread_cap", &set_thread_cap);

    m.def("fractional_moment", [](const GibbsMeasure& g, double gamma0, int n) {
        return fractional_moment(*g.model, g.nu, gamma0, n);
    });

    m.def("transfer_sup", [](const GibbsMeasure& g, double a, double b, int n) {
        auto u = ones(g);
        std::vector<double> out;
        for (int k = 0; k < n; ++k) {
            u = complex_rpf_apply(g, a, b, u);
            out.push_back(c0_norm(u));
        }
        return to_array(out);
    }, py::arg("g"), py::arg("a"), py::arg("b"), py::arg("n"));

    m.def("decay_profile", [](const GibbsMeasure& g, double a, const std::vector<double>& bs, double c) {
        auto d = decay_profile(g, a, bs, c, ones(g));
        py::list rows;
        for (const auto& r : d.rows)
            rows.append(py::dict(py::arg("b") = r.b, py::arg("n") = r.n, py::arg("c0") = r.c0, py::arg("l2") = r.l2,
                                 py::arg("flagged") = r.flagged));
        return py::dict(py::arg("rows") = rows, py::arg("kappa") = d.kappa, py::arg("fitted") = d.fitted,
                        py::arg("csv") = d.to_csv());
    }, py::arg("g"), py::arg("a") = 0.0, py::arg("bs"), py::arg("c") = 4.0);

    m.def("dolgopyat", [](const GibbsMeasure& g, double a, double b, double C1) {
        EngineParams p;
        p.C1 = C1;
        auto c = run_l2_iteration(g, a, b, ones(g), p);
        std::vector<double> H;
        for (const auto& r : c.rows) H.push_back(r.H_l2);
        return py::dict(py::arg("kappa") = c.kappa, py::arg("pass") = c.pass, py::arg("refused") = c.refused,
                        py::arg("violations") = c.violations, py::arg("max_cs_violation") = c.max_cs_violation,
                        py::arg("kappa6") = c.kappa6, py::arg("H_l2") = H, py::arg("csv") = c.to_csv());
    }, py::arg("g"), py::arg("a") = 0.0, py::arg("b") = 256.0, py::arg("C1") = 8.0);

    m.def("uni_scan", [](const MarkovModel& x, double eps, double C1) {
        auto c = uni_scan(x, matching_scale(x, eps), uniform_set(x, 4, 0.1, 64), C1);
        return py::dict(py::arg("kappa") = c.kappa, py::arg("points") = c.points, py::arg("csv") = c.to_csv());
    }, py::arg("model"), py::arg("eps"), py::arg("C1") = 8.0);

    m.def("orbit_counting", [](const MarkovModel& x, int n_max, const std::vector<double>& T) {
        auto r = prime_orbit_report(x, n_max, T);
        py::list rows;
        for (const auto& c : r.rows)
            rows.append(py::dict(py::arg("T") = c.T, py::arg("pi") = c.pi, py::arg("li") = c.li,
                                 py::arg("rel") = c.rel, py::arg("complete") = c.complete));
        return py::dict(py::arg("h") = r.h, py::arg("rows") = rows, py::arg("csv") = r.to_csv());
    });

    m.def("correlation", [](const GibbsMeasure& g, const std::string& a, const std::string& b,
                            const std::vector<double>& t, std::size_t samples, std::uint64_t seed) {
        auto r = correlation_decay(g, named_observable(a), named_observable(b), t, samples, seed);
        std::vector<double> corr;
        for (const auto& row : r.rows) corr.push_back(row.corr);
        return py::dict(py::arg("corr") = to_array(corr), py::arg("rate") = r.rate,
                        py::arg("rate_stderr") = r.rate_stderr, py::arg("r2") = r.r2, py::arg("fitted") = r.fitted,
                        py::arg("csv") = r.to_csv());
    }, py::arg("g"), py::arg("a"), py::arg("b"), py::arg("t"), py::arg("samples") = 100000, py::arg("seed") = 1);
}
