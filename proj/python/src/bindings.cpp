#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>
#include <string>
#include <tuple>

#include "tricrystal/commands.hpp"
#include "tricrystal/energy.hpp"
#include "tricrystal/geometry.hpp"
#include "tricrystal/harness.hpp"
#include "tricrystal/observables.hpp"
#include "tricrystal/potential.hpp"
#include "tricrystal/sampler.hpp"
#include "tricrystal/version.hpp"

namespace py = pybind11;
using namespace tricrystal;

namespace {

Mat2 to_mat(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2 || a.shape(0) != 2 || a.shape(1) != 2) throw std::invalid_argument("expected a 2x2 array");
    auto r = a.unchecked<2>();
    return {r(0, 0), r(0, 1), r(1, 0), r(1, 1)};
}

py::array_t<double> from_mat(const Mat2& m) {
    py::array_t<double> out({2, 2});
    auto w = out.mutable_unchecked<2>();
    w(0, 0) = m.a;
    w(0, 1) = m.b;
    w(1, 0) = m.c;
    w(1, 1) = m.d;
    return out;
}

template <class F>
py::array_t<double> site_vectors(const Configuration& c, F&& get) {
    py::array_t<double> out({c.site_count(), 2});
    auto w = out.mutable_unchecked<2>();
    for (int s = 0; s < c.site_count(); ++s) {
        const Vec2 v = get(s);
        w(s, 0) = v.x;
        w(s, 1) = v.y;
    }
    return out;
}

py::dict record_dict(const ObservableRecord& r) {
    py::dict d;
    d["step"] = r.step;
    d["bond_dev_sq"] = r.bond_dev_sq;
    d["jac_dev_sq"] = r.jac_dev_sq;
    d["rigidity_sum"] = r.rigidity_sum;
    d["defect_count"] = r.defect_count;
    d["energy_gap"] = r.energy_gap;
    return d;
}

std::shared_ptr<const PotentialSpec> make_spec(double kappa, double alpha, double l, double m, double beta) {
    auto s = std::make_shared<PotentialSpec>();
    s->potential = PairPotential::quadratic(kappa);
    s->alpha = alpha;
    s->l = l;
    s->m = m;
    s->beta = beta;
    return s;
}

template <class Cmd>
std::tuple<int, std::string, std::string> capture(Cmd&& cmd) {
    std::ostringstream out, err;
    const int code = cmd(out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Triangular crystal with vacancies: configurations, energies and the Metropolis-Hastings sampler";
    mod.attr("__version__") = kVersion;

    py::class_<PotentialSpec, std::shared_ptr<PotentialSpec>>(mod, "PotentialSpec")
        .def(py::init([](double kappa, double alpha, double l, double m, double beta) {
                 return std::const_pointer_cast<PotentialSpec>(make_spec(kappa, alpha, l, m, beta));
             }),
             py::arg("kappa") = 100.0, py::arg("alpha") = 0.1, py::arg("l") = 1.0, py::arg("m") = 20.0,
             py::arg("beta") = 100.0)
        .def_static(
            "tabulated",
            [](std::vector<std::pair<double, double>> knots, double alpha, double l, double m, double beta) {
                auto s = std::make_shared<PotentialSpec>();
                s->potential = PairPotential::tabulated(std::move(knots));
                s->alpha = alpha;
                s->l = l;
                s->m = m;
                s->beta = beta;
                return s;
            },
            py::arg("knots"), py::arg("alpha") = 0.1, py::arg("l") = 1.0, py::arg("m") = 20.0, py::arg("beta") = 100.0)
        .def_readonly("alpha", &PotentialSpec::alpha)
        .def_readonly("l", &PotentialSpec::l)
        .def_readonly("m", &PotentialSpec::m)
        .def_readonly("beta", &PotentialSpec::beta)
        .def("value", [](const PotentialSpec& s, double r) { return eval_v(s, r); })
        .def("pressure", &pressure_coefficient)
        .def("validate", [](const PotentialSpec& s) {
            std::vector<std::tuple<std::string, bool, double, std::string>> out;
            for (const auto& c : validate(s).checks) out.emplace_back(c.name, c.passed, c.measured, c.detail);
            return out;
        });

    py::class_<Configuration>(mod, "Configuration")
        .def_static(
            "standard",
            [](int n, std::shared_ptr<PotentialSpec> spec) {
                return Configuration::standard(std::make_shared<const Lattice>(n), spec);
            },
            py::arg("n"), py::arg("spec"))
        .def_property_readonly("n", [](const Configuration& c) { return c.lattice().size(); })
        .def_property_readonly("site_count", &Configuration::site_count)
        .def_property_readonly("defect_count", &Configuration::defect_count)
        .def_property_readonly("holes", &Configuration::holes)
        .def("is_hole", &Configuration::is_hole)
        .def("make_hole", &Configuration::make_hole)
        .def("set_displacement",
             [](Configuration& c, int site, double x, double y) { c.set_displacement(site, {x, y}); })
        .def("displacements", [](const Configuration& c) { return site_vectors(c, [&](int s) { return c.displacement(s); }); })
        .def("positions", [](const Configuration& c) { return site_vectors(c, [&](int s) { return c.extended_position(s); }); })
        .def("jacobian", [](const Configuration& c, int t) { return from_mat(c.jacobian(t)); })
        .def("satisfies_constraints", [](const Configuration& c) { return c.check_constraints().ok(); })
        .def("energy", [](const Configuration& c) { return hamiltonian(c).total; })
        .def("energy_gap", &energy_gap)
        .def("decomposition_residual", &decomposition_check)
        .def("observables", [](const Configuration& c) { return record_dict(measure(c)); });

    py::class_<Chain>(mod, "Chain")
        .def(py::init([](const Configuration& initial, std::uint64_t seed, double delta, bool tune) {
                 SamplerParams p;
                 p.delta = delta;
                 p.tune = tune;
                 return Chain(initial, p, seed);
             }),
             py::arg("initial"), py::arg("seed") = 1, py::arg("delta") = 0.01, py::arg("tune") = true)
        .def("step", &Chain::step)
        .def(
            "sweep",
            [](Chain& c, int count) {
                for (int i = 0; i < count; ++i) c.sweep();
            },
            py::arg("count") = 1)
        .def_property_readonly("config", &Chain::config)
        .def_property_readonly("steps", &Chain::steps)
        .def_property_readonly("sweeps", &Chain::sweeps)
        .def_property_readonly("step_size", &Chain::step_size)
        .def_property_readonly("energy", &Chain::energy)
        .def_property("tuning", &Chain::tuning, &Chain::set_tuning)
        .def("acceptance", [](const Chain& c) {
            py::dict d;
            d["displace"] = c.tallies()[0].acceptance_rate();
            d["create"] = c.tallies()[1].acceptance_rate();
            d["annihilate"] = c.tallies()[2].acceptance_rate();
            return d;
        })
        .def("save", [](const Chain& c) {
            std::ostringstream os;
            c.save(os);
            return os.str();
        })
        .def_static("load", [](const std::string& text) {
            std::istringstream is(text);
            return Chain::load(is);
        });

    mod.def(
        "dist_so2", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& m) { return dist_so2(to_mat(m)); },
        py::arg("matrix"));
    mod.def(
        "best_rotation",
        [](const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>& ms,
           std::vector<double> weights) {
            if (weights.empty()) weights.assign(ms.size(), 1.0);
            if (weights.size() != ms.size()) throw std::invalid_argument("weights and matrices differ in length");
            std::vector<WeightedJacobian> js;
            for (std::size_t i = 0; i < ms.size(); ++i) js.push_back({to_mat(ms[i]), weights[i]});
            return from_mat(best_rotation(js));
        },
        py::arg("matrices"), py::arg("weights") = std::vector<double>{});

    mod.def(
        "detailed_balance_audit",
        [](std::uint64_t steps, std::uint64_t seed) {
            AuditParams p;
            p.steps = steps;
            p.seed = seed;
            const auto r = detailed_balance_audit(p);
            py::dict d;
            d["states"] = r.states;
            d["tv_distance"] = r.tv_distance;
            d["exact_hole_probability"] = r.exact_hole_probability;
            d["empirical_hole_probability"] = r.empirical_hole_probability;
            return d;
        },
        py::arg("steps") = 1'000'000, py::arg("seed") = 1);

    mod.def(
        "simulate",
        [](const std::string& config, bool resume, std::uint64_t stop_at_sweep) {
            return capture([&](std::ostream& o, std::ostream& e) { return cmd_simulate(config, {resume, stop_at_sweep}, o, e); });
        },
        py::arg("config"), py::arg("resume") = false, py::arg("stop_at_sweep") = 0);
    mod.def(
        "verify",
        [](const std::string& config) {
            return capture([&](std::ostream& o, std::ostream& e) { return cmd_verify(config, o, e); });
        },
        py::arg("config"));
    mod.def(
        "scan",
        [](const std::string& config) {
            return capture([&](std::ostream& o, std::ostream& e) { return cmd_scan(config, o, e); });
        },
        py::arg("config"));
}
