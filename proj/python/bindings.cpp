#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "effbudget/apps.hpp"
#include "effbudget/error.hpp"
#include "effbudget/sim.hpp"

namespace py = pybind11;
using namespace effbudget;

namespace {

BudgetSpec budget_from(const LoadedInstance& li, const py::object& gamma) {
    if (gamma.is_none()) return li.default_budget;
    BudgetSpec b;
    if (py::isinstance<py::sequence>(gamma))
        b.per_group = gamma.cast<std::vector<double>>();
    else
        b.gamma = gamma.cast<double>();
    return b;
}

py::dict solution_dict(const RobustSolution& s) {
    py::dict d;
    d["variant"] = to_string(s.variant);
    d["status"] = to_string(s.status);
    d["objective"] = s.objective;
    d["worst_case_term"] = s.worst_case_term;
    d["gamma_effective"] = s.gamma_effective;
    d["x"] = s.x;
    d["y"] = s.y;
    d["deviations"] = s.deviations;
    d["cases"] = std::string(s.cases.begin(), s.cases.end());
    return d;
}

std::vector<Variant> variants_from(const std::vector<std::string>& names) {
    std::vector<Variant> out;
    for (const auto& n : names) out.push_back(parse_variant(n));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Robust optimization with effective budgets of uncertainty";

    static py::exception<Error> exc(m, "EffbudgetError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(exc, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
        }
    });

    py::class_<LoadedInstance>(m, "Instance")
        .def_property_readonly("kind", [](const LoadedInstance& li) { return to_string(li.kind); })
        .def_readonly("name", &LoadedInstance::name)
        .def_readonly("path", &LoadedInstance::source_path)
        .def_readonly("hash", &LoadedInstance::content_hash)
        .def_property_readonly("m", [](const LoadedInstance& li) { return li.nominal.m(); })
        .def_property_readonly("p", [](const LoadedInstance& li) { return li.nominal.p(); })
        .def_property_readonly("n", [](const LoadedInstance& li) { return li.nominal.n(); })
        .def_property_readonly("y_nominal", [](const LoadedInstance& li) { return li.nominal.y_nom; })
        .def_property_readonly("y_low", [](const LoadedInstance& li) { return li.nominal.y_low; })
        .def_property_readonly("y_up", [](const LoadedInstance& li) { return li.nominal.y_up; })
        .def_property_readonly("x_names", [](const LoadedInstance& li) { return li.nominal.x_names; })
        .def_property_readonly("y_names", [](const LoadedInstance& li) { return li.nominal.y_names; })
        .def_property_readonly("groups", [](const LoadedInstance& li) { return li.nominal.groups(); })
        .def("__repr__", [](const LoadedInstance& li) {
            return "<Instance " + li.name + " (" + to_string(li.kind) + "), m=" + std::to_string(li.nominal.m()) + ">";
        });

    m.def(
        "load",
        [](const std::string& name, const std::optional<std::string>& kind) {
            std::optional<AppKind> k;
            if (kind) k = parse_kind(*kind);
            return load_instance(name, k);
        },
        py::arg("name"), py::arg("kind") = py::none(), "Load an instance file or a bundled instance by name.");

    m.def(
        "solve",
        [](const LoadedInstance& li, const std::string& variant, const py::object& gamma) {
            return solution_dict(solve_variant(li.nominal, parse_variant(variant), budget_from(li, gamma)));
        },
        py::arg("instance"), py::arg("variant") = "effective", py::arg("gamma") = py::none());

    m.def(
        "stage1",
        [](const LoadedInstance& li) {
            auto iv = stage1_admissible(li.nominal);
            py::dict d;
            d["s_low"] = iv.s_low;
            d["s_mid"] = iv.s_mid;
            d["s_up"] = iv.s_up;
            d["cases"] = std::string(iv.cases.begin(), iv.cases.end());
            return d;
        },
        py::arg("instance"));

    m.def(
        "sweep_csv",
        [](const LoadedInstance& li, const std::vector<double>& grid, const std::vector<std::string>& variants,
           int jobs) { return sweep_csv(sweep_gamma(li.nominal, grid, variants_from(variants), {}, jobs)); },
        py::arg("instance"), py::arg("grid"), py::arg("variants") = std::vector<std::string>{"conventional", "effective"},
        py::arg("jobs") = 1);

    m.def(
        "scenarios",
        [](const LoadedInstance& li, const py::object& gamma, int n, std::uint64_t seed) {
            std::vector<Vec> out;
            for (auto& s : generate_scenarios(li.nominal, budget_from(li, gamma), n, seed)) out.push_back(s.y_actual);
            return out;
        },
        py::arg("instance"), py::arg("gamma"), py::arg("n"), py::arg("seed"));

    m.def(
        "simulate",
        [](const LoadedInstance& li, const py::object& gamma, int n, std::uint64_t seed,
           const std::vector<std::string>& variants, double penalty, int jobs) {
            SimulationOptions opt;
            opt.penalty = penalty;
            opt.jobs = jobs;
            auto reps = simulate(li.nominal, budget_from(li, gamma), variants_from(variants), n, seed, opt);
            py::dict d;
            for (const auto& r : reps) {
                py::dict e;
                e["mean"] = r.mean;
                e["min"] = r.min;
                e["max"] = r.max;
                e["excluded"] = r.excluded;
                e["delta_c"] = r.delta_c;
                d[r.approach == Variant::nominal ? "deterministic" : to_string(r.approach)] = e;
            }
            return d;
        },
        py::arg("instance"), py::arg("gamma"), py::arg("n"), py::arg("seed"),
        py::arg("variants") = std::vector<std::string>{"deterministic", "conventional", "effective"},
        py::arg("penalty") = 50.0, py::arg("jobs") = 1);

    m.def(
        "export_mps",
        [](const LoadedInstance& li, const std::string& variant, const py::object& gamma) {
            std::ostringstream os;
            write_mps(os, build_variant(li.nominal, parse_variant(variant), budget_from(li, gamma)).mp);
            return os.str();
        },
        py::arg("instance"), py::arg("variant") = "conventional", py::arg("gamma") = py::none());
}
