// pybind11 bindings for the routerlab core: closed-form model
// quantities, bifurcation analysis, the stochastic simulator and the
// mean-field integrator, plus the named experiment runner.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "routerlab/bifurcation.hpp"
#include "routerlab/core_model.hpp"
#include "routerlab/experiments.hpp"
#include "routerlab/moe.hpp"
#include "routerlab/simulator.hpp"
#include "routerlab/version.hpp"

namespace py = pybind11;
namespace rl = routerlab;
using nlohmann::json;

namespace {

json json_from_pyobj(const py::object& obj) {
    if (obj.is_none()) return json::object();
    const std::string dumped =
        py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return json::parse(dumped);
}

py::object pyobj_from_json(const json& j) {
    return py::module_::import("json").attr("loads")(py::str(j.dump()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-expert adaptive softmax router laboratory (C++ core)";
    m.attr("__version__") = rl::kVersion;

    py::class_<rl::RouterParams>(m, "RouterParams")
        .def(py::init([](double a, double gamma, double temp, double h) {
                 return rl::RouterParams::from_skew(a, gamma, temp, h);
             }),
             py::arg("a"), py::arg("gamma"), py::arg("temp"), py::arg("h") = 0.0)
        .def_static("from_drifts", &rl::RouterParams::from_drifts, py::arg("a"),
                    py::arg("gamma"), py::arg("temp"), py::arg("b1"), py::arg("b2"))
        .def_readonly("a", &rl::RouterParams::a)
        .def_readonly("gamma", &rl::RouterParams::gamma)
        .def_readonly("temp", &rl::RouterParams::temp)
        .def_readonly("b1", &rl::RouterParams::b1)
        .def_readonly("b2", &rl::RouterParams::b2)
        .def_property_readonly("h", &rl::RouterParams::h)
        .def("__repr__", [](const rl::RouterParams& p) {
            return "RouterParams(a=" + std::to_string(p.a)
                 + ", gamma=" + std::to_string(p.gamma)
                 + ", temp=" + std::to_string(p.temp)
                 + ", h=" + std::to_string(p.h()) + ")";
        });

    py::class_<rl::RouterState>(m, "RouterState")
        .def(py::init([](double r1, double r2) {
                 return rl::RouterState{r1, r2};
             }),
             py::arg("r1") = 0.0, py::arg("r2") = 0.0)
        .def_readwrite("r1", &rl::RouterState::r1)
        .def_readwrite("r2", &rl::RouterState::r2)
        .def_property_readonly("y", &rl::RouterState::y);

    m.def("softmax_probs",
          [](const rl::RouterState& s, double temp) {
              const rl::Probs p = rl::softmax_probs(s, temp);
              return std::make_pair(p.p1, p.p2);
          },
          py::arg("state"), py::arg("temp"));
    m.def("load_difference", &rl::load_difference, py::arg("y"), py::arg("temp"));
    m.def("vector_field", &rl::vector_field, py::arg("y"), py::arg("params"));
    m.def("potential", &rl::potential, py::arg("y"), py::arg("params"));
    m.def("vector_field_derivatives",
          [](double y, const rl::RouterParams& p) {
              const rl::FieldDerivs d = rl::vector_field_derivatives(y, p);
              return std::make_tuple(d.f_y, d.f_yy, d.f_yyy);
          },
          py::arg("y"), py::arg("params"));

    m.def("critical_feedback", &rl::critical_feedback, py::arg("gamma"),
          py::arg("temp"));
    m.def("hysteresis_boundary", &rl::hysteresis_boundary, py::arg("a"),
          py::arg("gamma"), py::arg("temp"));
    m.def("n_expert_contrast_eigenvalue", &rl::n_expert_contrast_eigenvalue,
          py::arg("n"), py::arg("a"), py::arg("gamma"), py::arg("temp"));
    m.def("n_expert_threshold", &rl::n_expert_threshold, py::arg("n"),
          py::arg("gamma"), py::arg("temp"));

    m.def("find_equilibria",
          [](const rl::RouterParams& p) {
              const rl::EquilibriumSet set = rl::find_equilibria(p);
              py::list out;
              for (const auto& e : set.equilibria)
                  out.append(py::make_tuple(e.y, rl::to_string(e.stability), e.f_y));
              return py::make_tuple(
                  out, set.regime == rl::Regime::bistable ? "bistable" : "monostable");
          },
          py::arg("params"),
          "Returns ([(y, stability, f_y), ...] ascending in y, regime)");

    m.def("fold_curve",
          [](const std::vector<double>& q, double gamma, double temp) {
              py::list out;
              for (const auto& p : rl::fold_curve(q, gamma, temp))
                  out.append(py::make_tuple(p.q, p.a, p.h));
              return out;
          },
          py::arg("q_grid"), py::arg("gamma"), py::arg("temp"));

    m.def("cusp_normal_form",
          [](const rl::RouterParams& p) {
              const rl::CuspNormalForm c = rl::cusp_normal_form(p);
              return std::make_tuple(c.mu, c.eps, c.cubic_coeff);
          },
          py::arg("params"), "Returns (mu, eps, cubic_coeff)");

    py::class_<rl::SimConfig>(m, "SimConfig")
        .def(py::init([](const rl::RouterParams& params, double eta,
                         int batch_size, double rho, long steps,
                         std::uint64_t seed, const rl::RouterState& init) {
                 rl::SimConfig c;
                 c.params = params;
                 c.eta = eta;
                 c.batch_size = batch_size;
                 c.rho = rho;
                 c.steps = steps;
                 c.seed = seed;
                 c.init = init;
                 c.validate();
                 return c;
             }),
             py::arg("params"), py::arg("eta") = 0.002,
             py::arg("batch_size") = 512, py::arg("rho") = 0.0,
             py::arg("steps") = 0, py::arg("seed") = 0,
             py::arg("init") = rl::RouterState{})
        .def_readwrite("eta", &rl::SimConfig::eta)
        .def_readwrite("batch_size", &rl::SimConfig::batch_size)
        .def_readwrite("rho", &rl::SimConfig::rho)
        .def_readwrite("steps", &rl::SimConfig::steps)
        .def_readwrite("seed", &rl::SimConfig::seed);

    py::class_<rl::Trajectory>(m, "Trajectory")
        .def_readonly("times", &rl::Trajectory::times)
        .def_readonly("y", &rl::Trajectory::y)
        .def_readonly("u_hat", &rl::Trajectory::u_hat)
        .def_readonly("l1", &rl::Trajectory::l1)
        .def_property_readonly("final_y", [](const rl::Trajectory& t) {
            return t.final_state.y();
        });

    m.def("run_trajectory", &rl::run_trajectory, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("integrate_mean_field", &rl::integrate_mean_field, py::arg("params"),
          py::arg("rho"), py::arg("init"), py::arg("t_end"), py::arg("dt"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_ensemble",
          [](const rl::SimConfig& cfg, int n_runs, int threads) {
              rl::EnsembleStats s;
              {
                  py::gil_scoped_release release;
                  s = rl::run_ensemble(cfg, n_runs, threads);
              }
              return std::make_tuple(s.times, s.mean_u_hat, s.std_u_hat);
          },
          py::arg("config"), py::arg("n_runs"), py::arg("threads") = 1,
          "Returns (times, mean_u_hat, std_u_hat)");

    m.def("piecewise_target", &rl::piecewise_target, py::arg("x"));

    m.def("experiment_names", &rl::experiment_names);
    m.def("experiment_default_config", [](const std::string& name) {
        return pyobj_from_json(rl::experiment_default_config(name));
    });
    m.def("run_experiment",
          [](const std::string& name, const py::object& config,
             std::uint64_t seed, int threads) {
              const json resolved = rl::experiment_resolve_config(
                  name, json_from_pyobj(config));
              rl::ExperimentOutput out;
              {
                  py::gil_scoped_release release;
                  out = rl::run_experiment(name, resolved, seed, threads);
              }
              py::dict tables;
              for (const auto& [stem, table] : out.tables)
                  tables[py::str(stem)] = table.to_csv();
              py::dict res;
              res["tables"] = tables;
              res["summary"] = out.summary;
              res["config"] = pyobj_from_json(resolved);
              return res;
          },
          py::arg("name"), py::arg("config") = py::none(), py::arg("seed") = 1,
          py::arg("threads") = 1,
          "Runs a named experiment; returns {'tables': {stem: csv}, ...}");
}
