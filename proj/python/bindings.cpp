#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmf/constants.hpp"
#include "pmf/environment.hpp"
#include "pmf/forecaster.hpp"
#include "pmf/game.hpp"
#include "pmf/harness.hpp"
#include "pmf/hull.hpp"
#include "pmf/io.hpp"
#include "pmf/rho.hpp"

namespace py = pybind11;
using namespace pmf;

namespace {

SignalDistVector to_delta(const GameSpec& g, const std::vector<double>& flat) {
  // A single P(S) component is replicated for outcome-only games.
  if (flat.size() == g.n_signals() && g.n_actions() > 1) {
    return SignalDistVector::replicated(g.n_actions(), flat);
  }
  return SignalDistVector(g.n_actions(), g.n_signals(), flat);
}

py::dict constants_dict(const GameConstants& c) {
  py::dict d;
  d["K_bound"] = c.K_bound;
  d["K_sampled"] = c.K_sampled;
  d["L_bound"] = c.L_bound;
  d["L_component"] = c.L_component ? py::object(py::float_(*c.L_component)) : py::none();
  d["lipschitz_lp_value"] = c.L_lp_value;
  d["C_bound"] = c.C_bound ? py::object(py::float_(*c.C_bound)) : py::none();
  d["C_magnitude"] = c.C_magnitude ? py::object(py::float_(*c.C_magnitude)) : py::none();
  d["C_l1"] = c.C_l1 ? py::object(py::float_(*c.C_l1)) : py::none();
  return d;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

ForecasterOverrides overrides(std::optional<double> eta, std::optional<std::size_t> block,
                              std::optional<double> gamma) {
  return ForecasterOverrides{eta, block, gamma};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Partial-monitoring forecasting core";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InfeasibleSignalError>(m, "InfeasibleSignalError", PyExc_ValueError);

  py::class_<GameSpec>(m, "Game")
      .def_property_readonly("name", &GameSpec::name)
      .def_property_readonly("n_actions", &GameSpec::n_actions)
      .def_property_readonly("n_outcomes", &GameSpec::n_outcomes)
      .def_property_readonly("signals", &GameSpec::signals)
      .def_property_readonly("deterministic",
                             [](const GameSpec& g) { return g.feedback().is_deterministic(); })
      .def_property_readonly("outcome_only",
                             [](const GameSpec& g) { return g.feedback().is_outcome_only(); })
      .def("reward", py::overload_cast<std::size_t, std::size_t>(&GameSpec::reward, py::const_));

  m.def("parse_game", &parse_game, py::arg("text"));
  m.def("load_game", &load_game, py::arg("path"));
  m.def(
      "signal_dist",
      [](const GameSpec& g, const std::vector<double>& q) {
        const auto f = signal_dist(g, OutcomeDistribution(q)).flat();
        return std::vector<double>(f.begin(), f.end());
      },
      py::arg("game"), py::arg("q"));
  m.def(
      "is_feasible",
      [](const GameSpec& g, const std::vector<double>& d) { return is_feasible(g, to_delta(g, d)); },
      py::arg("game"), py::arg("delta"));
  m.def(
      "rho",
      [](const GameSpec& g, const std::vector<double>& p, const std::vector<double>& d) {
        return rho(g, MixedAction(p), to_delta(g, d));
      },
      py::arg("game"), py::arg("p"), py::arg("delta"));
  m.def(
      "rho_subgradient",
      [](const GameSpec& g, const std::vector<double>& p, const std::vector<double>& d) {
        return rho_subgradient(g, MixedAction(p), to_delta(g, d)).direction;
      },
      py::arg("game"), py::arg("p"), py::arg("delta"));
  m.def(
      "max_rho",
      [](const GameSpec& g, const std::vector<double>& d) {
        const MaxRho r = max_rho(g, to_delta(g, d));
        return py::make_tuple(r.value, r.argmax.vector());
      },
      py::arg("game"), py::arg("delta"));
  m.def(
      "constants", [](const GameSpec& g) { return constants_dict(compute_constants(g)); },
      py::arg("game"));
  m.def(
      "project_hull",
      [](const std::vector<double>& x, const std::vector<std::vector<double>>& verts) {
        const HullProjection h = project_hull(x, verts);
        return py::make_tuple(h.point, h.distance);
      },
      py::arg("point"), py::arg("vertices"));

  m.def(
      "run_episode",
      [](const GameSpec& g, const std::string& variant, std::size_t n, std::uint64_t seed,
         const std::string& env, std::optional<double> eta, std::optional<std::size_t> block,
         std::optional<double> gamma, double delta) {
        const GameConstants c = compute_constants(g);
        const Variant v = parse_variant(variant);
        check_compatible(v, g);
        const ForecasterParams params =
            ForecasterParams::defaults(v, n, g, c, overrides(eta, block, gamma));
        const EnvironmentSpec spec =
            env.empty() ? EnvironmentSpec::iid(std::vector<double>(
                              g.n_outcomes(), 1.0 / static_cast<double>(g.n_outcomes())))
                        : EnvironmentSpec::parse(env);
        py::gil_scoped_release release;
        const Transcript tr = run_episode(g, c, params, spec, seed);
        const RegretReport rep = regret(g, tr, &c, delta);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["actions"] = tr.actions;
        d["outcomes"] = tr.outcomes;
        d["signals"] = tr.signals;
        d["rewards"] = tr.rewards;
        d["updates"] = tr.updates;
        d["regret"] = json_to_py(to_json(rep));
        d["params"] = json_to_py(to_json(params));
        return d;
      },
      py::arg("game"), py::arg("variant"), py::arg("n"), py::arg("seed") = 1,
      py::arg("environment") = "", py::arg("eta") = py::none(), py::arg("block") = py::none(),
      py::arg("gamma") = py::none(), py::arg("delta") = 0.05);

  m.def(
      "rate_experiment",
      [](const GameSpec& g, const std::string& variant, const std::vector<std::size_t>& horizons,
         std::size_t seeds, const std::string& env, std::uint64_t base_seed) {
        RateOptions opt;
        opt.horizons = horizons;
        opt.seeds = seeds;
        opt.base_seed = base_seed;
        const EnvironmentSpec spec = EnvironmentSpec::parse(env);
        const GameConstants c = compute_constants(g);
        py::gil_scoped_release release;
        const RateReport r = rate_experiment(g, c, parse_variant(variant), spec, opt);
        py::gil_scoped_acquire acquire;
        return json_to_py(to_json(r));
      },
      py::arg("game"), py::arg("variant"), py::arg("horizons"), py::arg("seeds") = 20,
      py::arg("environment"), py::arg("base_seed") = 1);
}
