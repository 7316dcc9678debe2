#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uavcov/harness.hpp"

namespace py = pybind11;
using namespace uavcov;

namespace {

Label label_of(char c) {
  if (c == 'R' || c == 'r') return Label::Red;
  if (c == 'B' || c == 'b') return Label::Blue;
  throw InvalidParameter(std::string("label must be 'R' or 'B', got '") + c + "'");
}

py::dict bounds_dict(const CoveringBounds& b) {
  py::dict d;
  d["lower"] = b.lower;
  d["upper"] = b.upper;
  d["lower_int"] = b.lower_int;
  d["upper_int"] = b.upper_int;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coverage-hole detection and aerial recovery core";

  // Later registrations are tried first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<CollisionFault>(m, "CollisionFault", PyExc_RuntimeError);

  m.def(
      "window_policy",
      [](const std::string& window) {
        std::vector<Label> w;
        for (char c : window) w.push_back(label_of(c));
        return to_string(window_policy(std::span<const Label>(w)).action);
      },
      py::arg("window"), "Action for a label window such as 'BRR'.");

  m.def(
      "covering_bounds",
      [](double width, double height, double radius) { return bounds_dict(covering_bounds({width, height}, radius)); },
      py::arg("width"), py::arg("height"), py::arg("radius"));

  m.def(
      "abs_count_bounds",
      [](double width, double height, double r1, double r2) {
        const FleetBounds f = abs_count_bounds({width, height}, r1, r2);
        return std::make_pair(f.min, f.max);
      },
      py::arg("width"), py::arg("height"), py::arg("r1"), py::arg("r2"));

  m.def(
      "generate_checkpoints",
      [](double width, double height, double density, double exclusion, std::uint64_t seed) {
        std::vector<std::pair<double, double>> out;
        for (const Checkpoint& c : generate_checkpoints({width, height}, density, exclusion, seed)) {
          out.emplace_back(c.position.x, c.position.y);
        }
        return out;
      },
      py::arg("width"), py::arg("height"), py::arg("density"), py::arg("exclusion"), py::arg("seed"),
      "Hard-core checkpoint positions; density in points per square metre.");

  m.def("nakagami_pdf", &nakagami_pdf, py::arg("x"), py::arg("m"), py::arg("omega"));
  m.def(
      "sample_power_gains",
      [](double m_, double omega, std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> out(n);
        for (double& g : out) g = sample_power_gain(m_, omega, rng);
        return out;
      },
      py::arg("m"), py::arg("omega"), py::arg("n"), py::arg("seed"));

  m.def(
      "expected_completion",
      [](double beta, double speed, double side, double lambda_cp, double mean_r, const std::string& mode) {
        DelayParams p{beta, speed, side, lambda_cp};
        return expected_completion(p, mean_r, parse_schedule_mode(mode));
      },
      py::arg("beta"), py::arg("speed"), py::arg("side"), py::arg("lambda_cp"), py::arg("mean_r"),
      py::arg("mode"));

  m.def(
      "normalize_config", [](const std::string& text) { return ScenarioConfig::from_json(text).to_json(); },
      py::arg("config_json"), "Validated config with every default filled in.");

  m.def(
      "coverage_radii",
      [](const std::string& text) {
        const ScenarioConfig c = ScenarioConfig::from_json(text);
        return std::make_pair(c.r1(), c.r2());
      },
      py::arg("config_json"));

  m.def(
      "scene_json",
      [](const std::string& text, std::uint64_t seed) {
        return build_scenario(ScenarioConfig::from_json(text), seed).to_json();
      },
      py::arg("config_json"), py::arg("seed"));

  m.def(
      "monte_carlo",
      [](const std::string& text, unsigned workers) {
        const ScenarioConfig c = ScenarioConfig::from_json(text);
        MonteCarloResult r;
        {
          py::gil_scoped_release release;
          r = monte_carlo(c, workers);
        }
        return std::make_pair(r.metrics_csv(), r.summary_json(c));
      },
      py::arg("config_json"), py::arg("workers") = 1, "Returns (metrics_csv, summary_json).");

  m.def(
      "swarm_case_csv",
      [](std::uint64_t seed, double duration, std::size_t sample_every) {
        const CaseStudy cs = make_case_study(seed);
        SimOptions o;
        o.duration = duration;
        o.sample_every = sample_every;
        TrajectoryLog log;
        {
          py::gil_scoped_release release;
          log = simulate(cs.agents, ControlParams{}, o);
        }
        return log.to_csv();
      },
      py::arg("seed"), py::arg("duration") = 600.0, py::arg("sample_every") = 100);
}
