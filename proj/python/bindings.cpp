#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "rbot/energy.hpp"
#include "rbot/examples.hpp"
#include "rbot/io.hpp"
#include "rbot/solver.hpp"
#include "rbot/svg.hpp"

namespace py = pybind11;
using namespace rbot;

namespace {

// Everything crosses the boundary as JSON text so the Python side sees the
// same documents the CLI writes.

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("<root>", e.what());
  }
}

SolveOptions make_options(const std::string& model, std::uint64_t seed, int restarts, int max_iters,
                          double delta, int dictionary) {
  SolveOptions o;
  o.model = model_from_name(model);
  o.seed = seed;
  o.restarts = restarts;
  o.max_iters = max_iters;
  o.delta = delta;
  o.path_dictionary_size = dictionary;
  if (!(o.delta > 0.0)) throw ValidationError("delta", "must be positive");
  if (o.restarts < 0) throw ValidationError("restarts", "must be nonnegative");
  if (o.max_iters < 0) throw ValidationError("max_iters", "must be nonnegative");
  if (o.path_dictionary_size < 1) throw ValidationError("dictionary", "must be positive");
  return o;
}

ExampleParams make_params(const std::string& name, int levels, double epsilon, double beta, int loops,
                          std::optional<double> payoff, double detour) {
  ExampleParams p;
  p.name = name;
  p.levels = levels;
  p.epsilon = epsilon;
  p.beta = beta;
  p.loops = loops;
  p.payoff = payoff;
  p.detour = detour;
  return p;
}

std::string solve_json(const std::string& instance, const std::string& model, std::uint64_t seed, int restarts,
                       int max_iters, double delta, int dictionary, bool check_oracle) {
  const Instance inst = load_instance(instance);
  const SolveOptions o = make_options(model, seed, restarts, max_iters, delta, dictionary);
  SolveReport r;
  {
    py::gil_scoped_release release;
    r = solve(inst, o);
    if (check_oracle) attach_oracle_gap(r, brute_force_oracle(inst, o));
  }
  return dump(report_to_json(inst, r));
}

std::string oracle_json(const std::string& instance, const std::string& model, double delta) {
  const Instance inst = load_instance(instance);
  SolveOptions o = make_options(model, 0, 0, 0, delta, 16);
  SolveReport r;
  {
    py::gil_scoped_release release;
    r = brute_force_oracle(inst, o);
  }
  return dump(report_to_json(inst, r));
}

std::string validate_json(const std::string& instance) {
  ValidationReport rep;
  try {
    rep = validate_instance(instance_from_json(parse_json(instance)));
  } catch (const ValidationError& e) {
    rep.findings.push_back({e.field(), e.what()});
  }
  return dump(validation_to_json(rep));
}

std::string energy_json(const std::string& instance, const std::string& competitor) {
  const Instance inst = load_instance(instance);
  Json cj = parse_json(competitor);
  if (cj.contains("competitor")) cj = cj.at("competitor");
  if (!cj.is_object() || !cj.contains("model")) throw ParseError("model", "missing competitor model");
  Json doc;
  doc["format"] = kFormatVersion;
  doc["kind"] = "energy";
  if (cj.at("model") == "lagrangian") {
    const LagrangianCompetitor c = lagrangian_competitor_from_json(inst.graph, cj);
    doc["model"] = "lagrangian";
    doc["energy"] = energy_to_json(lagrangian_energy(inst, c));
    doc["certificate"] = admissibility_to_json(check_lagrangian_admissible(inst, c));
  } else {
    const EulerianCompetitor c = eulerian_competitor_from_json(cj);
    doc["model"] = "eulerian";
    doc["energy"] = energy_to_json(eulerian_energy(inst, c));
    doc["certificate"] = admissibility_to_json(check_eulerian_admissible(inst, c));
  }
  return dump(doc);
}

std::string svg_text(const std::string& instance, const std::optional<std::string>& report) {
  const Instance inst = load_instance(instance);
  if (!report) return render_svg(inst);
  Json j = parse_json(*report);
  const Json comp = j.contains("competitor") ? j.at("competitor") : j;
  if (comp.is_null()) return render_svg(inst);
  if (comp.at("model") == "lagrangian") return render_svg(inst, lagrangian_competitor_from_json(inst.graph, comp));
  return render_svg(inst, eulerian_competitor_from_json(comp));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust branched transport on geometric graphs";

  // Translators run newest first, so the base class is registered first.
  auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<SizeGuardError>(m, "SizeGuardError", error.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());

  m.def("load_instance", [](const std::string& text) { return serialize_instance(load_instance(text)); },
        py::arg("text"), "Parse and validate an instance; returns its canonical JSON.");
  m.def("validate", &validate_json, py::arg("instance"), "Validation report JSON; never raises on findings.");
  m.def("solve", &solve_json, py::arg("instance"), py::arg("model") = "eulerian", py::arg("seed") = 0,
        py::arg("restarts") = 8, py::arg("max_iters") = 200, py::arg("delta") = 0.125, py::arg("dictionary") = 16,
        py::arg("check_oracle") = false);
  m.def("oracle", &oracle_json, py::arg("instance"), py::arg("model") = "eulerian", py::arg("delta") = 0.125);
  m.def("energy", &energy_json, py::arg("instance"), py::arg("competitor"),
        "Evaluate a competitor (or the competitor of a solve report).");
  m.def(
      "build_example",
      [](const std::string& name, int levels, double epsilon, double beta, int loops, std::optional<double> payoff,
         double detour) {
        return serialize_instance(build_example(make_params(name, levels, epsilon, beta, loops, payoff, detour)));
      },
      py::arg("name"), py::arg("levels") = 3, py::arg("epsilon") = 0.125, py::arg("beta") = 1.0, py::arg("loops") = 4,
      py::arg("payoff") = py::none(), py::arg("detour") = 0.25);
  m.def(
      "verify",
      [](const std::string& name, int levels, double epsilon, double beta, int loops, std::optional<double> payoff,
         double detour, std::uint64_t seed, int restarts) {
        const ExampleParams p = make_params(name, levels, epsilon, beta, loops, payoff, detour);
        const SolveOptions o = make_options("eulerian", seed, restarts, 200, 0.125, 16);
        PhenomenonReport r;
        {
          py::gil_scoped_release release;
          r = verify_phenomenon(p, o);
        }
        return dump(phenomenon_to_json(r));
      },
      py::arg("name"), py::arg("levels") = 3, py::arg("epsilon") = 0.125, py::arg("beta") = 1.0, py::arg("loops") = 4,
      py::arg("payoff") = py::none(), py::arg("detour") = 0.25, py::arg("seed") = 0, py::arg("restarts") = 8);
  m.def("render_svg", &svg_text, py::arg("instance"), py::arg("report") = py::none());
}
