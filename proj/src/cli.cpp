#include "rbot/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>

#include "rbot/energy.hpp"
#include "rbot/examples.hpp"
#include "rbot/io.hpp"
#include "rbot/solver.hpp"
#include "rbot/svg.hpp"

namespace rbot {

namespace fs = std::filesystem;

double parse_rational(const std::string& text) {
  auto parse_number = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ParseError("rational", "cannot parse '" + text + "'");
    }
    if (used != s.size() || !std::isfinite(x)) throw ParseError("rational", "cannot parse '" + text + "'");
    return x;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_number(text);
  const double p = parse_number(text.substr(0, slash));
  const double q = parse_number(text.substr(slash + 1));
  if (q == 0.0) throw ParseError("rational", "zero denominator in '" + text + "'");
  return p / q;
}

namespace {

struct Args {
  std::string instance, out, svg, report, competitor;
  std::string model = "eulerian";
  std::uint64_t seed = 0;
  int max_iters = 200;
  int restarts = 8;
  int dictionary = 16;
  std::string delta = "1/8";
  bool check_oracle = false;
  ExampleParams example;
  std::string epsilon = "1/8";
};

SolveOptions solve_options(const Args& a) {
  SolveOptions o;
  o.model = model_from_name(a.model);
  o.seed = a.seed;
  o.max_iters = a.max_iters;
  o.restarts = a.restarts;
  o.path_dictionary_size = a.dictionary;
  o.delta = parse_rational(a.delta);
  if (!(o.delta > 0.0)) throw ValidationError("delta", "must be positive");
  if (o.max_iters < 0) throw ValidationError("max-iters", "must be nonnegative");
  if (o.restarts < 0) throw ValidationError("restarts", "must be nonnegative");
  if (o.path_dictionary_size < 1) throw ValidationError("dictionary", "must be positive");
  return o;
}

// Inputs must exist and output directories must exist before any work starts.
void resolve_input(std::string& path, const char* flag) {
  if (path.empty()) return;
  const fs::path p = fs::absolute(path);
  if (!fs::is_regular_file(p)) throw ValidationError(flag, "no such file '" + path + "'");
  path = p.string();
}

void resolve_output(std::string& path, const char* flag) {
  if (path.empty()) return;
  const fs::path p = fs::absolute(path);
  if (!fs::is_directory(p.parent_path()))
    throw ValidationError(flag, "directory does not exist for '" + path + "'");
  path = p.string();
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    write_file_atomic(path, text);
}

Instance read_instance(const Args& a) {
  if (a.instance.empty()) throw ValidationError("instance", "--instance is required");
  return load_instance(read_file(a.instance));
}

std::string render_report(const Instance& inst, const Json& report) {
  const Json& comp = report.at("competitor");
  if (comp.is_null()) return render_svg(inst);
  if (comp.at("model") == "lagrangian")
    return render_svg(inst, lagrangian_competitor_from_json(inst.graph, comp));
  return render_svg(inst, eulerian_competitor_from_json(comp));
}

int cmd_solve(const Args& a, bool oracle, std::ostream& out, std::ostream& err) {
  const Instance inst = read_instance(a);
  const SolveOptions opts = solve_options(a);
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport r = oracle ? brute_force_oracle(inst, opts) : solve(inst, opts);
  if (!oracle && a.check_oracle) attach_oracle_gap(r, brute_force_oracle(inst, opts));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const Json j = report_to_json(inst, r);
  emit(a.out, dump(j), out);
  if (!a.svg.empty()) write_file_atomic(a.svg, render_report(inst, j));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", wall);
  err << (oracle ? "oracle" : "solve") << ": energy " << r.energy.energy << ", wall " << buf << " s\n";
  if (!r.certificate.admissible()) {
    err << "final competitor is not admissible: " << r.certificate.first_violation.value_or("") << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

int cmd_validate(const Args& a, std::ostream& out) {
  if (a.instance.empty()) throw ValidationError("instance", "--instance is required");
  // Parse without the validation that load_instance applies, so the full
  // finding list can be reported.
  Json j;
  try {
    j = Json::parse(read_file(a.instance));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("<root>", e.what());
  }
  ValidationReport rep;
  try {
    rep = validate_instance(instance_from_json(j));
  } catch (const ValidationError& e) {
    rep.findings.push_back({e.field(), e.what()});
  }
  Json doc;
  doc["format"] = kFormatVersion;
  doc["kind"] = "validate";
  doc["report"] = validation_to_json(rep);
  emit(a.out, dump(doc), out);
  return rep.ok() ? kExitOk : kExitUsage;
}

ExampleParams example_params(const Args& a) {
  ExampleParams p = a.example;
  p.epsilon = parse_rational(a.epsilon);
  return p;
}

int cmd_example(const Args& a, std::ostream& out) {
  const Instance inst = build_example(example_params(a));
  emit(a.out, serialize_instance(inst), out);
  if (!a.svg.empty()) write_file_atomic(a.svg, render_svg(inst));
  return kExitOk;
}

int cmd_verify(const Args& a, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const PhenomenonReport r = verify_phenomenon(example_params(a), solve_options(a));
  emit(a.out, dump(phenomenon_to_json(r)), out);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& c : r.checks)
    err << (c.ok ? "PASS " : "FAIL ") << c.name << ": " << c.message << '\n';
  err << "verify " << r.name << ": wall " << wall << " s\n";
  return r.ok() ? kExitOk : kExitInternal;
}

int cmd_energy(const Args& a, std::ostream& out) {
  const Instance inst = read_instance(a);
  if (a.competitor.empty()) throw ValidationError("competitor", "--competitor is required");
  Json cj;
  try {
    cj = Json::parse(read_file(a.competitor));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("<root>", e.what());
  }
  // A full solve report is accepted as well as a bare competitor.
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
    doc["oriented_consistent"] = check_oriented_consistency(c);
  }
  emit(a.out, dump(doc), out);
  return kExitOk;
}

int cmd_plot(const Args& a, std::ostream& out) {
  const Instance inst = read_instance(a);
  std::string svg;
  if (a.report.empty()) {
    svg = render_svg(inst);
  } else {
    Json j;
    try {
      j = Json::parse(read_file(a.report));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("<root>", e.what());
    }
    svg = render_report(inst, j);
  }
  emit(a.svg.empty() ? a.out : a.svg, svg, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Args a;
  CLI::App app{"Robust branched transport on geometric graphs"};
  app.require_subcommand(1);

  auto instance = [&](CLI::App* s) { s->add_option("--instance", a.instance, "Instance JSON"); };
  auto outputs = [&](CLI::App* s) {
    s->add_option("--out", a.out, "Output path (stdout when omitted)");
  };
  auto solver = [&](CLI::App* s) {
    s->add_option("--model", a.model, "eulerian, eulerian-oriented or lagrangian");
    s->add_option("--seed", a.seed, "Random seed");
    s->add_option("--max-iters", a.max_iters, "Iteration cap per run");
    s->add_option("--restarts", a.restarts, "Number of restarts");
    s->add_option("--delta", a.delta, "Mass quantum, e.g. 1/8");
    s->add_option("--dictionary", a.dictionary, "Lagrangian path dictionary size");
  };
  auto example = [&](CLI::App* s) {
    s->add_option("--name", a.example.name, "non_existence, distance, limit or non_continuous");
    s->add_option("--levels", a.example.levels, "Levels for distance");
    s->add_option("--loops", a.example.loops, "Loops for limit");
    s->add_option("--epsilon", a.epsilon, "Grid step 1/n for non_continuous");
    s->add_option("--beta", a.example.beta, "Exponent for non_continuous");
    s->add_option("--payoff", a.example.payoff, "Constant pay-off h");
    s->add_option("--detour", a.example.detour, "Extra detour length for non_existence");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "Optimize a competitor");
  instance(solve_cmd);
  outputs(solve_cmd);
  solver(solve_cmd);
  solve_cmd->add_option("--svg", a.svg, "Also render the result");
  solve_cmd->add_flag("--check-oracle", a.check_oracle, "Attach the gap to the exhaustive oracle");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Exhaustive search on small instances");
  instance(oracle_cmd);
  outputs(oracle_cmd);
  solver(oracle_cmd);
  oracle_cmd->add_option("--svg", a.svg, "Also render the result");

  CLI::App* validate_cmd = app.add_subcommand("validate", "Check instance invariants");
  instance(validate_cmd);
  outputs(validate_cmd);

  CLI::App* example_cmd = app.add_subcommand("example", "Build a counterexample instance");
  example(example_cmd);
  outputs(example_cmd);
  example_cmd->add_option("--svg", a.svg, "Also render the instance");

  CLI::App* verify_cmd = app.add_subcommand("verify", "Check a counterexample's behaviour");
  example(verify_cmd);
  solver(verify_cmd);
  outputs(verify_cmd);

  CLI::App* energy_cmd = app.add_subcommand("energy", "Evaluate a competitor");
  instance(energy_cmd);
  outputs(energy_cmd);
  energy_cmd->add_option("--competitor", a.competitor, "Competitor or solve report JSON");

  CLI::App* plot_cmd = app.add_subcommand("plot", "Render an instance or report as SVG");
  instance(plot_cmd);
  outputs(plot_cmd);
  plot_cmd->add_option("--report", a.report, "Solve report JSON");
  plot_cmd->add_option("--svg", a.svg, "SVG output path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    resolve_input(a.instance, "instance");
    resolve_input(a.report, "report");
    resolve_input(a.competitor, "competitor");
    resolve_output(a.out, "out");
    resolve_output(a.svg, "svg");
    if (*solve_cmd) return cmd_solve(a, false, out, err);
    if (*oracle_cmd) return cmd_solve(a, true, out, err);
    if (*validate_cmd) return cmd_validate(a, out);
    if (*example_cmd) return cmd_example(a, out);
    if (*verify_cmd) return cmd_verify(a, out, err);
    if (*energy_cmd) return cmd_energy(a, out);
    if (*plot_cmd) return cmd_plot(a, out);
    return kExitUsage;
  } catch (const SizeGuardError& e) {
    err << "size guard: " << e.what() << '\n';
    return kExitSizeGuard;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace rbot
