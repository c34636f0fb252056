#pragma once

// Outer optimization for both formulations plus a quantized exhaustive
// oracle for small instances.
//
// Eulerian: alternating descent (recovery flows for fixed capacities, then
// the minimal capacities for fixed flows) interleaved with path insertion,
// path removal and reroute moves, over several restarts.
// Lagrangian: coordinate descent on path weights over a path dictionary.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbot/energy.hpp"
#include "rbot/io.hpp"
#include "rbot/model.hpp"

namespace rbot {

enum class Model { eulerian, eulerian_oriented, lagrangian };

std::string model_name(Model m);
// Throws ParseError on an unknown name.
Model model_from_name(const std::string& name);

struct SolveOptions {
  Model model = Model::eulerian;
  int max_iters = 200;
  int restarts = 8;
  std::uint64_t seed = 0;
  int path_dictionary_size = 16;
  double delta = 0.125;  // mass quantum
  double tol = 1e-9;     // energy improvement threshold
};

struct SolveDiagnostics {
  int iterations = 0;  // of the best run
  int runs = 0;
  int best_run = 0;
  bool budget_exhausted = false;
  std::size_t dictionary_size = 0;     // lagrangian
  std::size_t contested_edges = 0;     // eulerian-oriented
  std::size_t oracle_candidates = 0;   // oracle
  std::size_t oracle_ties = 0;         // oracle
  std::optional<ValidationReport> validation;
};

struct SolveReport {
  SolveOptions options;
  bool oracle = false;
  std::optional<EulerianCompetitor> eulerian;
  std::optional<LagrangianCompetitor> lagrangian;
  EnergyBreakdown energy;
  std::vector<double> trace;
  AdmissibilityReport certificate;
  std::optional<bool> oriented_consistent;
  std::optional<double> oracle_gap;
  SolveDiagnostics diagnostics;
  double wall_seconds = 0.0;  // kept out of the JSON so reports are byte-stable
};

// theta_e = max_i |T_ie|
std::vector<double> theta_from_flows(std::span<const std::vector<double>> flows,
                                     std::size_t num_edges);

// Dispatches on opts.model.
SolveReport solve(const Instance& inst, const SolveOptions& opts);
SolveReport solve_eulerian(const Instance& inst, const SolveOptions& opts);
SolveReport solve_lagrangian(const Instance& inst, const SolveOptions& opts);

// Exhaustive search over delta-quantized competitors. Eulerian: at most 8
// edges; per scenario every superposition of simple source-to-target paths
// with quantized weights under the atom caps. Lagrangian: at most 8 simple
// source-to-target paths; every quantized sub-plan, with w_p = max_i w_ip.
// Throws SizeGuardError when a guard or the enumeration budget is exceeded.
SolveReport brute_force_oracle(const Instance& inst, const SolveOptions& opts);

inline constexpr std::size_t kOracleMaxEdges = 8;
inline constexpr std::size_t kOracleMaxPaths = 8;

// Sets report.oracle_gap = report energy - oracle energy.
void attach_oracle_gap(SolveReport& report, const SolveReport& oracle);

Json options_to_json(const SolveOptions& o);
Json report_to_json(const Instance& inst, const SolveReport& r);

// Simple source-to-target paths (u with nu(u) < 0, v with nu(v) > 0) over
// the edges accepted by `usable`, in DFS order from ascending sources.
// Throws SizeGuardError when more than `limit` paths exist.
std::vector<Path> enumerate_simple_paths(const Instance& inst, std::span<const char> usable,
                                         std::size_t limit);

// Up to k shortest simple paths from s to t over usable edges (Yen).
std::vector<Path> k_shortest_paths(const GeometricGraph& g, std::span<const char> usable,
                                   VertexId s, VertexId t, std::size_t k);

// Worker count for parallel restarts: ROT_THREADS if set and positive,
// otherwise the hardware concurrency.
unsigned worker_threads();

}  // namespace rbot
