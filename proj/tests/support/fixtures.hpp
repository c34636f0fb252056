#pragma once

// Hand-built oracle-sized instances and hand-rolled random generators shared
// by the unit, property and acceptance tests.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rbot/model.hpp"

namespace rbot::testing {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  // k / 2^bits for k in 1..2^bits
  double dyadic(int bits) { return (index(1 << bits) + 1) / static_cast<double>(1 << bits); }
};

struct EdgeSpec {
  int u, v;
  double length = -1.0;  // Euclidean when negative
};

struct ScenarioSpec {
  double prob;
  std::vector<bool> mask;
  std::optional<std::vector<double>> edge_efficiency;
  std::optional<std::vector<double>> vertex_efficiency;
};

Instance make_instance(std::vector<std::vector<double>> positions, const std::vector<EdgeSpec>& edges,
                       std::vector<double> nu, CostSpec cost, const std::vector<ScenarioSpec>& scenarios,
                       PayoffSpec payoff, double truncated = 0.0);

struct NamedInstance {
  std::string name;
  Instance inst;
};

// 20 instances with at most 8 edges, at most 2 scenarios, dyadic masses and
// edge masks on every scenario (some also carry fractional efficiencies for
// the Lagrangian side).
std::vector<NamedInstance> oracle_suite();

// Connected planar graph with 2..max_vertices vertices and at most
// max_edges edges, no parallel edges.
GeometricGraph random_graph(Rng& rng, int max_vertices, int max_edges);

// Superposition of random simple paths with dyadic weights, then cycle-free.
std::vector<double> random_acyclic_flow(Rng& rng, const GeometricGraph& g, int paths);

// Instance on g whose boundary measure dominates the boundary of `flow`,
// with 1..3 masked scenarios and a constant or tabulated pay-off.
Instance instance_dominating(Rng& rng, const GeometricGraph& g, const std::vector<double>& flow);

// Random instance: graph, sources/targets, masked scenarios with random
// efficiencies.
Instance random_instance(Rng& rng, int max_vertices, int max_edges);

// Random simple path from s to t over edges with usable[e] != 0, or nullopt.
std::optional<Path> random_simple_path(Rng& rng, const GeometricGraph& g, VertexId s, VertexId t,
                                       const std::vector<char>& usable);

// Admissible competitors built from random source-to-target paths with the
// atom budgets tracked.
EulerianCompetitor random_eulerian(Rng& rng, const Instance& inst);
LagrangianCompetitor random_lagrangian(Rng& rng, const Instance& inst);

}  // namespace rbot::testing
