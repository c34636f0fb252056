#pragma once

// Domain types for robust branched transport on geometric graphs.
//
// A problem instance is a graph embedded in R^n with edge lengths, a signed
// boundary measure on its vertices (negative atoms are sources, positive
// atoms are targets), a subadditive construction cost, a finite list of
// damage scenarios with probabilities, and a pay-off per unit of transported
// mass. Two kinds of competitors live on top of it: Eulerian (edge capacities
// plus one signed recovery flow per scenario) and Lagrangian (a weighted
// collection of paths plus one sub-plan per scenario).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rbot/errors.hpp"

namespace rbot {

using VertexId = int;
using EdgeId = int;

// Absolute tolerance for measure comparisons and capacity checks.
inline constexpr double kMeasureTol = 1e-9;
// Values below this are snapped to zero after subtractions.
inline constexpr double kSnapTol = 1e-12;

struct Vertex {
  VertexId id = 0;
  std::vector<double> pos;
};

struct Edge {
  EdgeId id = 0;
  VertexId u = 0;
  VertexId v = 0;
  double length = 0.0;
};

class GeometricGraph {
 public:
  GeometricGraph() = default;
  // Throws ValidationError on non-contiguous ids, dangling endpoints,
  // self-loops, non-positive lengths or positions of the wrong dimension.
  GeometricGraph(int dimension, std::vector<Vertex> vertices,
                 std::vector<Edge> edges);

  int dimension() const noexcept { return dimension_; }
  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  std::span<const Vertex> vertices() const noexcept { return vertices_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Vertex& vertex(VertexId v) const { return vertices_.at(v); }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }

  // Edge ids incident to v, ascending.
  const std::vector<EdgeId>& incident(VertexId v) const {
    return incidence_.at(v);
  }
  VertexId opposite(EdgeId e, VertexId v) const;
  // Shortest edge joining a and b (smallest id on ties).
  std::optional<EdgeId> edge_between(VertexId a, VertexId b) const;
  double euclidean(VertexId a, VertexId b) const;

 private:
  int dimension_ = 0;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incidence_;
};

// Signed mass per vertex.
using NodeMeasure = std::vector<double>;

class BoundaryMeasure {
 public:
  BoundaryMeasure() = default;
  explicit BoundaryMeasure(std::vector<double> mass) : mass_(std::move(mass)) {}

  std::size_t size() const noexcept { return mass_.size(); }
  double mass(VertexId v) const { return mass_.at(v); }
  std::span<const double> masses() const noexcept { return mass_; }

  // Jordan parts at a vertex.
  double sources(VertexId v) const { return mass_.at(v) < 0 ? -mass_[v] : 0.0; }
  double targets(VertexId v) const { return mass_.at(v) > 0 ? mass_[v] : 0.0; }

  double source_total() const;
  double target_total() const;
  double total_variation() const { return source_total() + target_total(); }

  std::vector<VertexId> source_vertices() const;
  std::vector<VertexId> target_vertices() const;

 private:
  std::vector<double> mass_;
};

struct CostSpec {
  enum class Kind { power, bounded_step, table };

  Kind kind = Kind::power;
  double alpha = 0.5;   // power
  double value = 1.0;   // bounded_step
  // table: breakpoints (t, phi(t)) with t strictly increasing and positive;
  // phi is linear between (0,0) and the breakpoints, constant afterwards.
  std::vector<std::pair<double, double>> points;

  static CostSpec power(double alpha);
  static CostSpec bounded_step(double value);
  static CostSpec table(std::vector<std::pair<double, double>> points);

  // lim_{t->inf} phi(t) = +inf
  bool unbounded() const noexcept { return kind == Kind::power; }
};

struct DamageScenario {
  int id = 0;
  double prob = 1.0;
  // true = usable. Characteristic damage for the Eulerian model.
  std::optional<std::vector<bool>> edge_mask;
  // General damage for the Lagrangian model, values in [0,1].
  std::optional<std::vector<double>> vertex_efficiency;
  std::optional<std::vector<double>> edge_efficiency;
};

struct PayoffSpec {
  enum class Kind { constant, table };

  Kind kind = Kind::constant;
  double value = 0.0;
  std::vector<std::vector<double>> values;  // [scenario][vertex]

  static PayoffSpec constant(double h);
  static PayoffSpec table(std::vector<std::vector<double>> values);

  double at(std::size_t scenario, VertexId v) const;
  double sup() const;
};

struct Instance {
  GeometricGraph graph;
  BoundaryMeasure boundary;
  CostSpec cost;
  std::vector<DamageScenario> scenarios;
  PayoffSpec payoff;
  // Probability of damages left out of a truncated countable family. Those
  // damages contribute no pay-off. Zero for ordinary instances.
  double truncated_prob = 0.0;

  std::size_t num_scenarios() const noexcept { return scenarios.size(); }
  // Upper bound on the load of any admissible cycle-free recovery flow.
  double beta() const { return boundary.total_variation() / 2.0; }
};

// Per-vertex and per-edge efficiency of one scenario. A mask is translated
// to 0/1 edge efficiencies with every vertex at 1; missing edge efficiencies
// default to the minimum of the endpoint efficiencies.
struct ScenarioEfficiency {
  std::vector<double> vertex;
  std::vector<double> edge;
};
ScenarioEfficiency scenario_efficiency(const Instance& inst, std::size_t i);
bool has_efficiency(const DamageScenario& s);

struct EulerianCompetitor {
  std::vector<double> theta;               // per edge, >= 0
  std::vector<std::vector<double>> flows;  // [scenario][edge], signed
};

struct Path {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;  // edges[k] joins vertices[k] and vertices[k+1]

  VertexId start() const { return vertices.front(); }
  VertexId end() const { return vertices.back(); }
  bool simple() const;
  double length(const GeometricGraph& g) const;
  bool operator==(const Path&) const = default;
};

// Resolve consecutive vertex pairs to edges (shortest joining edge).
// Throws ValidationError if a pair is not adjacent or fewer than 2 vertices.
Path make_path(const GeometricGraph& g, std::vector<VertexId> vertices);
// Validate an explicit edge sequence against the vertex sequence.
Path make_path(const GeometricGraph& g, std::vector<VertexId> vertices,
               std::vector<EdgeId> edges);

struct WeightedPath {
  Path path;
  double weight = 0.0;
};

using TrafficPlan = std::vector<WeightedPath>;

struct LagrangianCompetitor {
  TrafficPlan plan;
  std::vector<std::vector<double>> subplans;  // [scenario][path index]
};

// Enforces w_{i,p} <= w_p (within 1e-12) and drops zero-weight paths.
LagrangianCompetitor make_lagrangian_competitor(
    TrafficPlan plan, std::vector<std::vector<double>> subplans);

// mu ⪯ nu: positive and negative Jordan parts dominated vertex-wise.
bool preceq(std::span<const double> m, const BoundaryMeasure& nu,
            double tol = kMeasureTol);
bool preceq(std::span<const double> m, std::span<const double> nu,
            double tol = kMeasureTol);

struct ScenarioAdmissibility {
  bool capacity = true;  // Eulerian: |T_ie| <= theta_e
  bool support = true;   // Eulerian: no flow on masked edges
  bool subplan = true;   // Lagrangian: w_ip <= w_p
  bool boundary = true;  // boundary ⪯ nu

  bool ok() const { return capacity && support && subplan && boundary; }
};

struct AdmissibilityReport {
  std::vector<ScenarioAdmissibility> scenarios;
  std::optional<std::string> first_violation;

  bool admissible() const { return !first_violation.has_value(); }
};

AdmissibilityReport check_eulerian_admissible(const Instance& inst,
                                              const EulerianCompetitor& c);
AdmissibilityReport check_lagrangian_admissible(const Instance& inst,
                                                const LagrangianCompetitor& c);
// All nonzero recovery flows on an edge share one sign.
bool check_oriented_consistency(const EulerianCompetitor& c);

struct Finding {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;  // empty when every invariant holds
  double beta = 0.0;
  double source_target_distance = 0.0;
  bool positive_distance = false;
  bool phi_bounded = false;

  bool ok() const { return findings.empty(); }
  // Both hypotheses the Lagrangian existence result relies on.
  bool lagrangian_hypotheses() const { return positive_distance && !phi_bounded; }
};

ValidationReport validate_instance(const Instance& inst);

}  // namespace rbot
