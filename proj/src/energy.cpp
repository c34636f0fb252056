#include "rbot/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbot {

double phi_eval(const CostSpec& cost, double t) {
  if (t < 0.0 || std::isnan(t)) throw std::domain_error("phi_eval: negative argument");
  if (t == 0.0) return 0.0;
  switch (cost.kind) {
    case CostSpec::Kind::power:
      return std::pow(t, cost.alpha);
    case CostSpec::Kind::bounded_step:
      return cost.value;
    case CostSpec::Kind::table: {
      double t0 = 0.0, f0 = 0.0;
      for (const auto& [t1, f1] : cost.points) {
        if (t <= t1) return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
        t0 = t1;
        f0 = f1;
      }
      return f0;
    }
  }
  return 0.0;
}

double phi_mass_eulerian(const GeometricGraph& g, const CostSpec& cost,
                         std::span<const double> theta) {
  if (theta.size() != g.num_edges()) throw ShapeError("theta has wrong length");
  double m = 0.0;
  for (const Edge& e : g.edges()) m += e.length * phi_eval(cost, theta[e.id]);
  return m;
}

NodeMeasure boundary_of_flow(const GeometricGraph& g, std::span<const double> flow) {
  if (flow.size() != g.num_edges()) throw ShapeError("flow has wrong length");
  NodeMeasure d(g.num_vertices(), 0.0);
  for (const Edge& e : g.edges()) {
    d[e.v] += flow[e.id];
    d[e.u] -= flow[e.id];
  }
  return d;
}

EnergyBreakdown eulerian_energy(const Instance& inst, const EulerianCompetitor& c) {
  const auto& g = inst.graph;
  if (c.flows.size() != inst.num_scenarios())
    throw ShapeError("expected one recovery flow per scenario");
  EnergyBreakdown out;
  out.phi_mass = phi_mass_eulerian(g, inst.cost, c.theta);
  out.payoff_per_scenario.reserve(c.flows.size());
  for (std::size_t i = 0; i < c.flows.size(); ++i) {
    const NodeMeasure d = boundary_of_flow(g, c.flows[i]);
    double s = 0.0;
    for (std::size_t v = 0; v < d.size(); ++v)
      s += inst.payoff.at(i, static_cast<VertexId>(v)) * std::abs(d[v]);
    out.payoff_per_scenario.push_back(inst.scenarios[i].prob * s);
  }
  for (double p : out.payoff_per_scenario) out.payoff_total += p;
  out.energy = out.phi_mass - out.payoff_total;
  return out;
}

namespace {

// Edges of p, each listed once.
std::vector<EdgeId> distinct_edges(const Path& p) {
  std::vector<EdgeId> es = p.edges;
  std::sort(es.begin(), es.end());
  es.erase(std::unique(es.begin(), es.end()), es.end());
  return es;
}

}  // namespace

double multiplicity(const GeometricGraph& g, const TrafficPlan& plan, EdgeId e) {
  if (e < 0 || e >= static_cast<EdgeId>(g.num_edges()))
    throw ValidationError("edge", "unknown edge id " + std::to_string(e));
  double m = 0.0;
  for (const auto& wp : plan)
    if (std::find(wp.path.edges.begin(), wp.path.edges.end(), e) != wp.path.edges.end())
      m += wp.weight;
  return m;
}

std::vector<double> multiplicities(const GeometricGraph& g, const TrafficPlan& plan) {
  std::vector<double> m(g.num_edges(), 0.0);
  for (const auto& wp : plan)
    for (EdgeId e : distinct_edges(wp.path)) m.at(e) += wp.weight;
  return m;
}

double phi_mass_traffic(const GeometricGraph& g, const CostSpec& cost,
                        const TrafficPlan& plan) {
  const std::vector<double> theta = multiplicities(g, plan);
  // Traversal-weighted load: sum_p w_p * (number of times p crosses e).
  std::vector<double> load(g.num_edges(), 0.0);
  std::vector<int> count(g.num_edges(), 0);
  for (const auto& wp : plan) {
    for (EdgeId e : wp.path.edges) ++count[e];
    for (EdgeId e : distinct_edges(wp.path)) {
      // Repeated additions keep load == theta bit for bit on loop-free paths.
      for (int k = 0; k < count[e]; ++k) load[e] += wp.weight;
      count[e] = 0;
    }
  }
  double m = 0.0;
  for (const Edge& e : g.edges()) {
    const double th = theta[e.id];
    if (th == 0.0) continue;  // 0/0 = 0
    const double f = phi_eval(cost, th);
    m += load[e.id] == th ? e.length * f : e.length * f * (load[e.id] / th);
  }
  return m;
}

double path_efficiency(const ScenarioEfficiency& eff, const Path& p) {
  double m = 1.0;
  for (VertexId v : p.vertices) m = std::min(m, eff.vertex.at(v));
  for (EdgeId e : p.edges) m = std::min(m, eff.edge.at(e));
  return m;
}

std::vector<WeightedPath> penalized_plan(const Instance& inst, const TrafficPlan& plan,
                                         std::span<const double> subplan,
                                         std::size_t scenario) {
  if (subplan.size() != plan.size()) throw ShapeError("sub-plan has wrong length");
  const ScenarioEfficiency eff = scenario_efficiency(inst, scenario);
  std::vector<WeightedPath> out;
  out.reserve(plan.size());
  for (std::size_t p = 0; p < plan.size(); ++p)
    out.push_back({plan[p].path, subplan[p] * path_efficiency(eff, plan[p].path)});
  return out;
}

EnergyBreakdown lagrangian_energy(const Instance& inst, const LagrangianCompetitor& c) {
  if (c.subplans.size() != inst.num_scenarios())
    throw ShapeError("expected one sub-plan per scenario");
  EnergyBreakdown out;
  out.phi_mass = phi_mass_traffic(inst.graph, inst.cost, c.plan);
  for (std::size_t i = 0; i < c.subplans.size(); ++i) {
    const auto pen = penalized_plan(inst, c.plan, c.subplans[i], i);
    double s = 0.0;
    for (const auto& wp : pen)
      s += wp.weight * (inst.payoff.at(i, wp.path.start()) + inst.payoff.at(i, wp.path.end()));
    out.payoff_per_scenario.push_back(inst.scenarios[i].prob * s);
  }
  for (double p : out.payoff_per_scenario) out.payoff_total += p;
  out.energy = out.phi_mass - out.payoff_total;
  return out;
}

}  // namespace rbot
