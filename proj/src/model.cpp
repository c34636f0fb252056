#include "rbot/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rbot/energy.hpp"

namespace rbot {

GeometricGraph::GeometricGraph(int dimension, std::vector<Vertex> vertices,
                               std::vector<Edge> edges)
    : dimension_(dimension),
      vertices_(std::move(vertices)),
      edges_(std::move(edges)) {
  if (dimension_ <= 0) throw ValidationError("dimension", "must be positive");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& v = vertices_[i];
    const std::string field = "vertices[" + std::to_string(i) + "]";
    if (v.id != static_cast<VertexId>(i))
      throw ValidationError(field + ".id", "vertex ids must be contiguous from 0");
    if (v.pos.size() != static_cast<std::size_t>(dimension_))
      throw ValidationError(field + ".pos", "position has wrong dimension");
    for (double x : v.pos)
      if (!std::isfinite(x)) throw ValidationError(field + ".pos", "not finite");
  }
  incidence_.assign(vertices_.size(), {});
  const auto n = static_cast<VertexId>(vertices_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    const std::string field = "edges[" + std::to_string(i) + "]";
    if (e.id != static_cast<EdgeId>(i))
      throw ValidationError(field + ".id", "edge ids must be contiguous from 0");
    if (e.u < 0 || e.u >= n) throw ValidationError(field + ".u", "dangling vertex id");
    if (e.v < 0 || e.v >= n) throw ValidationError(field + ".v", "dangling vertex id");
    if (e.u == e.v) throw ValidationError(field, "self-loop");
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw ValidationError(field + ".length", "length must be positive");
    incidence_[e.u].push_back(e.id);
    incidence_[e.v].push_back(e.id);
  }
}

VertexId GeometricGraph::opposite(EdgeId e, VertexId v) const {
  const Edge& ed = edge(e);
  if (ed.u == v) return ed.v;
  if (ed.v == v) return ed.u;
  throw ValidationError("edge " + std::to_string(e),
                        "not incident to vertex " + std::to_string(v));
}

std::optional<EdgeId> GeometricGraph::edge_between(VertexId a, VertexId b) const {
  std::optional<EdgeId> best;
  if (a < 0 || a >= static_cast<VertexId>(num_vertices())) return best;
  for (EdgeId e : incident(a)) {
    const Edge& ed = edges_[e];
    if ((ed.u == a && ed.v == b) || (ed.u == b && ed.v == a)) {
      if (!best || ed.length < edges_[*best].length) best = e;
    }
  }
  return best;
}

double GeometricGraph::euclidean(VertexId a, VertexId b) const {
  const auto& p = vertex(a).pos;
  const auto& q = vertex(b).pos;
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
  return std::sqrt(s);
}

double BoundaryMeasure::source_total() const {
  double s = 0.0;
  for (double m : mass_) if (m < 0) s -= m;
  return s;
}

double BoundaryMeasure::target_total() const {
  double s = 0.0;
  for (double m : mass_) if (m > 0) s += m;
  return s;
}

std::vector<VertexId> BoundaryMeasure::source_vertices() const {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < mass_.size(); ++v)
    if (mass_[v] < 0) out.push_back(static_cast<VertexId>(v));
  return out;
}

std::vector<VertexId> BoundaryMeasure::target_vertices() const {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < mass_.size(); ++v)
    if (mass_[v] > 0) out.push_back(static_cast<VertexId>(v));
  return out;
}

CostSpec CostSpec::power(double alpha) {
  CostSpec c;
  c.kind = Kind::power;
  c.alpha = alpha;
  return c;
}

CostSpec CostSpec::bounded_step(double value) {
  CostSpec c;
  c.kind = Kind::bounded_step;
  c.value = value;
  return c;
}

CostSpec CostSpec::table(std::vector<std::pair<double, double>> points) {
  CostSpec c;
  c.kind = Kind::table;
  c.points = std::move(points);
  return c;
}

PayoffSpec PayoffSpec::constant(double h) {
  PayoffSpec p;
  p.kind = Kind::constant;
  p.value = h;
  return p;
}

PayoffSpec PayoffSpec::table(std::vector<std::vector<double>> values) {
  PayoffSpec p;
  p.kind = Kind::table;
  p.values = std::move(values);
  return p;
}

double PayoffSpec::at(std::size_t scenario, VertexId v) const {
  if (kind == Kind::constant) return value;
  return values.at(scenario).at(static_cast<std::size_t>(v));
}

double PayoffSpec::sup() const {
  if (kind == Kind::constant) return value;
  double s = 0.0;
  for (const auto& row : values)
    for (double x : row) s = std::max(s, x);
  return s;
}

bool has_efficiency(const DamageScenario& s) {
  return s.vertex_efficiency || s.edge_efficiency || s.edge_mask;
}

ScenarioEfficiency scenario_efficiency(const Instance& inst, std::size_t i) {
  const DamageScenario& s = inst.scenarios.at(i);
  const auto& g = inst.graph;
  ScenarioEfficiency eff;
  if (s.vertex_efficiency || s.edge_efficiency) {
    eff.vertex = s.vertex_efficiency.value_or(std::vector<double>(g.num_vertices(), 1.0));
    if (s.edge_efficiency) {
      eff.edge = *s.edge_efficiency;
    } else {
      eff.edge.resize(g.num_edges());
      for (const Edge& e : g.edges())
        eff.edge[e.id] = std::min(eff.vertex.at(e.u), eff.vertex.at(e.v));
    }
  } else if (s.edge_mask) {
    eff.vertex.assign(g.num_vertices(), 1.0);
    eff.edge.resize(g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e)
      eff.edge[e] = (*s.edge_mask).at(e) ? 1.0 : 0.0;
  } else {
    throw ValidationError("scenarios[" + std::to_string(i) + "]",
                          "missing efficiencies");
  }
  if (eff.vertex.size() != g.num_vertices() || eff.edge.size() != g.num_edges())
    throw ShapeError("scenario efficiency has wrong length");
  return eff;
}

bool Path::simple() const {
  std::vector<VertexId> sorted = vertices;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

double Path::length(const GeometricGraph& g) const {
  double L = 0.0;
  for (EdgeId e : edges) L += g.edge(e).length;
  return L;
}

Path make_path(const GeometricGraph& g, std::vector<VertexId> vertices) {
  if (vertices.size() < 2) throw ValidationError("path", "needs at least two vertices");
  std::vector<EdgeId> edges;
  edges.reserve(vertices.size() - 1);
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
    auto e = g.edge_between(vertices[k], vertices[k + 1]);
    if (!e)
      throw ValidationError("path", "vertices " + std::to_string(vertices[k]) +
                                        " and " + std::to_string(vertices[k + 1]) +
                                        " are not adjacent");
    edges.push_back(*e);
  }
  return Path{std::move(vertices), std::move(edges)};
}

Path make_path(const GeometricGraph& g, std::vector<VertexId> vertices,
               std::vector<EdgeId> edges) {
  if (vertices.size() < 2) throw ValidationError("path", "needs at least two vertices");
  if (edges.size() + 1 != vertices.size())
    throw ValidationError("path.edges", "expected one edge per consecutive pair");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k] < 0 || edges[k] >= static_cast<EdgeId>(g.num_edges()))
      throw ValidationError("path.edges", "unknown edge id " + std::to_string(edges[k]));
    const Edge& e = g.edge(edges[k]);
    const bool fwd = e.u == vertices[k] && e.v == vertices[k + 1];
    const bool bwd = e.v == vertices[k] && e.u == vertices[k + 1];
    if (!fwd && !bwd)
      throw ValidationError("path.edges", "edge " + std::to_string(edges[k]) +
                                              " does not join consecutive vertices");
  }
  return Path{std::move(vertices), std::move(edges)};
}

LagrangianCompetitor make_lagrangian_competitor(
    TrafficPlan plan, std::vector<std::vector<double>> subplans) {
  for (std::size_t i = 0; i < subplans.size(); ++i) {
    if (subplans[i].size() != plan.size())
      throw ShapeError("subplan " + std::to_string(i) + " has wrong length");
    for (std::size_t p = 0; p < plan.size(); ++p) {
      if (subplans[i][p] < 0.0)
        throw ValidationError("subplans", "negative sub-plan weight");
      if (subplans[i][p] > plan[p].weight + 1e-12)
        throw ValidationError("subplans", "sub-plan weight exceeds plan weight");
    }
  }
  LagrangianCompetitor out;
  out.subplans.assign(subplans.size(), {});
  for (std::size_t p = 0; p < plan.size(); ++p) {
    if (!(plan[p].weight > 0.0)) continue;
    for (std::size_t i = 0; i < subplans.size(); ++i)
      out.subplans[i].push_back(std::min(subplans[i][p], plan[p].weight));
    out.plan.push_back(std::move(plan[p]));
  }
  return out;
}

bool preceq(std::span<const double> m, std::span<const double> nu, double tol) {
  if (m.size() != nu.size()) throw ShapeError("preceq: measures differ in size");
  for (std::size_t v = 0; v < m.size(); ++v) {
    const double mp = std::max(m[v], 0.0), mn = std::max(-m[v], 0.0);
    const double np = std::max(nu[v], 0.0), nn = std::max(-nu[v], 0.0);
    if (mp > np + tol || mn > nn + tol) return false;
  }
  return true;
}

bool preceq(std::span<const double> m, const BoundaryMeasure& nu, double tol) {
  return preceq(m, nu.masses(), tol);
}

AdmissibilityReport check_eulerian_admissible(const Instance& inst,
                                              const EulerianCompetitor& c) {
  const auto& g = inst.graph;
  const std::size_t ne = g.num_edges();
  if (c.theta.size() != ne) throw ShapeError("theta has wrong length");
  if (c.flows.size() != inst.num_scenarios())
    throw ShapeError("expected one recovery flow per scenario");

  AdmissibilityReport rep;
  rep.scenarios.resize(c.flows.size());
  auto violate = [&](const std::string& what) {
    if (!rep.first_violation) rep.first_violation = what;
  };
  for (std::size_t e = 0; e < ne; ++e)
    if (c.theta[e] < 0.0) violate("theta[" + std::to_string(e) + "] negative");

  for (std::size_t i = 0; i < c.flows.size(); ++i) {
    const auto& T = c.flows[i];
    if (T.size() != ne) throw ShapeError("flow has wrong length");
    auto& s = rep.scenarios[i];
    const std::string tag = "scenario " + std::to_string(i);
    const auto& mask = inst.scenarios[i].edge_mask;
    for (std::size_t e = 0; e < ne; ++e) {
      if (std::abs(T[e]) > c.theta[e] + kMeasureTol) {
        if (s.capacity) violate(tag + ": capacity at edge " + std::to_string(e));
        s.capacity = false;
      }
      if (mask && !(*mask)[e] && std::abs(T[e]) > kSnapTol) {
        if (s.support) violate(tag + ": support at edge " + std::to_string(e));
        s.support = false;
      }
    }
    if (!preceq(boundary_of_flow(g, T), inst.boundary)) {
      s.boundary = false;
      violate(tag + ": boundary not dominated by nu");
    }
  }
  return rep;
}

AdmissibilityReport check_lagrangian_admissible(const Instance& inst,
                                                const LagrangianCompetitor& c) {
  const auto& g = inst.graph;
  if (c.subplans.size() != inst.num_scenarios())
    throw ShapeError("expected one sub-plan per scenario");
  for (const auto& wp : c.plan) {
    // Re-validates adjacency; throws on an invalid path.
    make_path(g, wp.path.vertices, wp.path.edges);
  }
  AdmissibilityReport rep;
  rep.scenarios.resize(c.subplans.size());
  auto violate = [&](const std::string& what) {
    if (!rep.first_violation) rep.first_violation = what;
  };
  for (std::size_t i = 0; i < c.subplans.size(); ++i) {
    const auto& w = c.subplans[i];
    if (w.size() != c.plan.size()) throw ShapeError("sub-plan has wrong length");
    auto& s = rep.scenarios[i];
    const std::string tag = "scenario " + std::to_string(i);
    NodeMeasure endpoint(g.num_vertices(), 0.0);
    for (std::size_t p = 0; p < c.plan.size(); ++p) {
      if (w[p] < 0.0 || w[p] > c.plan[p].weight + 1e-12) {
        if (s.subplan) violate(tag + ": sub-plan weight exceeds plan at path " + std::to_string(p));
        s.subplan = false;
      }
      endpoint[c.plan[p].path.end()] += w[p];
      endpoint[c.plan[p].path.start()] -= w[p];
    }
    if (!preceq(endpoint, inst.boundary)) {
      s.boundary = false;
      violate(tag + ": endpoint measure not dominated by nu");
    }
  }
  return rep;
}

bool check_oriented_consistency(const EulerianCompetitor& c) {
  const std::size_t ne = c.theta.size();
  for (std::size_t e = 0; e < ne; ++e) {
    int sign = 0;
    for (const auto& T : c.flows) {
      const int s = (T[e] > 0) - (T[e] < 0);
      if (s == 0) continue;
      if (sign != 0 && s != sign) return false;
      sign = s;
    }
  }
  return true;
}

namespace {

void check_unit_interval(const std::vector<double>& xs, const std::string& field,
                         std::vector<Finding>& out) {
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!(xs[k] >= 0.0 && xs[k] <= 1.0)) {
      out.push_back({field + "[" + std::to_string(k) + "]", "efficiency outside [0,1]"});
      return;
    }
  }
}

void check_cost(const CostSpec& cost, std::vector<Finding>& out) {
  switch (cost.kind) {
    case CostSpec::Kind::power:
      if (!(cost.alpha > 0.0 && cost.alpha < 1.0))
        out.push_back({"phi.alpha", "power exponent must lie in (0,1)"});
      break;
    case CostSpec::Kind::bounded_step:
      if (!(cost.value > 0.0)) out.push_back({"phi.value", "must be positive"});
      break;
    case CostSpec::Kind::table: {
      if (cost.points.empty()) {
        out.push_back({"phi.points", "table needs at least one breakpoint"});
        return;
      }
      double t0 = 0.0, f0 = 0.0;
      for (const auto& [t, f] : cost.points) {
        if (!(t > t0)) {
          out.push_back({"phi.points", "breakpoints must be strictly increasing and positive"});
          return;
        }
        if (!(f >= f0)) {
          out.push_back({"phi.points", "phi must be nondecreasing"});
          return;
        }
        t0 = t;
        f0 = f;
      }
      break;
    }
  }
  if (!out.empty() && out.back().field.rfind("phi", 0) == 0) return;
  // Subadditivity spot check on a fixed lattice of pairs.
  for (int a = 1; a <= 24; ++a) {
    for (int b = a; b <= 24; ++b) {
      const double s = std::ldexp(a, -3), t = std::ldexp(b, -3);
      if (phi_eval(cost, s + t) > phi_eval(cost, s) + phi_eval(cost, t) + 1e-12) {
        out.push_back({"phi", "not subadditive"});
        return;
      }
    }
  }
}

}  // namespace

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto& f = rep.findings;
  const auto& g = inst.graph;
  const std::size_t nv = g.num_vertices(), ne = g.num_edges();

  if (inst.boundary.size() != nv) {
    f.push_back({"boundary", "one mass per vertex expected"});
  } else {
    for (std::size_t v = 0; v < nv; ++v)
      if (!std::isfinite(inst.boundary.mass(static_cast<VertexId>(v))))
        f.push_back({"boundary", "mass not finite"});
    if (!(inst.boundary.total_variation() > 0.0))
      f.push_back({"boundary", "total variation must be positive"});
  }
  check_cost(inst.cost, f);

  if (inst.scenarios.empty()) f.push_back({"scenarios", "at least one scenario required"});
  double psum = inst.truncated_prob;
  if (!(inst.truncated_prob >= 0.0 && inst.truncated_prob < 1.0))
    f.push_back({"truncated_prob", "must lie in [0,1)"});
  for (std::size_t i = 0; i < inst.scenarios.size(); ++i) {
    const auto& s = inst.scenarios[i];
    const std::string field = "scenarios[" + std::to_string(i) + "]";
    if (!(s.prob > 0.0 && s.prob <= 1.0)) f.push_back({field + ".prob", "must lie in (0,1]"});
    psum += s.prob;
    if (s.edge_mask && s.edge_mask->size() != ne)
      f.push_back({field + ".edge_mask", "one entry per edge expected"});
    if (s.vertex_efficiency) {
      if (s.vertex_efficiency->size() != nv)
        f.push_back({field + ".vertex_efficiency", "one entry per vertex expected"});
      check_unit_interval(*s.vertex_efficiency, field + ".vertex_efficiency", f);
    }
    if (s.edge_efficiency) {
      if (s.edge_efficiency->size() != ne)
        f.push_back({field + ".edge_efficiency", "one entry per edge expected"});
      check_unit_interval(*s.edge_efficiency, field + ".edge_efficiency", f);
    }
  }
  if (std::abs(psum - 1.0) > 1e-9)
    f.push_back({"scenarios.prob", "probabilities must sum to 1 (got " + std::to_string(psum) + ")"});

  if (inst.payoff.kind == PayoffSpec::Kind::constant) {
    if (!(inst.payoff.value >= 0.0) || !std::isfinite(inst.payoff.value))
      f.push_back({"payoff.value", "must be finite and nonnegative"});
  } else {
    if (inst.payoff.values.size() != inst.scenarios.size())
      f.push_back({"payoff.values", "one row per scenario expected"});
    for (const auto& row : inst.payoff.values) {
      if (row.size() != nv) {
        f.push_back({"payoff.values", "one value per vertex expected"});
        break;
      }
      if (std::any_of(row.begin(), row.end(),
                      [](double x) { return !(x >= 0.0) || !std::isfinite(x); })) {
        f.push_back({"payoff.values", "values must be finite and nonnegative"});
        break;
      }
    }
  }

  rep.beta = inst.beta();
  rep.phi_bounded = !inst.cost.unbounded();
  double dist = std::numeric_limits<double>::infinity();
  if (inst.boundary.size() == nv) {
    for (VertexId s : inst.boundary.source_vertices())
      for (VertexId t : inst.boundary.target_vertices())
        dist = std::min(dist, g.euclidean(s, t));
  }
  rep.source_target_distance = std::isfinite(dist) ? dist : 0.0;
  rep.positive_distance = std::isfinite(dist) && dist > 0.0;
  return rep;
}

}  // namespace rbot
