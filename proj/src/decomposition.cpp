#include "rbot/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "rbot/energy.hpp"

namespace rbot {

namespace {

int direction(const Edge& e, VertexId from) { return e.u == from ? +1 : -1; }

// Edge leaving `v` in the support digraph, smallest id first.
bool leaves(const GeometricGraph& g, std::span<const double> flow, EdgeId e, VertexId v) {
  const Edge& ed = g.edge(e);
  return (ed.u == v && flow[e] > 0.0) || (ed.v == v && flow[e] < 0.0);
}

// Directed cycle in the support as a list of (edge, traversal sign), or none.
std::optional<std::vector<std::pair<EdgeId, int>>> find_cycle(const GeometricGraph& g,
                                                              std::span<const double> flow) {
  const std::size_t n = g.num_vertices();
  enum : char { white, gray, black };
  std::vector<char> color(n, white);
  std::vector<EdgeId> parent_edge(n, -1);
  std::vector<std::size_t> next(n, 0);

  for (VertexId root = 0; root < static_cast<VertexId>(n); ++root) {
    if (color[root] != white) continue;
    std::vector<VertexId> stack{root};
    color[root] = gray;
    while (!stack.empty()) {
      const VertexId v = stack.back();
      const auto& inc = g.incident(v);
      if (next[v] == inc.size()) {
        color[v] = black;
        stack.pop_back();
        continue;
      }
      const EdgeId e = inc[next[v]++];
      if (!leaves(g, flow, e, v)) continue;
      const VertexId w = g.opposite(e, v);
      if (color[w] == gray) {
        std::vector<std::pair<EdgeId, int>> cycle{{e, direction(g.edge(e), v)}};
        for (VertexId x = v; x != w;) {
          const EdgeId pe = parent_edge[x];
          const VertexId px = g.opposite(pe, x);
          cycle.emplace_back(pe, direction(g.edge(pe), px));
          x = px;
        }
        return cycle;
      }
      if (color[w] == white) {
        color[w] = gray;
        parent_edge[w] = e;
        stack.push_back(w);
      }
    }
  }
  return std::nullopt;
}

void snap(double& x) {
  if (std::abs(x) < kSnapTol) x = 0.0;
}

}  // namespace

std::vector<double> remove_cycles(const GeometricGraph& g, std::span<const double> flow) {
  if (flow.size() != g.num_edges()) throw ShapeError("flow has wrong length");
  std::vector<double> T(flow.begin(), flow.end());
  for (double& x : T) snap(x);
  while (auto cycle = find_cycle(g, T)) {
    double bottleneck = std::abs(T[cycle->front().first]);
    for (const auto& [e, s] : *cycle) bottleneck = std::min(bottleneck, std::abs(T[e]));
    for (const auto& [e, s] : *cycle) {
      T[e] -= s * bottleneck;
      snap(T[e]);
    }
  }
  return T;
}

bool is_acyclic(const GeometricGraph& g, std::span<const double> flow) {
  return !find_cycle(g, flow).has_value();
}

PathDecomposition good_decomposition(const GeometricGraph& g, std::span<const double> flow,
                                     const BoundaryMeasure* strict_nu) {
  if (flow.size() != g.num_edges()) throw ShapeError("flow has wrong length");
  const NodeMeasure d = boundary_of_flow(g, flow);
  if (strict_nu) {
    for (std::size_t v = 0; v < d.size(); ++v)
      if (strict_nu->mass(static_cast<VertexId>(v)) == 0.0 && std::abs(d[v]) > kMeasureTol)
        throw ValidationError("flow", "nonzero divergence at vertex " + std::to_string(v) +
                                          " outside supp(nu)");
  }
  std::vector<double> T(flow.begin(), flow.end());
  for (double& x : T) snap(x);
  // Remaining excess at sources (d < 0) and deficit at targets (d > 0).
  std::vector<double> excess(d.size()), deficit(d.size());
  for (std::size_t v = 0; v < d.size(); ++v) {
    excess[v] = std::max(-d[v], 0.0);
    deficit[v] = std::max(d[v], 0.0);
  }

  PathDecomposition out;
  const std::size_t n = g.num_vertices();
  for (VertexId s = 0; s < static_cast<VertexId>(n); ++s) {
    while (excess[s] > kSnapTol) {
      Path p{{s}, {}};
      std::vector<char> seen(n, 0);
      seen[s] = 1;
      VertexId cur = s;
      for (;;) {
        EdgeId step = -1;
        for (EdgeId e : g.incident(cur)) {
          if (leaves(g, T, e, cur)) {
            step = e;
            break;
          }
        }
        if (step < 0) break;
        cur = g.opposite(step, cur);
        if (seen[cur]) throw ValidationError("flow", "support contains a directed cycle");
        seen[cur] = 1;
        p.edges.push_back(step);
        p.vertices.push_back(cur);
      }
      if (p.edges.empty()) {
        // Excess left by roundoff with no outgoing support.
        if (excess[s] > kMeasureTol)
          throw ValidationError("flow", "source " + std::to_string(s) + " has no outgoing flow");
        break;
      }
      double w = std::min(excess[s], deficit[cur]);
      for (EdgeId e : p.edges) w = std::min(w, std::abs(T[e]));
      if (!(w > 0.0)) throw ValidationError("flow", "degenerate peel (roundoff in boundary)");
      for (std::size_t k = 0; k < p.edges.size(); ++k) {
        const EdgeId e = p.edges[k];
        T[e] -= direction(g.edge(e), p.vertices[k]) * w;
        snap(T[e]);
      }
      excess[s] -= w;
      deficit[cur] -= w;
      if (excess[s] < kSnapTol) excess[s] = 0.0;
      if (deficit[cur] < kSnapTol) deficit[cur] = 0.0;
      out.items.push_back({std::move(p), w});
    }
  }
  for (std::size_t e = 0; e < T.size(); ++e)
    if (std::abs(T[e]) > kMeasureTol)
      throw ValidationError("flow", "support contains a directed cycle");
  return out;
}

std::vector<double> superpose(const GeometricGraph& g, const PathDecomposition& d) {
  std::vector<double> T(g.num_edges(), 0.0);
  for (const auto& wp : d.items)
    for (std::size_t k = 0; k < wp.path.edges.size(); ++k) {
      const EdgeId e = wp.path.edges[k];
      T[e] += direction(g.edge(e), wp.path.vertices[k]) * wp.weight;
    }
  return T;
}

DecompositionResiduals decomposition_residuals(const GeometricGraph& g,
                                               std::span<const double> flow,
                                               const PathDecomposition& d) {
  DecompositionResiduals r;
  const auto S = superpose(g, d);
  double mass_T = 0.0;
  for (const Edge& e : g.edges()) {
    r.superposition = std::max(r.superposition, std::abs(S[e.id] - flow[e.id]));
    mass_T += e.length * std::abs(flow[e.id]);
  }
  double mass_pi = 0.0, weight = 0.0;
  for (const auto& wp : d.items) {
    mass_pi += wp.weight * wp.path.length(g);
    weight += wp.weight;
    r.all_simple = r.all_simple && wp.path.simple();
  }
  double bdry = 0.0;
  for (double x : boundary_of_flow(g, flow)) bdry += std::abs(x);
  r.mass = std::abs(mass_pi - mass_T);
  r.boundary = std::abs(2.0 * weight - bdry);
  return r;
}

Path loop_erase(const Path& p) {
  Path out{{p.vertices.front()}, {}};
  for (std::size_t k = 0; k < p.edges.size(); ++k) {
    const VertexId v = p.vertices[k + 1];
    auto it = std::find(out.vertices.begin(), out.vertices.end(), v);
    if (it != out.vertices.end()) {
      const auto keep = static_cast<std::size_t>(it - out.vertices.begin());
      out.vertices.resize(keep + 1);
      out.edges.resize(keep);
    } else {
      out.vertices.push_back(v);
      out.edges.push_back(p.edges[k]);
    }
  }
  return out;
}

TrafficPlan loop_erase_plan(const GeometricGraph& g, const CostSpec& cost,
                            const TrafficPlan& plan) {
  TrafficPlan out;
  out.reserve(plan.size());
  for (const auto& wp : plan) out.push_back({loop_erase(wp.path), wp.weight});
  const double before = phi_mass_traffic(g, cost, plan);
  const double after = phi_mass_traffic(g, cost, out);
  if (after > before + 1e-12 * std::max(1.0, before))
    throw std::logic_error("loop erasure increased the phi-mass");
  return out;
}

DensityReport density_bound_check(const Instance& inst, std::span<const double> flow) {
  if (flow.size() != inst.graph.num_edges()) throw ShapeError("flow has wrong length");
  DensityReport r;
  r.beta = inst.beta();
  for (double x : flow) r.max_load = std::max(r.max_load, std::abs(x));
  r.ok = r.max_load <= r.beta + kMeasureTol;
  return r;
}

}  // namespace rbot
