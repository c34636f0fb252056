#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rbot/decomposition.hpp"
#include "rbot/examples.hpp"

namespace rbot::testing {

Instance make_instance(std::vector<std::vector<double>> positions, const std::vector<EdgeSpec>& edges,
                       std::vector<double> nu, CostSpec cost, const std::vector<ScenarioSpec>& scenarios,
                       PayoffSpec payoff, double truncated) {
  std::vector<Vertex> vs;
  for (std::size_t k = 0; k < positions.size(); ++k) vs.push_back({static_cast<VertexId>(k), positions[k]});
  std::vector<Edge> es;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    double len = e.length;
    if (len < 0) {
      double s = 0.0;
      for (std::size_t d = 0; d < positions[e.u].size(); ++d)
        s += (positions[e.u][d] - positions[e.v][d]) * (positions[e.u][d] - positions[e.v][d]);
      len = std::sqrt(s);
    }
    es.push_back({static_cast<EdgeId>(k), e.u, e.v, len});
  }
  const int dim = static_cast<int>(positions.front().size());
  Instance inst;
  inst.graph = GeometricGraph(dim, std::move(vs), std::move(es));
  inst.boundary = BoundaryMeasure(std::move(nu));
  inst.cost = std::move(cost);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    DamageScenario s;
    s.id = static_cast<int>(i) + 1;
    s.prob = scenarios[i].prob;
    s.edge_mask = scenarios[i].mask;
    s.edge_efficiency = scenarios[i].edge_efficiency;
    s.vertex_efficiency = scenarios[i].vertex_efficiency;
    inst.scenarios.push_back(std::move(s));
  }
  inst.payoff = std::move(payoff);
  inst.truncated_prob = truncated;
  return inst;
}

std::vector<NamedInstance> oracle_suite() {
  using P = std::vector<std::vector<double>>;
  const auto h = [](double v) { return PayoffSpec::constant(v); };
  const auto sqrt_cost = CostSpec::power(0.5);
  std::vector<NamedInstance> out;

  out.push_back({"single_edge",
                 make_instance(P{{0, 0}, {1, 0}}, {{0, 1}}, {-1, 1}, sqrt_cost, {{1.0, {true}}}, h(1))});
  out.push_back({"single_edge_low_payoff",
                 make_instance(P{{0, 0}, {1, 0}}, {{0, 1}}, {-1, 1}, sqrt_cost, {{1.0, {true}}}, h(0.25))});
  out.push_back({"path_masked_middle",
                 make_instance(P{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {1.5, 1}},
                               {{0, 1}, {1, 2}, {2, 3}, {1, 4}, {4, 2}}, {-1, 0, 0, 1, 0}, sqrt_cost,
                               {{0.5, {true, true, true, true, true}},
                                {0.5, {true, false, true, true, true}}},
                               h(2))});
  out.push_back({"y_two_sources",
                 make_instance(P{{0, 1}, {0, -1}, {1, 0}, {2, 0}}, {{0, 2}, {1, 2}, {2, 3}},
                               {-0.5, -0.5, 0, 1}, sqrt_cost, {{1.0, {true, true, true}}}, h(3))});
  out.push_back({"y_two_targets",
                 make_instance(P{{0, 1}, {0, -1}, {1, 0}, {2, 0}}, {{0, 2}, {1, 2}, {2, 3}},
                               {0.5, 0.5, 0, -1}, sqrt_cost,
                               {{0.5, {true, true, true}}, {0.5, {false, true, true}}}, h(3))});
  out.push_back({"diamond_masks",
                 make_instance(P{{0, 0}, {1, 1}, {1, -1}, {2, 0}}, {{0, 1}, {1, 3}, {0, 2}, {2, 3}},
                               {-1, 0, 0, 1}, sqrt_cost,
                               {{0.5, {false, true, true, true}}, {0.5, {true, true, true, false}}}, h(4))});
  out.push_back({"parallel_edges",
                 make_instance(P{{0, 0}, {1, 0}}, {{0, 1, 1.0}, {0, 1, 1.5}, {0, 1, 2.0}}, {-1, 1}, sqrt_cost,
                               {{0.5, {false, true, true}}, {0.5, {true, false, true}}}, h(3))});
  {
    ExampleParams p;
    p.name = "non_existence";
    out.push_back({"non_existence", build_example(p)});
  }
  out.push_back({"table_cost_merge",
                 make_instance(P{{0, 0}, {0, 1}, {1, 0.5}, {2, 0.5}}, {{0, 2}, {1, 2}, {2, 3}},
                               {-0.5, -0.5, 0, 1}, CostSpec::table({{0.5, 0.6}, {1.0, 0.8}}),
                               {{1.0, {true, true, true}}}, h(2))});
  out.push_back({"bounded_step",
                 make_instance(P{{0, 0}, {1, 0}, {2, 0}, {1, 1}}, {{0, 1}, {1, 2}, {0, 3}, {3, 2}},
                               {-1, 0, 1, 0}, CostSpec::bounded_step(0.75),
                               {{0.5, {false, true, true, true}}, {0.5, {true, true, true, true}}}, h(2))});
  out.push_back({"payoff_table",
                 make_instance(P{{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}}, {-0.75, 0.5, 0.25}, sqrt_cost,
                               {{0.5, {true, true}}, {0.5, {true, false}}},
                               PayoffSpec::table({{1, 2, 4}, {1, 0.5, 3}}))});
  out.push_back({"square_multi",
                 make_instance(P{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}},
                               {-0.75, 0.5, 0.5, -0.25}, sqrt_cost,
                               {{0.5, {true, true, false, true}}, {0.5, {false, true, true, true}}},
                               h(2))});
  out.push_back({"triangle_chord",
                 make_instance(P{{0, 0}, {2, 0}, {1, 1.5}, {1, 0}}, {{0, 3}, {3, 1}, {1, 2}, {2, 0}, {3, 2}},
                               {-0.375, 1, -0.625, 0}, sqrt_cost,
                               {{0.5, {true, false, true, true, true}}, {0.5, {true, true, true, true, true}}},
                               h(3))});
  out.push_back({"star",
                 make_instance(P{{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}},
                               {0, -0.5, -0.25, 0.25, 0.5}, sqrt_cost,
                               {{0.5, {true, true, true, true}}, {0.5, {true, false, true, true}}}, h(2))});
  out.push_back({"two_components",
                 make_instance(P{{0, 0}, {1, 0}, {3, 0}, {4, 0.5}}, {{0, 1}, {2, 3}}, {-0.5, 0.5, -0.25, 0.25},
                               sqrt_cost, {{1.0, {true, true}}}, h(2))});
  out.push_back({"opposed_shared_edge",
                 make_instance(P{{-1, 1}, {0, 0}, {1, 0}, {2, 1}, {2, -1}, {-1, -1}},
                               {{0, 1}, {1, 2}, {2, 3}, {4, 2}, {1, 5}, {4, 5, 4.0}},
                               {-0.5, 0, 0, 0.5, -0.5, 0.5}, sqrt_cost,
                               {{0.5, {true, true, true, false, false, true}},
                                {0.5, {false, true, false, true, true, true}}},
                               h(10))});
  out.push_back({"payoff_threshold",
                 make_instance(P{{0, 0}, {1, 0}, {4, 0}}, {{0, 1}, {0, 2}}, {-1, 0.5, 0.5}, sqrt_cost,
                               {{1.0, {true, true}}}, h(1.2))});
  out.push_back({"fractional_efficiency",
                 make_instance(P{{0, 0}, {1, 1}, {1, -1}, {2, 0}}, {{0, 1}, {1, 3}, {0, 2}, {2, 3}, {0, 3, 3.0}},
                               {-1, 0, 0, 1}, sqrt_cost,
                               {{0.5, {true, true, true, true, true}, std::vector<double>{1, 1, 0.5, 0.5, 1},
                                 std::vector<double>{1, 1, 1, 1}},
                                {0.5, {false, true, true, true, true}, std::vector<double>{0, 1, 1, 1, 0.25},
                                 std::vector<double>{1, 1, 1, 1}}},
                               h(3))});
  out.push_back({"three_dimensional",
                 make_instance(P{{0, 0, 0}, {1, 0, 0}, {1, 1, 1}}, {{0, 1}, {1, 2}, {0, 2}}, {-0.5, 0, 0.5},
                               sqrt_cost, {{0.5, {true, true, true}}, {0.5, {true, true, false}}}, h(4))});
  out.push_back({"truncated_family",
                 make_instance(P{{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}}, {-1, 0, 1}, sqrt_cost,
                               {{0.5, {true, true}}}, h(3), 0.5)});
  return out;
}

GeometricGraph random_graph(Rng& rng, int max_vertices, int max_edges) {
  const int n = 2 + rng.index(std::max(1, max_vertices - 1));
  std::vector<Vertex> vs;
  for (int v = 0; v < n; ++v) vs.push_back({v, {rng.uniform(0, 4), rng.uniform(0, 4)}});
  std::set<std::pair<int, int>> seen;
  std::vector<Edge> es;
  auto add = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    if (a == b || !seen.insert(key).second) return;
    const double len = std::hypot(vs[a].pos[0] - vs[b].pos[0], vs[a].pos[1] - vs[b].pos[1]);
    es.push_back({static_cast<EdgeId>(es.size()), a, b, len});
  };
  for (int v = 1; v < n && static_cast<int>(es.size()) < max_edges; ++v) add(rng.index(v), v);
  const int cap = std::min(max_edges, n * (n - 1) / 2);
  const int target = static_cast<int>(es.size()) + rng.index(cap - static_cast<int>(es.size()) + 1);
  for (int tries = 0; static_cast<int>(es.size()) < target && tries < 200; ++tries)
    add(rng.index(n), rng.index(n));
  return GeometricGraph(2, std::move(vs), std::move(es));
}

std::optional<Path> random_simple_path(Rng& rng, const GeometricGraph& g, VertexId s, VertexId t,
                                       const std::vector<char>& usable) {
  if (s == t) return std::nullopt;
  std::vector<char> on(g.num_vertices(), 0);
  std::vector<VertexId> verts{s};
  std::vector<EdgeId> edges;
  std::vector<std::vector<EdgeId>> pending;
  auto options = [&](VertexId v) {
    std::vector<EdgeId> inc;
    for (EdgeId e : g.incident(v))
      if (usable.empty() || usable[e]) inc.push_back(e);
    std::shuffle(inc.begin(), inc.end(), rng.gen);
    return inc;
  };
  on[s] = 1;
  pending.push_back(options(s));
  while (!pending.empty()) {
    if (pending.back().empty()) {
      pending.pop_back();
      on[verts.back()] = 0;
      verts.pop_back();
      if (!edges.empty()) edges.pop_back();
      continue;
    }
    const EdgeId e = pending.back().back();
    pending.back().pop_back();
    const VertexId w = g.opposite(e, verts.back());
    if (on[w]) continue;
    verts.push_back(w);
    edges.push_back(e);
    if (w == t) return Path{verts, edges};
    on[w] = 1;
    pending.push_back(options(w));
  }
  return std::nullopt;
}

namespace {

void add_path(const GeometricGraph& g, const Path& p, double w, std::vector<double>& flow) {
  for (std::size_t k = 0; k < p.edges.size(); ++k)
    flow[p.edges[k]] += (g.edge(p.edges[k]).u == p.vertices[k] ? w : -w);
}

std::vector<ScenarioSpec> random_scenarios(Rng& rng, const GeometricGraph& g, bool efficiencies) {
  const int k = 1 + rng.index(3);
  const std::vector<double> probs = k == 1 ? std::vector<double>{1.0}
                                    : k == 2 ? std::vector<double>{0.5, 0.5}
                                             : std::vector<double>{0.5, 0.25, 0.25};
  std::vector<ScenarioSpec> out;
  for (int i = 0; i < k; ++i) {
    ScenarioSpec s{probs[i], std::vector<bool>(g.num_edges()), std::nullopt, std::nullopt};
    for (std::size_t e = 0; e < g.num_edges(); ++e) s.mask[e] = rng.coin(0.8);
    if (efficiencies) {
      std::vector<double> ee(g.num_edges()), ve(g.num_vertices());
      for (auto& x : ee) x = rng.index(5) / 4.0;
      for (auto& x : ve) x = rng.coin(0.8) ? 1.0 : rng.index(5) / 4.0;
      s.edge_efficiency = ee;
      s.vertex_efficiency = ve;
    }
    out.push_back(std::move(s));
  }
  return out;
}

PayoffSpec random_payoff(Rng& rng, std::size_t scenarios, std::size_t vertices) {
  if (rng.coin()) return PayoffSpec::constant(rng.uniform(0.5, 5.0));
  std::vector<std::vector<double>> t(scenarios, std::vector<double>(vertices));
  for (auto& row : t)
    for (auto& x : row) x = rng.uniform(0.0, 5.0);
  return PayoffSpec::table(std::move(t));
}

CostSpec random_cost(Rng& rng) {
  static const double alphas[] = {0.25, 0.5, 0.75};
  return CostSpec::power(alphas[rng.index(3)]);
}

Instance assemble(const GeometricGraph& g, std::vector<double> nu, CostSpec cost,
                  std::vector<ScenarioSpec> sc, PayoffSpec payoff) {
  std::vector<std::vector<double>> pos;
  std::vector<EdgeSpec> es;
  for (const Vertex& v : g.vertices()) pos.push_back(v.pos);
  for (const Edge& e : g.edges()) es.push_back({e.u, e.v, e.length});
  return make_instance(std::move(pos), es, std::move(nu), std::move(cost), sc, std::move(payoff));
}

}  // namespace

std::vector<double> random_acyclic_flow(Rng& rng, const GeometricGraph& g, int paths) {
  std::vector<double> flow(g.num_edges(), 0.0);
  const int n = static_cast<int>(g.num_vertices());
  for (int k = 0; k < paths; ++k) {
    const VertexId s = rng.index(n), t = rng.index(n);
    if (auto p = random_simple_path(rng, g, s, t, {})) add_path(g, *p, rng.dyadic(3), flow);
  }
  return remove_cycles(g, flow);
}

Instance instance_dominating(Rng& rng, const GeometricGraph& g, const std::vector<double>& flow) {
  std::vector<double> nu = boundary_of_flow(g, flow);
  for (double& x : nu) {
    if (x > kSnapTol)
      x += rng.coin() ? rng.dyadic(2) : 0.0;
    else if (x < -kSnapTol)
      x -= rng.coin() ? rng.dyadic(2) : 0.0;
    else if (rng.coin(0.3))
      x = (rng.coin() ? 1 : -1) * rng.dyadic(2);
    else
      x = 0.0;
  }
  auto sc = random_scenarios(rng, g, rng.coin());
  auto payoff = random_payoff(rng, sc.size(), g.num_vertices());
  return assemble(g, std::move(nu), random_cost(rng), std::move(sc), std::move(payoff));
}

Instance random_instance(Rng& rng, int max_vertices, int max_edges) {
  GeometricGraph g = random_graph(rng, std::max(3, max_vertices), max_edges);
  const int n = static_cast<int>(g.num_vertices());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.gen);
  std::vector<double> nu(n, 0.0);
  const int sources = 1 + rng.index(std::min(3, n - 1));
  const int targets = 1 + rng.index(std::min(3, n - sources));
  for (int k = 0; k < sources; ++k) nu[order[k]] = -rng.dyadic(2);
  for (int k = 0; k < targets; ++k) nu[order[sources + k]] = rng.dyadic(2);
  auto sc = random_scenarios(rng, g, true);
  auto payoff = random_payoff(rng, sc.size(), g.num_vertices());
  return assemble(g, std::move(nu), random_cost(rng), std::move(sc), std::move(payoff));
}

EulerianCompetitor random_eulerian(Rng& rng, const Instance& inst) {
  const auto& g = inst.graph;
  EulerianCompetitor c;
  c.theta.assign(g.num_edges(), 0.0);
  const auto srcs = inst.boundary.source_vertices();
  const auto tgts = inst.boundary.target_vertices();
  for (std::size_t i = 0; i < inst.num_scenarios(); ++i) {
    std::vector<double> flow(g.num_edges(), 0.0);
    std::vector<char> usable(g.num_edges(), 1);
    if (const auto& m = inst.scenarios[i].edge_mask)
      for (std::size_t e = 0; e < g.num_edges(); ++e) usable[e] = (*m)[e] ? 1 : 0;
    std::vector<double> out_cap(g.num_vertices()), in_cap(g.num_vertices());
    for (const Vertex& v : g.vertices()) {
      out_cap[v.id] = inst.boundary.sources(v.id);
      in_cap[v.id] = inst.boundary.targets(v.id);
    }
    if (!srcs.empty() && !tgts.empty()) {
      const int tries = 1 + rng.index(4);
      for (int k = 0; k < tries; ++k) {
        const VertexId s = srcs[rng.index(static_cast<int>(srcs.size()))];
        const VertexId t = tgts[rng.index(static_cast<int>(tgts.size()))];
        const double cap = std::min(out_cap[s], in_cap[t]);
        if (cap <= kMeasureTol) continue;
        auto p = random_simple_path(rng, g, s, t, usable);
        if (!p) continue;
        const double w = cap * rng.dyadic(2);
        out_cap[s] -= w;
        in_cap[t] -= w;
        add_path(g, *p, w, flow);
      }
    }
    for (std::size_t e = 0; e < g.num_edges(); ++e) c.theta[e] = std::max(c.theta[e], std::abs(flow[e]));
    c.flows.push_back(std::move(flow));
  }
  for (double& t : c.theta)
    if (rng.coin(0.2)) t += rng.dyadic(2);
  return c;
}

LagrangianCompetitor random_lagrangian(Rng& rng, const Instance& inst) {
  const auto& g = inst.graph;
  const auto srcs = inst.boundary.source_vertices();
  const auto tgts = inst.boundary.target_vertices();
  TrafficPlan plan;
  if (!srcs.empty() && !tgts.empty()) {
    const int count = 1 + rng.index(4);
    for (int k = 0; k < count; ++k) {
      const VertexId s = srcs[rng.index(static_cast<int>(srcs.size()))];
      const VertexId t = tgts[rng.index(static_cast<int>(tgts.size()))];
      if (auto p = random_simple_path(rng, g, s, t, {})) plan.push_back({*p, rng.dyadic(2)});
    }
  }
  std::vector<std::vector<double>> subplans;
  for (std::size_t i = 0; i < inst.num_scenarios(); ++i) {
    std::vector<double> out_cap(g.num_vertices()), in_cap(g.num_vertices());
    for (const Vertex& v : g.vertices()) {
      out_cap[v.id] = inst.boundary.sources(v.id);
      in_cap[v.id] = inst.boundary.targets(v.id);
    }
    std::vector<double> sp(plan.size(), 0.0);
    for (std::size_t p = 0; p < plan.size(); ++p) {
      const VertexId s = plan[p].path.start(), t = plan[p].path.end();
      const double cap = std::min({out_cap[s], in_cap[t], plan[p].weight});
      if (cap <= kMeasureTol || rng.coin(0.25)) continue;
      sp[p] = cap * rng.dyadic(2);
      out_cap[s] -= sp[p];
      in_cap[t] -= sp[p];
    }
    subplans.push_back(std::move(sp));
  }
  if (plan.empty()) return LagrangianCompetitor{{}, std::vector<std::vector<double>>(inst.num_scenarios())};
  return make_lagrangian_competitor(std::move(plan), std::move(subplans));
}

}  // namespace rbot::testing
