#include <cmath>
#include <cstdlib>
#include <map>
#include <queue>
#include <set>

#include "rbot/solver.hpp"
#include "solver_internal.hpp"

namespace rbot {

namespace detail {

ShortestPathTree dijkstra(const GeometricGraph& g, VertexId s, const ArcWeight& w,
                          std::span<const char> banned_vertices) {
  const std::size_t n = g.num_vertices();
  ShortestPathTree tr{std::vector<double>(n, kInf), std::vector<EdgeId>(n, -1),
                      std::vector<VertexId>(n, -1)};
  std::vector<char> done(n, 0);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  tr.dist[s] = 0.0;
  pq.push({0.0, s});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (EdgeId e : g.incident(u)) {
      const Edge& ed = g.edge(e);
      const VertexId v = ed.u == u ? ed.v : ed.u;
      if (done[v] || (!banned_vertices.empty() && banned_vertices[v])) continue;
      const double c = w(e, ed.u == u ? +1 : -1);
      if (c == kInf) continue;
      if (d + c < tr.dist[v]) {
        tr.dist[v] = d + c;
        tr.parent_edge[v] = e;
        tr.parent[v] = u;
        pq.push({tr.dist[v], v});
      }
    }
  }
  return tr;
}

Path extract_path(const ShortestPathTree& tree, VertexId s, VertexId t) {
  Path p;
  if (tree.dist[t] == kInf) return p;
  for (VertexId v = t; v != s; v = tree.parent[v]) {
    p.vertices.push_back(v);
    p.edges.push_back(tree.parent_edge[v]);
  }
  p.vertices.push_back(s);
  std::reverse(p.vertices.begin(), p.vertices.end());
  std::reverse(p.edges.begin(), p.edges.end());
  return p;
}

void snap_all(std::vector<double>& v) {
  for (double& x : v)
    if (std::abs(x) < kSnapTol) x = 0.0;
}

}  // namespace detail

using detail::kInf;

std::string model_name(Model m) {
  switch (m) {
    case Model::eulerian:
      return "eulerian";
    case Model::eulerian_oriented:
      return "eulerian-oriented";
    case Model::lagrangian:
      return "lagrangian";
  }
  return "eulerian";
}

Model model_from_name(const std::string& name) {
  if (name == "eulerian") return Model::eulerian;
  if (name == "eulerian-oriented") return Model::eulerian_oriented;
  if (name == "lagrangian") return Model::lagrangian;
  throw ParseError("model", "unknown model '" + name + "'");
}

std::vector<double> theta_from_flows(std::span<const std::vector<double>> flows,
                                     std::size_t num_edges) {
  std::vector<double> theta(num_edges, 0.0);
  for (const auto& f : flows) {
    if (f.size() != num_edges) throw ShapeError("flow has wrong length");
    for (std::size_t e = 0; e < num_edges; ++e) theta[e] = std::max(theta[e], std::abs(f[e]));
  }
  return theta;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("ROT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Path> enumerate_simple_paths(const Instance& inst, std::span<const char> usable,
                                         std::size_t limit) {
  const auto& g = inst.graph;
  std::vector<Path> out;
  std::vector<char> on_path(g.num_vertices(), 0);
  Path cur;
  // Iterative DFS keeps deep graphs off the call stack.
  struct Frame {
    VertexId v;
    std::size_t next;
  };
  for (VertexId s : inst.boundary.source_vertices()) {
    std::vector<Frame> stack{{s, 0}};
    cur = Path{{s}, {}};
    on_path[s] = 1;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& inc = g.incident(f.v);
      if (f.next == inc.size()) {
        on_path[f.v] = 0;
        stack.pop_back();
        cur.vertices.pop_back();
        if (!cur.edges.empty()) cur.edges.pop_back();
        continue;
      }
      const EdgeId e = inc[f.next++];
      if (!usable.empty() && !usable[e]) continue;
      const VertexId w = g.opposite(e, f.v);
      if (on_path[w]) continue;
      on_path[w] = 1;
      cur.vertices.push_back(w);
      cur.edges.push_back(e);
      if (inst.boundary.mass(w) > 0.0) {
        out.push_back(cur);
        if (out.size() > limit)
          throw SizeGuardError("more than " + std::to_string(limit) +
                               " simple source-to-target paths");
      }
      stack.push_back({w, 0});
    }
  }
  return out;
}

std::vector<Path> k_shortest_paths(const GeometricGraph& g, std::span<const char> usable,
                                   VertexId s, VertexId t, std::size_t k) {
  std::vector<Path> A;
  if (k == 0 || s == t) return A;
  auto length_of = [&](const Path& p) { return p.length(g); };
  std::vector<char> banned_edge(g.num_edges(), 0);
  const detail::ArcWeight w = [&](EdgeId e, int) {
    if ((!usable.empty() && !usable[e]) || banned_edge[e]) return kInf;
    return g.edge(e).length;
  };
  Path first = detail::extract_path(detail::dijkstra(g, s, w), s, t);
  if (first.vertices.empty()) return A;
  A.push_back(std::move(first));

  std::set<std::pair<double, std::vector<EdgeId>>> B;
  std::map<std::vector<EdgeId>, Path> paths;
  std::set<std::vector<EdgeId>> seen{A[0].edges};
  while (A.size() < k) {
    const Path prev = A.back();
    for (std::size_t i = 0; i + 1 < prev.vertices.size(); ++i) {
      const VertexId spur = prev.vertices[i];
      std::fill(banned_edge.begin(), banned_edge.end(), 0);
      for (const Path& p : A) {
        if (p.edges.size() > i && std::equal(prev.edges.begin(), prev.edges.begin() + i,
                                             p.edges.begin()) &&
            p.vertices[i] == spur)
          banned_edge[p.edges[i]] = 1;
      }
      std::vector<char> banned_vertex(g.num_vertices(), 0);
      for (std::size_t r = 0; r < i; ++r) banned_vertex[prev.vertices[r]] = 1;
      const Path tail = detail::extract_path(detail::dijkstra(g, spur, w, banned_vertex), spur, t);
      if (tail.vertices.empty()) continue;
      Path total;
      total.vertices.assign(prev.vertices.begin(), prev.vertices.begin() + i);
      total.edges.assign(prev.edges.begin(), prev.edges.begin() + i);
      total.vertices.insert(total.vertices.end(), tail.vertices.begin(), tail.vertices.end());
      total.edges.insert(total.edges.end(), tail.edges.begin(), tail.edges.end());
      if (!seen.insert(total.edges).second) continue;
      B.insert({length_of(total), total.edges});
      paths.emplace(total.edges, std::move(total));
    }
    if (B.empty()) break;
    auto it = B.begin();
    A.push_back(paths.at(it->second));
    B.erase(it);
  }
  return A;
}

void attach_oracle_gap(SolveReport& report, const SolveReport& oracle) {
  report.oracle_gap = report.energy.energy - oracle.energy.energy;
}

SolveReport solve(const Instance& inst, const SolveOptions& opts) {
  return opts.model == Model::lagrangian ? solve_lagrangian(inst, opts)
                                         : solve_eulerian(inst, opts);
}

Json options_to_json(const SolveOptions& o) {
  return Json{{"model", model_name(o.model)},
              {"max_iters", o.max_iters},
              {"restarts", o.restarts},
              {"seed", o.seed},
              {"path_dictionary_size", o.path_dictionary_size},
              {"delta", o.delta},
              {"tol", o.tol}};
}

Json report_to_json(const Instance& inst, const SolveReport& r) {
  Json j;
  j["format"] = kFormatVersion;
  j["kind"] = r.oracle ? "oracle" : "solve";
  j["options"] = options_to_json(r.options);
  j["model"] = model_name(r.options.model);
  if (r.eulerian) {
    j["competitor"] = eulerian_competitor_to_json(*r.eulerian);
  } else if (r.lagrangian) {
    j["competitor"] = lagrangian_competitor_to_json(*r.lagrangian);
  } else {
    j["competitor"] = nullptr;
  }
  j["energy"] = energy_to_json(r.energy);
  j["trace"] = r.trace;
  Json cert = admissibility_to_json(r.certificate);
  cert["oriented_consistent"] = r.oriented_consistent ? Json(*r.oriented_consistent) : Json(nullptr);
  j["certificate"] = std::move(cert);
  j["oracle_gap"] = r.oracle_gap ? Json(*r.oracle_gap) : Json(nullptr);
  const auto& d = r.diagnostics;
  Json dj{{"iterations", d.iterations},
          {"runs", d.runs},
          {"best_run", d.best_run},
          {"budget_exhausted", d.budget_exhausted}};
  if (r.options.model == Model::lagrangian) dj["dictionary_size"] = d.dictionary_size;
  if (r.options.model == Model::eulerian_oriented) dj["contested_edges"] = d.contested_edges;
  if (r.oracle) {
    dj["oracle_candidates"] = d.oracle_candidates;
    dj["oracle_ties"] = d.oracle_ties;
  }
  if (d.validation) {
    dj["positive_distance"] = d.validation->positive_distance;
    dj["phi_bounded"] = d.validation->phi_bounded;
    dj["lagrangian_hypotheses"] = d.validation->lagrangian_hypotheses();
  }
  dj["num_edges"] = inst.graph.num_edges();
  dj["num_scenarios"] = inst.num_scenarios();
  j["diagnostics"] = std::move(dj);
  return j;
}

}  // namespace rbot
