#include <chrono>
#include <cmath>
#include <random>

#include "rbot/decomposition.hpp"
#include "rbot/recovery.hpp"
#include "rbot/solver.hpp"
#include "solver_internal.hpp"

namespace rbot {

namespace {

using detail::kInf;
using Flows = std::vector<std::vector<double>>;

struct RunResult {
  Flows flows;
  double energy = 0.0;
  std::vector<double> trace;
  int iterations = 0;
  bool budget_exhausted = false;
};

int sign_of(double x) { return x > kSnapTol ? 1 : (x < -kSnapTol ? -1 : 0); }

class EulerianSearch {
 public:
  EulerianSearch(const Instance& inst, const SolveOptions& opts, bool oriented)
      : inst_(inst), g_(inst.graph), opts_(opts), oriented_(oriented), box_(inst.boundary) {
    for (std::size_t i = 0; i < inst.num_scenarios(); ++i) {
      const auto& mask = inst.scenarios[i].edge_mask;
      if (!mask)
        throw ValidationError("scenarios[" + std::to_string(i) + "].edge_mask",
                              "the Eulerian model needs an edge mask per scenario");
      usable_.emplace_back(mask->begin(), mask->end());
    }
  }

  double eval(const Flows& f) const {
    EulerianCompetitor c{theta_from_flows(f, g_.num_edges()), f};
    return eulerian_energy(inst_, c).energy;
  }

  // Orientation seen by scenario i: fixed signs first, then the signs
  // already used by the other scenarios. 0 means free.
  std::vector<int> effective_sigma(const Flows& f, std::size_t i,
                                   const std::vector<int>& fixed) const {
    std::vector<int> s = fixed;
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (j == i) continue;
      for (std::size_t e = 0; e < s.size(); ++e)
        if (s[e] == 0) s[e] = sign_of(f[j][e]);
    }
    return s;
  }

  bool consistent(const Flows& f, const std::vector<int>& fixed) const {
    if (!oriented_) return true;
    for (std::size_t e = 0; e < g_.num_edges(); ++e) {
      int s = fixed[e];
      for (const auto& fl : f) {
        const int t = sign_of(fl[e]);
        if (t == 0) continue;
        if (s == 0) s = t;
        if (s != t) return false;
      }
    }
    return true;
  }

  // Step (a) for every active scenario at the capacities of f.
  Flows recompute_flows(const Flows& f, const std::vector<char>& active,
                        const std::vector<int>& fixed) const {
    const auto theta = theta_from_flows(f, g_.num_edges());
    Flows out = f;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!active[i]) continue;
      if (oriented_) {
        const auto sigma = effective_sigma(out, i, fixed);
        out[i] = max_payoff_flow(inst_, theta, i, true, std::span<const int>(sigma));
      } else {
        out[i] = max_payoff_flow(inst_, theta, i);
      }
    }
    return out;
  }

  struct Best {
    double energy;
    Flows flows;
    bool found = false;
    void offer(double e, Flows&& f) {
      if (e < energy) {
        energy = e;
        flows = std::move(f);
        found = true;
      }
    }
  };

  void add_path(std::vector<double>& flow, const Path& p, double m) const {
    for (std::size_t k = 0; k < p.edges.size(); ++k)
      flow[p.edges[k]] += detail::traversal_sign(g_, p, k) * m;
  }

  bool path_allowed(const Path& p, std::size_t i, const std::vector<int>& sigma) const {
    for (std::size_t k = 0; k < p.edges.size(); ++k) {
      const EdgeId e = p.edges[k];
      if (!usable_[i][e]) return false;
      if (oriented_ && sigma[e] != 0 && sigma[e] != detail::traversal_sign(g_, p, k))
        return false;
    }
    return true;
  }

  bool fits(const NodeMeasure& d, VertexId u, VertexId v, double m) const {
    return d[u] - m >= box_.lo[u] - kMeasureTol && d[v] + m <= box_.hi[v] + kMeasureTol;
  }

  void offer_candidate(Best& best, Flows&& cand, const std::vector<std::size_t>& touched,
                       const std::vector<int>& fixed) const {
    for (std::size_t i : touched) {
      detail::snap_all(cand[i]);
      cand[i] = remove_cycles(g_, cand[i]);
    }
    if (!consistent(cand, fixed)) return;
    const double e = eval(cand);
    best.offer(e, std::move(cand));
  }

  // Path insertion for scenario i with the given masses, plus the same path
  // inserted jointly into every other active scenario that can take it.
  void insertions(const Flows& f, std::size_t i, const std::vector<double>& masses,
                  const std::vector<char>& active, const std::vector<int>& fixed,
                  Best& best) const {
    const auto theta = theta_from_flows(f, g_.num_edges());
    std::vector<NodeMeasure> d;
    for (const auto& fl : f) d.push_back(boundary_of_flow(g_, fl));
    const auto sigma = oriented_ ? effective_sigma(f, i, fixed) : fixed;
    const std::size_t n = g_.num_vertices();

    for (double m : masses) {
      const detail::ArcWeight w = [&](EdgeId e, int s) {
        if (!usable_[i][e]) return kInf;
        if (oriented_ && sigma[e] != 0 && sigma[e] != s) return kInf;
        const double t = std::max(theta[e], std::abs(f[i][e] + s * m));
        return g_.edge(e).length * (phi_eval(inst_.cost, t) - phi_eval(inst_.cost, theta[e]));
      };
      for (VertexId u = 0; u < static_cast<VertexId>(n); ++u) {
        if (d[i][u] - m < box_.lo[u] - kMeasureTol) continue;
        const auto tree = detail::dijkstra(g_, u, w);
        for (VertexId v = 0; v < static_cast<VertexId>(n); ++v) {
          if (v == u || tree.dist[v] == kInf || !fits(d[i], u, v, m)) continue;
          const Path p = detail::extract_path(tree, u, v);
          Flows cand = f;
          add_path(cand[i], p, m);
          std::vector<std::size_t> touched{i};
          offer_candidate(best, std::move(cand), touched, fixed);

          Flows joint = f;
          add_path(joint[i], p, m);
          std::vector<std::size_t> jt{i};
          for (std::size_t j = 0; j < f.size(); ++j) {
            if (j == i || !active[j] || !fits(d[j], u, v, m)) continue;
            const auto sj = oriented_ ? effective_sigma(joint, j, fixed) : fixed;
            if (!path_allowed(p, j, sj)) continue;
            add_path(joint[j], p, m);
            jt.push_back(j);
          }
          if (jt.size() > 1) offer_candidate(best, std::move(joint), jt, fixed);
        }
      }
    }
  }

  double max_slack(const NodeMeasure& d) const {
    double src = 0.0, dst = 0.0;
    for (std::size_t v = 0; v < d.size(); ++v) {
      src = std::max(src, d[v] - box_.lo[v]);
      dst = std::max(dst, box_.hi[v] - d[v]);
    }
    return std::min(src, dst);
  }

  // Removing a path of a scenario's decomposition (alone or jointly with the
  // scenarios that carry it too), and rerouting it.
  void removals(const Flows& f, std::size_t i, const std::vector<char>& active,
                const std::vector<int>& fixed, Best& best) const {
    const auto dec = good_decomposition(g_, remove_cycles(g_, f[i]));
    std::vector<NodeMeasure> d;
    for (const auto& fl : f) d.push_back(boundary_of_flow(g_, fl));
    for (const auto& item : dec.items) {
      const Path& p = item.path;
      for (double m : detail::quanta(opts_.delta, item.weight)) {
        Flows cand = f;
        add_path(cand[i], p, -m);
        offer_candidate(best, std::move(cand), {i}, fixed);

        Flows joint = f;
        add_path(joint[i], p, -m);
        std::vector<std::size_t> jt{i};
        for (std::size_t j = 0; j < f.size(); ++j) {
          if (j == i || !active[j]) continue;
          bool carries = d[j][p.start()] + m <= box_.hi[p.start()] + kMeasureTol &&
                         d[j][p.end()] - m >= box_.lo[p.end()] - kMeasureTol;
          for (std::size_t k = 0; carries && k < p.edges.size(); ++k)
            carries = detail::traversal_sign(g_, p, k) * f[j][p.edges[k]] >= m - kMeasureTol;
          if (!carries) continue;
          add_path(joint[j], p, -m);
          jt.push_back(j);
        }
        if (jt.size() > 1) offer_candidate(best, std::move(joint), jt, fixed);
      }
      Flows without = f;
      add_path(without[i], p, -item.weight);
      detail::snap_all(without[i]);
      insertions(without, i, {item.weight}, active, fixed, best);
    }
  }

  RunResult descend(Flows f, const std::vector<char>& active, const std::vector<int>& fixed) const {
    RunResult r;
    double E = eval(f);
    r.trace.push_back(E);
    for (;;) {
      if (r.iterations >= opts_.max_iters) {
        r.budget_exhausted = true;
        break;
      }
      Flows a = recompute_flows(f, active, fixed);
      if (consistent(a, fixed)) {
        const double Ea = eval(a);
        if (Ea < E - opts_.tol) {
          f = std::move(a);
          E = Ea;
          r.trace.push_back(E);
          ++r.iterations;
          continue;
        }
      }
      Best best{E - opts_.tol, {}};
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (!active[i]) continue;
        const auto d = boundary_of_flow(g_, f[i]);
        insertions(f, i, detail::quanta(opts_.delta, max_slack(d)), active, fixed, best);
        removals(f, i, active, fixed, best);
      }
      if (!best.found) break;
      f = std::move(best.flows);
      E = best.energy;
      r.trace.push_back(E);
      ++r.iterations;
    }
    r.flows = std::move(f);
    r.energy = E;
    return r;
  }

  // A few random paths per scenario with random quantized masses.
  Flows random_start(std::uint64_t seed, const std::vector<int>& fixed) const {
    std::mt19937_64 rng(seed);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    Flows f(inst_.num_scenarios(), std::vector<double>(g_.num_edges(), 0.0));
    for (std::size_t i = 0; i < f.size(); ++i) {
      const int count = 1 + static_cast<int>(rng() % 2);
      for (int c = 0; c < count; ++c) {
        const auto d = boundary_of_flow(g_, f[i]);
        std::vector<VertexId> us, vs;
        for (VertexId v = 0; v < static_cast<VertexId>(d.size()); ++v) {
          if (d[v] - box_.lo[v] >= opts_.delta - kMeasureTol) us.push_back(v);
          if (box_.hi[v] - d[v] >= opts_.delta - kMeasureTol) vs.push_back(v);
        }
        if (us.empty() || vs.empty()) break;
        const VertexId u = us[rng() % us.size()];
        const VertexId v = vs[rng() % vs.size()];
        if (u == v) continue;
        const double cap = std::min(d[u] - box_.lo[u], box_.hi[v] - d[v]);
        const auto steps = static_cast<std::uint64_t>(std::floor(cap / opts_.delta + 1e-9));
        if (steps == 0) continue;
        const double m = opts_.delta * static_cast<double>(1 + rng() % steps);
        std::vector<double> jitter(g_.num_edges());
        for (double& x : jitter) x = 0.5 + uniform();
        const auto sigma = oriented_ ? effective_sigma(f, i, fixed) : fixed;
        const detail::ArcWeight w = [&](EdgeId e, int s) {
          if (!usable_[i][e]) return kInf;
          if (oriented_ && sigma[e] != 0 && sigma[e] != s) return kInf;
          return g_.edge(e).length * jitter[e];
        };
        const auto tree = detail::dijkstra(g_, u, w);
        if (tree.dist[v] == kInf) continue;
        add_path(f[i], detail::extract_path(tree, u, v), m);
        f[i] = remove_cycles(g_, f[i]);
      }
    }
    return f;
  }

 private:
  const Instance& inst_;
  const GeometricGraph& g_;
  SolveOptions opts_;
  bool oriented_;
  detail::BoundaryBox box_;
  std::vector<std::vector<char>> usable_;
};

// Every scenario served on the full network (capacity beta everywhere),
// routed along short paths. Descent from here prunes instead of grows, which
// reaches consolidated optima that single-path insertions cannot.
Flows saturated_start(const Instance& inst) {
  const auto& g = inst.graph;
  const std::vector<double> theta(g.num_edges(), std::max(inst.beta(), kMeasureTol));
  double total_length = 0.0;
  for (const Edge& e : g.edges()) total_length += e.length;
  const double scale = 1e-6 / std::max(total_length, 1e-12);
  Flows f;
  for (std::size_t i = 0; i < inst.num_scenarios(); ++i) {
    const FlowNetwork base = build_recovery_network(inst, theta, i);
    FlowNetwork net(base.num_nodes(), base.source(), base.sink());
    for (FlowArc a : base.arcs()) {
      if (a.edge >= 0) a.cost = scale * g.edge(a.edge).length;
      net.add_arc(a);
    }
    const MinCostFlowResult res = min_cost_flow(net);
    std::vector<double> flow(g.num_edges(), 0.0);
    for (std::size_t k = 0; k < net.arcs().size(); ++k)
      if (net.arcs()[k].edge >= 0) flow[net.arcs()[k].edge] += net.arcs()[k].sign * res.arc_flow[k];
    detail::snap_all(flow);
    f.push_back(remove_cycles(g, flow));
  }
  return f;
}

}  // namespace

SolveReport solve_eulerian(const Instance& inst, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opts.model == Model::lagrangian)
    throw ValidationError("model", "solve_eulerian needs an Eulerian model");
  if (!(opts.delta > 0.0)) throw ValidationError("delta", "mass quantum must be positive");
  const bool oriented = opts.model == Model::eulerian_oriented;
  const EulerianSearch search(inst, opts, oriented);
  const std::size_t S = inst.num_scenarios();
  const std::size_t E = inst.graph.num_edges();
  const Flows empty(S, std::vector<double>(E, 0.0));
  const std::vector<int> free_sigma(E, 0);
  const std::vector<char> all(S, 1);

  // Per-scenario independent optima.
  Flows independent = empty;
  detail::parallel_for(S, [&](std::size_t i) {
    std::vector<char> only(S, 0);
    only[i] = 1;
    independent[i] = search.descend(empty, only, free_sigma).flows[i];
  });

  // Starting points: (flows, fixed orientation).
  std::vector<std::pair<Flows, std::vector<int>>> starts;
  starts.emplace_back(empty, free_sigma);
  if (opts.restarts >= 1) starts.emplace_back(independent, free_sigma);
  if (opts.restarts >= 2) starts.emplace_back(saturated_start(inst), free_sigma);
  for (int r = 3; r <= opts.restarts; ++r)
    starts.emplace_back(search.random_start(opts.seed + static_cast<std::uint64_t>(r), free_sigma),
                        free_sigma);

  std::size_t contested_count = 0;
  if (oriented) {
    std::vector<EdgeId> contested;
    for (std::size_t e = 0; e < E; ++e) {
      int pos = 0, neg = 0;
      for (const auto& f : independent) {
        pos += f[e] > kSnapTol;
        neg += f[e] < -kSnapTol;
      }
      if (pos && neg) contested.push_back(static_cast<EdgeId>(e));
    }
    contested_count = contested.size();
    // Drop the starts that are not consistent in themselves.
    starts.erase(std::remove_if(starts.begin(), starts.end(),
                                [&](const auto& s) { return !search.consistent(s.first, s.second); }),
                 starts.end());
    auto project = [&](const std::vector<int>& sigma) {
      Flows f = independent;
      for (std::size_t i = 0; i < S; ++i) {
        bool ok = true;
        for (std::size_t e = 0; e < E; ++e)
          if (sigma[e] != 0 && sign_of(f[i][e]) == -sigma[e]) ok = false;
        if (!ok) f[i].assign(E, 0.0);
      }
      return f;
    };
    if (contested.size() <= 16) {
      for (std::uint32_t mask = 0; mask < (1u << contested.size()); ++mask) {
        std::vector<int> sigma(E, 0);
        for (std::size_t k = 0; k < contested.size(); ++k)
          sigma[contested[k]] = (mask >> k) & 1u ? -1 : +1;
        starts.emplace_back(project(sigma), sigma);
      }
    } else {
      std::vector<int> sigma(E, 0);
      for (EdgeId e : contested) sigma[e] = sign_of(independent[0][e]) ? sign_of(independent[0][e]) : 1;
      starts.emplace_back(project(sigma), sigma);
    }
  }

  std::vector<RunResult> runs(starts.size());
  detail::parallel_for(starts.size(), [&](std::size_t k) {
    runs[k] = search.descend(starts[k].first, all, starts[k].second);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    if (runs[k].energy < runs[best].energy) best = k;

  SolveReport rep;
  rep.options = opts;
  EulerianCompetitor c{theta_from_flows(runs[best].flows, E), runs[best].flows};
  rep.energy = eulerian_energy(inst, c);
  rep.certificate = check_eulerian_admissible(inst, c);
  rep.oriented_consistent = check_oriented_consistency(c);
  rep.eulerian = std::move(c);
  rep.trace = runs[best].trace;
  rep.diagnostics.iterations = runs[best].iterations;
  rep.diagnostics.runs = static_cast<int>(runs.size());
  rep.diagnostics.best_run = static_cast<int>(best);
  for (const auto& r : runs) rep.diagnostics.budget_exhausted |= r.budget_exhausted;
  rep.diagnostics.contested_edges = contested_count;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace rbot
