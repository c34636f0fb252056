#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "rbot/solver.hpp"
#include "solver_internal.hpp"

namespace rbot {

namespace {

using Weights = std::vector<std::vector<double>>;  // [scenario][path]

struct RunResult {
  Weights w;
  double energy = 0.0;
  std::vector<double> trace;
  int iterations = 0;
  bool budget_exhausted = false;
};

// Paths considered by the descent: per scenario the k shortest over usable
// edges, k shortest ignoring damage, and for each efficiency level tau the
// shortest path whose edges all have efficiency >= tau.
std::vector<Path> build_dictionary(const Instance& inst,
                                   const std::vector<ScenarioEfficiency>& eff, std::size_t k) {
  const auto& g = inst.graph;
  std::vector<Path> out;
  std::set<std::vector<EdgeId>> seen;
  auto take = [&](std::vector<Path> ps) {
    for (auto& p : ps)
      if (seen.insert(p.edges).second) out.push_back(std::move(p));
  };
  const auto sources = inst.boundary.source_vertices();
  const auto targets = inst.boundary.target_vertices();
  auto level = [&](std::size_t i, EdgeId e) {
    const Edge& ed = g.edge(e);
    return std::min({eff[i].edge[e], eff[i].vertex[ed.u], eff[i].vertex[ed.v]});
  };
  for (std::size_t i = 0; i < eff.size(); ++i) {
    std::vector<char> usable(g.num_edges());
    std::set<double> levels;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const double l = level(i, static_cast<EdgeId>(e));
      usable[e] = l > 0.0;
      if (l > 0.0) levels.insert(l);
    }
    for (VertexId u : sources)
      for (VertexId v : targets) {
        if (eff[i].vertex[u] <= 0.0 || eff[i].vertex[v] <= 0.0) continue;
        take(k_shortest_paths(g, usable, u, v, k));
      }
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
      std::vector<char> above(g.num_edges());
      for (std::size_t e = 0; e < g.num_edges(); ++e)
        above[e] = level(i, static_cast<EdgeId>(e)) >= *it;
      for (VertexId u : sources)
        for (VertexId v : targets) {
          if (eff[i].vertex[u] < *it || eff[i].vertex[v] < *it) continue;
          take(k_shortest_paths(g, above, u, v, 1));
        }
    }
  }
  for (VertexId u : sources)
    for (VertexId v : targets) take(k_shortest_paths(g, {}, u, v, k));
  return out;
}

class LagrangianSearch {
 public:
  LagrangianSearch(const Instance& inst, const SolveOptions& opts)
      : inst_(inst), g_(inst.graph), opts_(opts) {
    for (std::size_t i = 0; i < inst.num_scenarios(); ++i)
      eff_.push_back(scenario_efficiency(inst, i));
    paths_ = build_dictionary(inst, eff_, static_cast<std::size_t>(opts.path_dictionary_size));
    const std::size_t S = inst.num_scenarios();
    gain_.assign(S, std::vector<double>(paths_.size(), 0.0));
    for (std::size_t i = 0; i < S; ++i)
      for (std::size_t p = 0; p < paths_.size(); ++p) {
        const Path& path = paths_[p];
        gain_[i][p] = inst.scenarios[i].prob * path_efficiency(eff_[i], path) *
                      (inst.payoff.at(i, path.start()) + inst.payoff.at(i, path.end()));
      }
  }

  std::size_t num_paths() const { return paths_.size(); }
  const std::vector<Path>& paths() const { return paths_; }

  LagrangianCompetitor competitor(const Weights& w) const {
    TrafficPlan plan;
    for (std::size_t p = 0; p < paths_.size(); ++p) {
      double wp = 0.0;
      for (const auto& wi : w) wp = std::max(wp, wi[p]);
      plan.push_back({paths_[p], wp});
    }
    return make_lagrangian_competitor(std::move(plan), w);
  }

  double exact(const Weights& w) const { return lagrangian_energy(inst_, competitor(w)).energy; }

  RunResult descend(Weights w, const std::vector<char>& active) const {
    State st(*this, std::move(w));
    RunResult r;
    double E = exact(st.w);
    r.trace.push_back(E);
    for (;;) {
      if (r.iterations >= opts_.max_iters) {
        r.budget_exhausted = true;
        break;
      }
      Move best;
      best.delta = -opts_.tol;
      propose(st, active, best);
      if (!best.valid) break;
      st.apply(best);
      E = exact(st.w);
      r.trace.push_back(E);
      ++r.iterations;
    }
    r.energy = E;
    r.w = std::move(st.w);
    return r;
  }

  Weights random_start(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    State st(*this, Weights(inst_.num_scenarios(), std::vector<double>(paths_.size(), 0.0)));
    for (std::size_t i = 0; i < inst_.num_scenarios(); ++i) {
      std::vector<std::size_t> useful;
      for (std::size_t p = 0; p < paths_.size(); ++p)
        if (gain_[i][p] > 0.0) useful.push_back(p);
      if (useful.empty()) continue;
      const int count = 1 + static_cast<int>(rng() % 2);
      for (int c = 0; c < count; ++c) {
        const std::size_t p = useful[rng() % useful.size()];
        const double slack = st.slack(i, p);
        const auto steps = static_cast<std::uint64_t>(std::floor(slack / opts_.delta + 1e-9));
        if (steps == 0) continue;
        Move m;
        m.kind = Move::add;
        m.i = i;
        m.p = p;
        m.m = opts_.delta * static_cast<double>(1 + rng() % steps);
        st.apply(m);
      }
    }
    return st.w;
  }

 private:
  struct Move {
    enum Kind { add, joint_add, remove, lower, transfer } kind = add;
    std::size_t i = 0, p = 0, q = 0;
    double m = 0.0;
    double delta = 0.0;
    bool valid = false;
  };

  struct State {
    const LagrangianSearch& s;
    Weights w;
    std::vector<double> wp;     // max_i w[i][p]
    std::vector<double> theta;  // per edge
    std::vector<std::vector<double>> out_used, in_used;  // [i][vertex]

    State(const LagrangianSearch& search, Weights weights) : s(search), w(std::move(weights)) {
      const std::size_t P = s.paths_.size();
      wp.assign(P, 0.0);
      theta.assign(s.g_.num_edges(), 0.0);
      out_used.assign(w.size(), std::vector<double>(s.g_.num_vertices(), 0.0));
      in_used = out_used;
      for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          wp[p] = std::max(wp[p], w[i][p]);
          out_used[i][s.paths_[p].start()] += w[i][p];
          in_used[i][s.paths_[p].end()] += w[i][p];
        }
        for (EdgeId e : s.paths_[p].edges) theta[e] += wp[p];
      }
    }

    double slack(std::size_t i, std::size_t p) const {
      const Path& path = s.paths_[p];
      return std::min(s.inst_.boundary.sources(path.start()) - out_used[i][path.start()],
                      s.inst_.boundary.targets(path.end()) - in_used[i][path.end()]);
    }

    double max_other(std::size_t p, std::size_t skip) const {
      double m = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j)
        if (j != skip) m = std::max(m, w[j][p]);
      return m;
    }

    // Change of the phi-mass when the plan weight of p becomes `nw`.
    double dphi(std::size_t p, double nw) const {
      const double d = nw - wp[p];
      if (d == 0.0) return 0.0;
      double out = 0.0;
      for (EdgeId e : s.paths_[p].edges) {
        const double len = s.g_.edge(e).length;
        out += len * (phi_eval(s.inst_.cost, std::max(0.0, theta[e] + d)) -
                      phi_eval(s.inst_.cost, theta[e]));
      }
      return out;
    }

    void set_wp(std::size_t p, double nw) {
      const double d = nw - wp[p];
      wp[p] = nw;
      for (EdgeId e : s.paths_[p].edges) {
        theta[e] += d;
        if (std::abs(theta[e]) < kSnapTol) theta[e] = 0.0;
      }
    }

    void set_w(std::size_t i, std::size_t p, double nw) {
      const double d = nw - w[i][p];
      w[i][p] = nw < kSnapTol ? 0.0 : nw;
      out_used[i][s.paths_[p].start()] += d;
      in_used[i][s.paths_[p].end()] += d;
      set_wp(p, std::max(max_other(p, i), w[i][p]));
    }

    void apply(const Move& mv) {
      switch (mv.kind) {
        case Move::add:
          set_w(mv.i, mv.p, w[mv.i][mv.p] + mv.m);
          break;
        case Move::joint_add:
          for (std::size_t i = 0; i < w.size(); ++i)
            if (s.gain_[i][mv.p] > 0.0 && slack(i, mv.p) >= mv.m - kMeasureTol)
              set_w(i, mv.p, w[i][mv.p] + mv.m);
          break;
        case Move::remove:
          set_w(mv.i, mv.p, w[mv.i][mv.p] - mv.m);
          break;
        case Move::lower: {
          const double level = wp[mv.p] - mv.m;
          for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i][mv.p] > level) set_w(i, mv.p, level);
          break;
        }
        case Move::transfer:
          set_w(mv.i, mv.p, w[mv.i][mv.p] - mv.m);
          set_w(mv.i, mv.q, w[mv.i][mv.q] + mv.m);
          break;
      }
    }
  };

  void consider(Move& best, Move mv, double delta) const {
    if (delta < best.delta) {
      mv.delta = delta;
      mv.valid = true;
      best = mv;
    }
  }

  void propose(State& st, const std::vector<char>& active, Move& best) const {
    const std::size_t S = st.w.size(), P = paths_.size();
    const double dq = opts_.delta;
    for (std::size_t p = 0; p < P; ++p) {
      // Single-scenario add and remove.
      for (std::size_t i = 0; i < S; ++i) {
        if (!active[i]) continue;
        if (gain_[i][p] > 0.0) {
          for (double m : detail::quanta(dq, st.slack(i, p))) {
            const double nw = std::max(st.wp[p], st.w[i][p] + m);
            consider(best, {Move::add, i, p, 0, m}, st.dphi(p, nw) - gain_[i][p] * m);
          }
        }
        for (double m : detail::quanta(dq, st.w[i][p])) {
          const double nw = std::max(st.max_other(p, i), st.w[i][p] - m);
          consider(best, {Move::remove, i, p, 0, m}, st.dphi(p, nw) + gain_[i][p] * m);
        }
      }
      // Joint add: every active scenario that gains and has room.
      double room = detail::kInf;
      std::vector<std::size_t> joiners;
      for (std::size_t i = 0; i < S; ++i)
        if (active[i] && gain_[i][p] > 0.0 && st.slack(i, p) > kMeasureTol) {
          joiners.push_back(i);
          room = std::min(room, st.slack(i, p));
        }
      if (joiners.size() > 1) {
        for (double m : detail::quanta(dq, room)) {
          double nw = st.wp[p], gain = 0.0;
          for (std::size_t i : joiners) {
            nw = std::max(nw, st.w[i][p] + m);
            gain += gain_[i][p] * m;
          }
          // apply() re-derives the joiners from slack >= m, which holds for all of them.
          consider(best, {Move::joint_add, 0, p, 0, m}, st.dphi(p, nw) - gain);
        }
      }
      // Lower the plan weight, clipping every sub-plan.
      for (double m : detail::quanta(dq, st.wp[p])) {
        const double level = st.wp[p] - m;
        double loss = 0.0;
        bool touches_inactive = false;
        for (std::size_t i = 0; i < S; ++i)
          if (st.w[i][p] > level) {
            loss += gain_[i][p] * (st.w[i][p] - level);
            touches_inactive |= !active[i];
          }
        if (!touches_inactive) consider(best, {Move::lower, 0, p, 0, m}, st.dphi(p, level) + loss);
      }
    }
    // Transfers between paths of one scenario.
    for (std::size_t i = 0; i < S; ++i) {
      if (!active[i]) continue;
      for (std::size_t p = 0; p < P; ++p) {
        if (st.w[i][p] <= 0.0) continue;
        for (std::size_t q = 0; q < P; ++q) {
          if (q == p || gain_[i][q] <= 0.0) continue;
          const Path& pp = paths_[p];
          const Path& pq = paths_[q];
          for (double m : detail::quanta(dq, st.w[i][p])) {
            const double room =
                std::min(inst_.boundary.sources(pq.start()) - st.out_used[i][pq.start()] +
                             (pq.start() == pp.start() ? m : 0.0),
                         inst_.boundary.targets(pq.end()) - st.in_used[i][pq.end()] +
                             (pq.end() == pp.end() ? m : 0.0));
            if (room < m - kMeasureTol) continue;
            // Exact phi change: apply to a scratch copy of the two paths' edges.
            const double nwp = std::max(st.max_other(p, i), st.w[i][p] - m);
            const double nwq = std::max(st.wp[q], st.w[i][q] + m);
            const double d = transfer_dphi(st, p, nwp, q, nwq);
            consider(best, {Move::transfer, i, p, q, m},
                     d + gain_[i][p] * m - gain_[i][q] * m);
          }
        }
      }
    }
  }

  double transfer_dphi(const State& st, std::size_t p, double nwp, std::size_t q,
                       double nwq) const {
    std::map<EdgeId, double> change;
    for (EdgeId e : paths_[p].edges) change[e] += nwp - st.wp[p];
    for (EdgeId e : paths_[q].edges) change[e] += nwq - st.wp[q];
    double out = 0.0;
    for (const auto& [e, d] : change) {
      if (d == 0.0) continue;
      out += g_.edge(e).length * (phi_eval(inst_.cost, std::max(0.0, st.theta[e] + d)) -
                                  phi_eval(inst_.cost, st.theta[e]));
    }
    return out;
  }

  const Instance& inst_;
  const GeometricGraph& g_;
  SolveOptions opts_;
  std::vector<ScenarioEfficiency> eff_;
  std::vector<Path> paths_;
  std::vector<std::vector<double>> gain_;  // a_i * efficiency * (h(start) + h(end))
};

}  // namespace

SolveReport solve_lagrangian(const Instance& inst, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opts.model != Model::lagrangian)
    throw ValidationError("model", "solve_lagrangian needs the lagrangian model");
  if (!(opts.delta > 0.0)) throw ValidationError("delta", "mass quantum must be positive");
  const LagrangianSearch search(inst, opts);
  const std::size_t S = inst.num_scenarios(), P = search.num_paths();
  const Weights empty(S, std::vector<double>(P, 0.0));
  const std::vector<char> all(S, 1);

  Weights independent = empty;
  detail::parallel_for(S, [&](std::size_t i) {
    std::vector<char> only(S, 0);
    only[i] = 1;
    independent[i] = search.descend(empty, only).w[i];
  });

  std::vector<Weights> starts{empty};
  if (opts.restarts >= 1) starts.push_back(independent);
  for (int r = 2; r <= opts.restarts; ++r)
    starts.push_back(search.random_start(opts.seed + static_cast<std::uint64_t>(r)));

  std::vector<RunResult> runs(starts.size());
  detail::parallel_for(starts.size(),
                       [&](std::size_t k) { runs[k] = search.descend(starts[k], all); });
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    if (runs[k].energy < runs[best].energy) best = k;

  SolveReport rep;
  rep.options = opts;
  LagrangianCompetitor c = search.competitor(runs[best].w);
  rep.energy = lagrangian_energy(inst, c);
  rep.certificate = check_lagrangian_admissible(inst, c);
  rep.lagrangian = std::move(c);
  rep.trace = runs[best].trace;
  rep.diagnostics.iterations = runs[best].iterations;
  rep.diagnostics.runs = static_cast<int>(runs.size());
  rep.diagnostics.best_run = static_cast<int>(best);
  for (const auto& r : runs) rep.diagnostics.budget_exhausted |= r.budget_exhausted;
  rep.diagnostics.dictionary_size = P;
  rep.diagnostics.validation = validate_instance(inst);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace rbot
