#include <chrono>
#include <cmath>
#include <functional>
#include <set>

#include "rbot/solver.hpp"
#include "solver_internal.hpp"

namespace rbot {

namespace {

using Units = std::vector<int>;

constexpr std::size_t kMaxPerScenario = 400000;
constexpr std::size_t kMaxCombinations = 20000000;
constexpr double kTieTol = 1e-9;

int units_of(double mass, double delta) {
  return static_cast<int>(std::floor(mass / delta + 1e-9));
}

// Every vector of path weights (in quanta) whose per-vertex totals stay
// within the atom caps. `allowed[p]` false pins path p to zero.
void enumerate_weights(const std::vector<Path>& paths, const std::vector<char>& allowed,
                       Units src_cap, Units dst_cap,
                       const std::function<void(const Units&)>& emit) {
  Units w(paths.size(), 0);
  std::size_t count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == paths.size()) {
      if (++count > kMaxPerScenario)
        throw SizeGuardError("oracle enumeration budget exceeded");
      emit(w);
      return;
    }
    const VertexId u = paths[k].start(), v = paths[k].end();
    const int top = allowed[k] ? std::min(src_cap[u], dst_cap[v]) : 0;
    for (int x = 0; x <= top; ++x) {
      w[k] = x;
      src_cap[u] -= x;
      dst_cap[v] -= x;
      rec(k + 1);
      src_cap[u] += x;
      dst_cap[v] += x;
    }
    w[k] = 0;
  };
  rec(0);
}

struct Caps {
  Units src, dst;
};

Caps atom_caps(const Instance& inst, double delta) {
  Caps c;
  for (std::size_t v = 0; v < inst.graph.num_vertices(); ++v) {
    c.src.push_back(units_of(inst.boundary.sources(static_cast<VertexId>(v)), delta));
    c.dst.push_back(units_of(inst.boundary.targets(static_cast<VertexId>(v)), delta));
  }
  return c;
}

std::vector<double> phi_table(const CostSpec& cost, double delta, int max_units) {
  std::vector<double> t(static_cast<std::size_t>(max_units) + 1);
  for (int k = 0; k <= max_units; ++k) t[k] = phi_eval(cost, k * delta);
  return t;
}

void check_combinations(const std::vector<std::size_t>& sizes) {
  double total = 1.0;
  for (std::size_t s : sizes) total *= static_cast<double>(std::max<std::size_t>(s, 1));
  if (total > static_cast<double>(kMaxCombinations))
    throw SizeGuardError("oracle combination budget exceeded");
}

SolveReport eulerian_oracle(const Instance& inst, const SolveOptions& opts) {
  const auto& g = inst.graph;
  if (g.num_edges() > kOracleMaxEdges)
    throw SizeGuardError("oracle limited to " + std::to_string(kOracleMaxEdges) +
                         " edges, instance has " + std::to_string(g.num_edges()));
  const bool oriented = opts.model == Model::eulerian_oriented;
  const double delta = opts.delta;
  const std::size_t S = inst.num_scenarios(), E = g.num_edges();
  const Caps caps = atom_caps(inst, delta);

  // Distinct quantized flows per scenario, with their pay-off.
  std::vector<std::vector<Units>> flows(S);
  std::vector<std::vector<double>> payoff(S);
  int max_units = 0;
  for (std::size_t i = 0; i < S; ++i) {
    const auto& mask = inst.scenarios[i].edge_mask;
    if (!mask)
      throw ValidationError("scenarios[" + std::to_string(i) + "].edge_mask",
                            "the Eulerian model needs an edge mask per scenario");
    const std::vector<char> usable(mask->begin(), mask->end());
    const auto paths = enumerate_simple_paths(inst, usable, 64);
    std::set<Units> distinct;
    enumerate_weights(paths, std::vector<char>(paths.size(), 1), caps.src, caps.dst,
                      [&](const Units& w) {
                        Units f(E, 0);
                        for (std::size_t p = 0; p < paths.size(); ++p)
                          for (std::size_t k = 0; k < paths[p].edges.size(); ++k)
                            f[paths[p].edges[k]] += detail::traversal_sign(g, paths[p], k) * w[p];
                        distinct.insert(std::move(f));
                      });
    for (const Units& f : distinct) {
      std::vector<double> fd(E);
      for (std::size_t e = 0; e < E; ++e) {
        fd[e] = f[e] * delta;
        max_units = std::max(max_units, std::abs(f[e]));
      }
      const NodeMeasure d = boundary_of_flow(g, fd);
      double s = 0.0;
      for (std::size_t v = 0; v < d.size(); ++v)
        s += inst.payoff.at(i, static_cast<VertexId>(v)) * std::abs(d[v]);
      flows[i].push_back(f);
      payoff[i].push_back(inst.scenarios[i].prob * s);
    }
  }
  std::vector<std::size_t> sizes;
  for (const auto& f : flows) sizes.push_back(f.size());
  check_combinations(sizes);
  const auto phi = phi_table(inst.cost, delta, max_units);

  std::vector<std::size_t> choice(S, 0), best_choice(S, 0);
  double best = detail::kInf;
  std::size_t ties = 0, candidates = 0;
  std::vector<Units> theta_stack(S + 1, Units(E, 0));
  std::vector<Units> sign_stack(S + 1, Units(E, 0));
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double pay) {
    if (i == S) {
      ++candidates;
      double m = 0.0;
      for (std::size_t e = 0; e < E; ++e) m += g.edge(static_cast<EdgeId>(e)).length * phi[theta_stack[S][e]];
      const double en = m - pay;
      if (en < best - kTieTol) {
        best = en;
        best_choice = choice;
        ties = 1;
      } else if (std::abs(en - best) <= kTieTol) {
        ++ties;
        if (en < best) {
          best = en;
          best_choice = choice;
        }
      }
      return;
    }
    for (std::size_t k = 0; k < flows[i].size(); ++k) {
      const Units& f = flows[i][k];
      bool ok = true;
      for (std::size_t e = 0; e < E; ++e) {
        const int s = (f[e] > 0) - (f[e] < 0);
        const int prev = sign_stack[i][e];
        if (oriented && s != 0 && prev != 0 && s != prev) {
          ok = false;
          break;
        }
        sign_stack[i + 1][e] = prev != 0 ? prev : s;
        theta_stack[i + 1][e] = std::max(theta_stack[i][e], std::abs(f[e]));
      }
      if (!ok) continue;
      choice[i] = k;
      rec(i + 1, pay + payoff[i][k]);
    }
  };
  rec(0, 0.0);

  SolveReport rep;
  rep.options = opts;
  rep.oracle = true;
  EulerianCompetitor c;
  for (std::size_t i = 0; i < S; ++i) {
    std::vector<double> fd(E, 0.0);
    if (!flows[i].empty())
      for (std::size_t e = 0; e < E; ++e) fd[e] = flows[i][best_choice[i]][e] * delta;
    c.flows.push_back(std::move(fd));
  }
  c.theta = theta_from_flows(c.flows, E);
  rep.energy = eulerian_energy(inst, c);
  rep.certificate = check_eulerian_admissible(inst, c);
  rep.oriented_consistent = check_oriented_consistency(c);
  rep.eulerian = std::move(c);
  rep.trace = {rep.energy.energy};
  rep.diagnostics.runs = 1;
  rep.diagnostics.oracle_candidates = candidates;
  rep.diagnostics.oracle_ties = ties;
  return rep;
}

SolveReport lagrangian_oracle(const Instance& inst, const SolveOptions& opts) {
  const auto& g = inst.graph;
  const double delta = opts.delta;
  const std::size_t S = inst.num_scenarios(), E = g.num_edges();
  const auto paths = enumerate_simple_paths(inst, {}, kOracleMaxPaths);
  const std::size_t P = paths.size();
  const Caps caps = atom_caps(inst, delta);

  std::vector<std::vector<Units>> subs(S);
  std::vector<std::vector<double>> gains(S);
  int max_units = 0;
  for (std::size_t i = 0; i < S; ++i) {
    const ScenarioEfficiency eff = scenario_efficiency(inst, i);
    std::vector<double> unit_gain(P);
    std::vector<char> allowed(P);
    for (std::size_t p = 0; p < P; ++p) {
      const double pe = path_efficiency(eff, paths[p]);
      allowed[p] = pe > 0.0;
      unit_gain[p] = inst.scenarios[i].prob * pe * delta *
                     (inst.payoff.at(i, paths[p].start()) + inst.payoff.at(i, paths[p].end()));
    }
    enumerate_weights(paths, allowed, caps.src, caps.dst, [&](const Units& w) {
      double gsum = 0.0;
      for (std::size_t p = 0; p < P; ++p) {
        gsum += unit_gain[p] * w[p];
        max_units = std::max(max_units, w[p]);
      }
      subs[i].push_back(w);
      gains[i].push_back(gsum);
    });
  }
  std::vector<std::size_t> sizes;
  for (const auto& s : subs) sizes.push_back(s.size());
  check_combinations(sizes);
  const auto phi = phi_table(inst.cost, delta, max_units * static_cast<int>(std::max<std::size_t>(P, 1)));

  std::vector<std::size_t> choice(S, 0), best_choice(S, 0);
  double best = detail::kInf;
  std::size_t ties = 0, candidates = 0;
  std::vector<Units> wp_stack(S + 1, Units(P, 0));
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double gain) {
    if (i == S) {
      ++candidates;
      Units theta(E, 0);
      for (std::size_t p = 0; p < P; ++p)
        if (wp_stack[S][p] > 0)
          for (EdgeId e : paths[p].edges) theta[e] += wp_stack[S][p];
      double m = 0.0;
      for (std::size_t e = 0; e < E; ++e)
        if (theta[e] > 0) m += g.edge(static_cast<EdgeId>(e)).length * phi[theta[e]];
      const double en = m - gain;
      if (en < best - kTieTol) {
        best = en;
        best_choice = choice;
        ties = 1;
      } else if (std::abs(en - best) <= kTieTol) {
        ++ties;
        if (en < best) {
          best = en;
          best_choice = choice;
        }
      }
      return;
    }
    for (std::size_t k = 0; k < subs[i].size(); ++k) {
      for (std::size_t p = 0; p < P; ++p)
        wp_stack[i + 1][p] = std::max(wp_stack[i][p], subs[i][k][p]);
      choice[i] = k;
      rec(i + 1, gain + gains[i][k]);
    }
  };
  rec(0, 0.0);

  TrafficPlan plan;
  std::vector<std::vector<double>> sub(S, std::vector<double>(P, 0.0));
  for (std::size_t p = 0; p < P; ++p) {
    int wp = 0;
    for (std::size_t i = 0; i < S; ++i) {
      const int w = subs[i].empty() ? 0 : subs[i][best_choice[i]][p];
      sub[i][p] = w * delta;
      wp = std::max(wp, w);
    }
    plan.push_back({paths[p], wp * delta});
  }
  SolveReport rep;
  rep.options = opts;
  rep.oracle = true;
  LagrangianCompetitor c = make_lagrangian_competitor(std::move(plan), std::move(sub));
  rep.energy = lagrangian_energy(inst, c);
  rep.certificate = check_lagrangian_admissible(inst, c);
  rep.lagrangian = std::move(c);
  rep.trace = {rep.energy.energy};
  rep.diagnostics.runs = 1;
  rep.diagnostics.oracle_candidates = candidates;
  rep.diagnostics.oracle_ties = ties;
  rep.diagnostics.dictionary_size = P;
  rep.diagnostics.validation = validate_instance(inst);
  return rep;
}

}  // namespace

SolveReport brute_force_oracle(const Instance& inst, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(opts.delta > 0.0)) throw ValidationError("delta", "mass quantum must be positive");
  SolveReport rep = opts.model == Model::lagrangian ? lagrangian_oracle(inst, opts)
                                                    : eulerian_oracle(inst, opts);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace rbot
