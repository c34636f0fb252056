#include "rbot/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

#include "rbot/decomposition.hpp"
#include "rbot/energy.hpp"

namespace rbot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ResidualArc {
  int to;
  double cap;
  double cost;
  int rev;   // index of the paired arc in `adj[to]`
  int orig;  // arc index in the network
  int dir;   // +1 forward, -1 backward
};

struct Residual {
  std::vector<std::vector<ResidualArc>> adj;
};

Residual make_residual(const FlowNetwork& net, std::span<const double> arc_flow) {
  Residual r;
  r.adj.resize(net.num_nodes());
  const auto& arcs = net.arcs();
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const FlowArc& a = arcs[k];
    const double f = arc_flow.empty() ? 0.0 : arc_flow[k];
    const int i = static_cast<int>(r.adj[a.from].size());
    const int j = static_cast<int>(r.adj[a.to].size()) + (a.from == a.to ? 1 : 0);
    r.adj[a.from].push_back({a.to, a.capacity - f, a.cost, j, static_cast<int>(k), +1});
    r.adj[a.to].push_back({a.from, f, -a.cost, i, static_cast<int>(k), -1});
  }
  return r;
}

void validate(const FlowNetwork& net) {
  const int n = net.num_nodes();
  for (const FlowArc& a : net.arcs()) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n)
      throw ValidationError("network", "arc endpoint out of range");
    if (!(a.capacity >= 0.0) || !std::isfinite(a.capacity))
      throw ValidationError("network", "arc capacity must be finite and >= 0");
    if (!std::isfinite(a.cost)) throw ValidationError("network", "arc cost must be finite");
    if (a.cost < 0.0 && a.from != net.source() && a.to != net.sink())
      throw ValidationError("network", "negative cost away from the source and sink arcs");
  }
}

}  // namespace

FlowNetwork::FlowNetwork(int num_nodes, int source, int sink)
    : num_nodes_(num_nodes), source_(source), sink_(sink) {
  if (num_nodes < 2 || source < 0 || source >= num_nodes || sink < 0 || sink >= num_nodes ||
      source == sink)
    throw ValidationError("network", "bad node count or terminals");
}

int FlowNetwork::add_arc(const FlowArc& arc) {
  arcs_.push_back(arc);
  return static_cast<int>(arcs_.size()) - 1;
}

MinCostFlowResult min_cost_flow(const FlowNetwork& net) {
  validate(net);
  const int n = net.num_nodes();
  const int s = net.source(), t = net.sink();
  Residual r = make_residual(net, {});

  // Initial potentials: Bellman-Ford from s over arcs with capacity.
  std::vector<double> pot(n, kInf);
  pot[s] = 0.0;
  for (int round = 0; round < n; ++round) {
    bool changed = false;
    for (int u = 0; u < n; ++u) {
      if (pot[u] == kInf) continue;
      for (const auto& a : r.adj[u])
        if (a.cap > kSnapTol && pot[u] + a.cost < pot[a.to]) {
          pot[a.to] = pot[u] + a.cost;
          changed = true;
        }
    }
    if (!changed) break;
    if (round == n - 1) throw ValidationError("network", "negative cycle in the initial network");
  }
  for (double& p : pot)
    if (p == kInf) p = 0.0;  // unreachable nodes stay unreachable

  MinCostFlowResult out;
  out.arc_flow.assign(net.arcs().size(), 0.0);
  std::vector<double> dist(n);
  std::vector<std::pair<int, int>> parent(n);  // (node, arc index in adj[node])
  const int max_aug = 4 * static_cast<int>(net.arcs().size()) * n + 16;

  for (;;) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), std::pair{-1, -1});
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0.0;
    pq.push({0.0, s});
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (int k = 0; k < static_cast<int>(r.adj[u].size()); ++k) {
        const auto& a = r.adj[u][k];
        if (a.cap <= kSnapTol) continue;
        const double rc = std::max(0.0, a.cost + pot[u] - pot[a.to]);
        if (d + rc < dist[a.to]) {
          dist[a.to] = d + rc;
          parent[a.to] = {u, k};
          pq.push({dist[a.to], a.to});
        }
      }
    }
    if (dist[t] == kInf) break;
    const double path_cost = dist[t] + pot[t] - pot[s];
    if (path_cost >= -kSnapTol) break;
    for (int v = 0; v < n; ++v)
      if (dist[v] < kInf) pot[v] += dist[v];

    double bottleneck = kInf;
    for (int v = t; v != s; v = parent[v].first)
      bottleneck = std::min(bottleneck, r.adj[parent[v].first][parent[v].second].cap);
    for (int v = t; v != s; v = parent[v].first) {
      auto& a = r.adj[parent[v].first][parent[v].second];
      a.cap -= bottleneck;
      if (a.cap < kSnapTol) a.cap = 0.0;
      r.adj[a.to][a.rev].cap += bottleneck;
      out.arc_flow[a.orig] += a.dir * bottleneck;
    }
    out.total_cost += bottleneck * path_cost;
    if (++out.augmentations > max_aug)
      throw std::logic_error("min_cost_flow: augmentation budget exceeded");
  }
  for (double& f : out.arc_flow)
    if (std::abs(f) < kSnapTol) f = 0.0;
  // Recompute the cost from arc flows so it matches them exactly.
  out.total_cost = 0.0;
  for (std::size_t k = 0; k < out.arc_flow.size(); ++k)
    out.total_cost += out.arc_flow[k] * net.arcs()[k].cost;
  return out;
}

bool has_negative_residual_cycle(const FlowNetwork& net, std::span<const double> arc_flow,
                                 double tol) {
  if (arc_flow.size() != net.arcs().size()) throw ShapeError("arc flow has wrong length");
  const Residual r = make_residual(net, arc_flow);
  const int n = net.num_nodes();
  // Virtual root joined to every node at cost 0.
  std::vector<double> d(n, 0.0);
  for (int round = 0; round <= n; ++round) {
    bool changed = false;
    for (int u = 0; u < n; ++u)
      for (const auto& a : r.adj[u])
        if (a.cap > kSnapTol && d[u] + a.cost < d[a.to] - tol) {
          d[a.to] = d[u] + a.cost;
          changed = true;
        }
    if (!changed) return false;
  }
  return true;
}

nlohmann::ordered_json residual_to_json(const FlowNetwork& net,
                                        std::span<const double> arc_flow) {
  nlohmann::ordered_json j;
  j["format"] = 1;
  j["nodes"] = net.num_nodes();
  j["source"] = net.source();
  j["sink"] = net.sink();
  auto arcs = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < net.arcs().size(); ++k) {
    const FlowArc& a = net.arcs()[k];
    const double f = arc_flow.empty() ? 0.0 : arc_flow[k];
    arcs.push_back({{"from", a.from},
                    {"to", a.to},
                    {"capacity", a.capacity},
                    {"cost", a.cost},
                    {"flow", f},
                    {"residual_forward", a.capacity - f},
                    {"residual_backward", f},
                    {"edge", a.edge}});
  }
  j["arcs"] = std::move(arcs);
  return j;
}

FlowNetwork build_recovery_network(const Instance& inst, std::span<const double> theta,
                                   std::size_t scenario,
                                   std::optional<std::span<const int>> orientation) {
  const auto& g = inst.graph;
  if (theta.size() != g.num_edges()) throw ShapeError("theta has wrong length");
  if (scenario >= inst.num_scenarios()) throw ShapeError("scenario index out of range");
  const auto& sc = inst.scenarios[scenario];
  if (!sc.edge_mask)
    throw ValidationError("scenarios[" + std::to_string(scenario) + "].edge_mask",
                          "recovery flows need an edge mask");
  if (orientation && orientation->size() != g.num_edges())
    throw ShapeError("orientation has wrong length");

  const int n = static_cast<int>(g.num_vertices());
  FlowNetwork net(n + 2, n, n + 1);
  for (const Edge& e : g.edges()) {
    if (!(*sc.edge_mask)[e.id] || theta[e.id] <= kSnapTol) continue;
    const int sigma = orientation ? (*orientation)[e.id] : 0;
    if (sigma >= 0) net.add_arc({e.u, e.v, theta[e.id], 0.0, e.id, +1});
    if (sigma <= 0) net.add_arc({e.v, e.u, theta[e.id], 0.0, e.id, -1});
  }
  for (VertexId v = 0; v < n; ++v) {
    const double h = inst.payoff.at(scenario, v);
    if (inst.boundary.sources(v) > 0.0) net.add_arc({n, v, inst.boundary.sources(v), -h});
  }
  for (VertexId v = 0; v < n; ++v) {
    const double h = inst.payoff.at(scenario, v);
    if (inst.boundary.targets(v) > 0.0) net.add_arc({v, n + 1, inst.boundary.targets(v), -h});
  }
  return net;
}

std::vector<double> max_payoff_flow(const Instance& inst, std::span<const double> theta,
                                    std::size_t scenario, bool oriented,
                                    std::optional<std::span<const int>> orientation) {
  if (oriented && !orientation)
    throw ValidationError("orientation", "oriented mode needs an orientation");
  const FlowNetwork net =
      build_recovery_network(inst, theta, scenario, oriented ? orientation : std::nullopt);
  const MinCostFlowResult res = min_cost_flow(net);
  std::vector<double> T(inst.graph.num_edges(), 0.0);
  for (std::size_t k = 0; k < net.arcs().size(); ++k) {
    const FlowArc& a = net.arcs()[k];
    if (a.edge >= 0) T[a.edge] += a.sign * res.arc_flow[k];
  }
  return remove_cycles(inst.graph, T);
}

double scenario_payoff(const Instance& inst, std::size_t scenario,
                       std::span<const double> flow) {
  const NodeMeasure d = boundary_of_flow(inst.graph, flow);
  double s = 0.0;
  for (std::size_t v = 0; v < d.size(); ++v)
    s += inst.payoff.at(scenario, static_cast<VertexId>(v)) * std::abs(d[v]);
  return inst.scenarios.at(scenario).prob * s;
}

}  // namespace rbot
