#pragma once

// Per-scenario inner problem: for fixed capacities, the recovery flow with
// the largest pay-off is a min-cost flow whose only negative costs are the
// rewards on the injection and extraction arcs.

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbot/model.hpp"

namespace rbot {

struct FlowArc {
  int from = 0;
  int to = 0;
  double capacity = 0.0;
  double cost = 0.0;
  // Instance edge and traversal sign for graph arcs; -1 / 0 for s and t arcs.
  EdgeId edge = -1;
  int sign = 0;
};

class FlowNetwork {
 public:
  FlowNetwork(int num_nodes, int source, int sink);

  int add_arc(const FlowArc& arc);

  int num_nodes() const noexcept { return num_nodes_; }
  int source() const noexcept { return source_; }
  int sink() const noexcept { return sink_; }
  const std::vector<FlowArc>& arcs() const noexcept { return arcs_; }

 private:
  int num_nodes_;
  int source_;
  int sink_;
  std::vector<FlowArc> arcs_;
};

struct MinCostFlowResult {
  std::vector<double> arc_flow;  // parallel to FlowNetwork::arcs()
  double total_cost = 0.0;
  int augmentations = 0;
};

// Successive shortest paths with node potentials. Stops as soon as the
// cheapest augmenting path has nonnegative cost. Ties in Dijkstra are broken
// by smallest node id. Throws ValidationError on a malformed network.
MinCostFlowResult min_cost_flow(const FlowNetwork& net);

// Bellman-Ford over the residual network; true if some residual cycle has
// cost below -tol. An optimal flow has none.
bool has_negative_residual_cycle(const FlowNetwork& net, std::span<const double> arc_flow,
                                 double tol = kMeasureTol);

nlohmann::ordered_json residual_to_json(const FlowNetwork& net,
                                        std::span<const double> arc_flow);

// Network for scenario i under capacities theta. Masked edges and edges with
// zero capacity are omitted. With an orientation, an edge with sign +1 keeps
// only u->v, -1 only v->u, and 0 keeps both.
FlowNetwork build_recovery_network(const Instance& inst, std::span<const double> theta,
                                   std::size_t scenario,
                                   std::optional<std::span<const int>> orientation = std::nullopt);

// Signed, cycle-free flow maximizing sum_v h(i,v)|dT(v)| subject to
// |T_e| <= theta_e, T = 0 on masked edges and dT ⪯ nu. Throws
// ValidationError if the scenario has no edge mask.
std::vector<double> max_payoff_flow(const Instance& inst, std::span<const double> theta,
                                    std::size_t scenario, bool oriented = false,
                                    std::optional<std::span<const int>> orientation = std::nullopt);

// a_i * sum_v h(i,v) |dT(v)|
double scenario_payoff(const Instance& inst, std::size_t scenario,
                       std::span<const double> flow);

}  // namespace rbot
