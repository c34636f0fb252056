#pragma once

// Energy functionals for both formulations.
//
//   Eulerian:   E(theta, {T_i}) = sum_e len_e phi(theta_e)
//                                 - sum_i a_i sum_v h(i,v) |dT_i(v)|
//   Lagrangian: E(P, {P_i})     = M^phi(P)
//                                 - sum_i a_i sum_p f_i(p) w_ip (h(i,start) + h(i,end))
//
// where f_i(p) is the worst efficiency met along p and M^phi(P) charges every
// traversal of an edge with len_e phi(m_e) / m_e, m_e being the total weight
// of the paths whose image contains e.

#include <span>
#include <vector>

#include "rbot/model.hpp"

namespace rbot {

struct EnergyBreakdown {
  double phi_mass = 0.0;
  std::vector<double> payoff_per_scenario;  // a_i already applied
  double payoff_total = 0.0;
  double energy = 0.0;
};

// Throws std::domain_error for t < 0.
double phi_eval(const CostSpec& cost, double t);

double phi_mass_eulerian(const GeometricGraph& g, const CostSpec& cost,
                         std::span<const double> theta);

// Discrete divergence, convention d[[u->v]] = delta_v - delta_u.
NodeMeasure boundary_of_flow(const GeometricGraph& g,
                             std::span<const double> flow);

EnergyBreakdown eulerian_energy(const Instance& inst,
                                const EulerianCompetitor& c);

// Total weight of the paths whose image contains edge e (each path counted
// once regardless of how often it traverses e).
double multiplicity(const GeometricGraph& g, const TrafficPlan& plan, EdgeId e);
std::vector<double> multiplicities(const GeometricGraph& g,
                                   const TrafficPlan& plan);

double phi_mass_traffic(const GeometricGraph& g, const CostSpec& cost,
                        const TrafficPlan& plan);

// min over the vertices and edges of p of the scenario efficiency.
double path_efficiency(const ScenarioEfficiency& eff, const Path& p);

// Sub-plan weights scaled by the worst efficiency along each path.
// Throws ValidationError if the scenario carries no damage description.
std::vector<WeightedPath> penalized_plan(const Instance& inst,
                                         const TrafficPlan& plan,
                                         std::span<const double> subplan,
                                         std::size_t scenario);

EnergyBreakdown lagrangian_energy(const Instance& inst,
                                  const LagrangianCompetitor& c);

}  // namespace rbot
