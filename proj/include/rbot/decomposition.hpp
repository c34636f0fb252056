#pragma once

// Exact discrete versions of the structural lemmas behind both existence
// results: removing cycles from a flow, peeling an acyclic flow into weighted
// simple paths, loop-erasing a traffic plan, and the load bound for
// cycle-free recovery flows.

#include <span>
#include <vector>

#include "rbot/model.hpp"

namespace rbot {

// Repeatedly cancels the bottleneck of a directed cycle of the support
// (edges oriented by the sign of their flow). The result has the same
// boundary, |T'_e| <= |T_e| with matching signs, and an acyclic support.
std::vector<double> remove_cycles(const GeometricGraph& g, std::span<const double> flow);

bool is_acyclic(const GeometricGraph& g, std::span<const double> flow);

struct PathDecomposition {
  std::vector<WeightedPath> items;
};

// Peels source-to-target paths from an acyclic flow. Always starts from the
// smallest source id and follows the smallest outgoing edge id. With
// `strict_nu` set, a nonzero divergence off supp(nu) is rejected.
// Throws ValidationError if the flow is not acyclic.
PathDecomposition good_decomposition(const GeometricGraph& g, std::span<const double> flow,
                                     const BoundaryMeasure* strict_nu = nullptr);

// Signed superposition of the decomposition's paths.
std::vector<double> superpose(const GeometricGraph& g, const PathDecomposition& d);

// Residuals of the three identities of a good decomposition:
// superposition (max edge error), mass (sum w L vs sum len |T|) and
// boundary (2 sum w vs sum |dT|).
struct DecompositionResiduals {
  double superposition = 0.0;
  double mass = 0.0;
  double boundary = 0.0;
  bool all_simple = true;

  bool ok(double tol = kMeasureTol) const {
    return superposition <= tol && mass <= tol && boundary <= tol && all_simple;
  }
};
DecompositionResiduals decomposition_residuals(const GeometricGraph& g,
                                               std::span<const double> flow,
                                               const PathDecomposition& d);

// Chronological loop erasure; endpoints are kept.
Path loop_erase(const Path& p);
// Loop-erases every path of the plan, keeping weights. Throws
// std::logic_error if the phi-mass increased, which cannot happen.
TrafficPlan loop_erase_plan(const GeometricGraph& g, const CostSpec& cost,
                            const TrafficPlan& plan);

struct DensityReport {
  double max_load = 0.0;
  double beta = 0.0;
  bool ok = true;
};
DensityReport density_bound_check(const Instance& inst, std::span<const double> flow);

}  // namespace rbot
