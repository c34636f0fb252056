#pragma once

// Builders for the four counterexample instances and the checks that
// reproduce their qualitative behaviour at desk scale.
//
//   non_existence   two masks whose individually optimal recovery paths cross
//                   one segment in opposite directions, plus a parallel
//                   detour of length 2 + detour
//   distance        2^(j-1) private curves between x_j and y_j per level j,
//                   truncated after `levels` levels
//   limit           a unit segment plus shrinking semicircular detours, one
//                   damage per curve, bounded cost
//   non_continuous  an epsilon grid on the unit square with a damage that is
//                   1 on two diagonals, 1/2 on the top line and y^beta inside
//                   the tent between the diagonals

#include <optional>
#include <string>
#include <vector>

#include "rbot/io.hpp"
#include "rbot/model.hpp"
#include "rbot/solver.hpp"

namespace rbot {

struct ExampleParams {
  std::string name = "non_existence";
  int levels = 3;                 // distance
  double epsilon = 0.125;         // non_continuous, must be 1/n with n >= 4
  double beta = 1.0;              // non_continuous
  int loops = 4;                  // limit
  std::optional<double> payoff;   // h; 1 for distance, 20 for non_existence, 10 otherwise
  double detour = 0.25;           // non_existence
};

// Throws ValidationError on an unknown name or out-of-range parameter.
Instance build_example(const ExampleParams& params);

// The competitor that charges the corridor route at row 1 - 3 epsilon and
// the top line, each with weight 1.
LagrangianCompetitor non_continuous_reference(const Instance& inst, const ExampleParams& params);

// Vertex at the given planar position (within 1e-12), or throws.
VertexId vertex_at(const GeometricGraph& g, double x, double y);

struct PhenomenonCheck {
  std::string name;
  bool ok = false;
  std::string message;
};

struct PhenomenonReport {
  std::string name;
  std::vector<PhenomenonCheck> checks;
  Json measurements;

  bool ok() const;
};

// Runs the solves each example calls for and records one check per claim.
PhenomenonReport verify_phenomenon(const ExampleParams& params, const SolveOptions& opts);

Json phenomenon_to_json(const PhenomenonReport& r);

}  // namespace rbot
