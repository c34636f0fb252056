#pragma once

// Deterministic SVG rendering of a planar instance and, optionally, a solved
// competitor. Built edges are drawn with widths proportional to theta; each
// scenario's recovery flow is an overlay group with id "scenario-<id>".

#include <string>

#include "rbot/model.hpp"

namespace rbot {

// theta = multiplicities, flows[i] = signed sum of the sub-plan weights.
EulerianCompetitor lagrangian_as_flows(const Instance& inst, const LagrangianCompetitor& c);

// Throws UnsupportedError when the instance is not 2-dimensional.
std::string render_svg(const Instance& inst);
std::string render_svg(const Instance& inst, const EulerianCompetitor& c);
std::string render_svg(const Instance& inst, const LagrangianCompetitor& c);

}  // namespace rbot
