#pragma once

// JSON encodings. Every document carries a top-level "format": 1 and is
// written with a fixed key order so that output is byte-stable.

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rbot/energy.hpp"
#include "rbot/model.hpp"

namespace rbot {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// Parse and fully validate an instance. Omitted edge lengths become the
// Euclidean distance between the endpoints. Throws ParseError for schema
// violations and ValidationError for broken invariants.
Instance load_instance(std::string_view text);
Instance instance_from_json(const Json& j);
Json instance_to_json(const Instance& inst);
std::string serialize_instance(const Instance& inst);

Json path_to_json(const Path& p);
Path path_from_json(const GeometricGraph& g, const Json& j);

Json plan_to_json(const TrafficPlan& plan);
TrafficPlan plan_from_json(const GeometricGraph& g, const Json& j);

Json eulerian_competitor_to_json(const EulerianCompetitor& c);
EulerianCompetitor eulerian_competitor_from_json(const Json& j);
Json lagrangian_competitor_to_json(const LagrangianCompetitor& c);
LagrangianCompetitor lagrangian_competitor_from_json(const GeometricGraph& g,
                                                     const Json& j);

Json energy_to_json(const EnergyBreakdown& e);
Json admissibility_to_json(const AdmissibilityReport& r);
Json validation_to_json(const ValidationReport& r);

// Pretty-printed with two-space indent and a trailing newline.
std::string dump(const Json& j);

// Read a whole file; throws Error when unreadable.
std::string read_file(const std::string& path);
// Write via a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace rbot
