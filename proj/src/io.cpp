#include "rbot/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rbot {

namespace {

const Json& require(const Json& j, const char* key, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(field + "." + key, "missing key");
  return *it;
}

double as_number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError(field, "expected a number");
  return j.get<double>();
}

int as_int(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ParseError(field, "expected an integer");
  return j.get<int>();
}

const Json& as_array(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "expected an array");
  return j;
}

std::vector<double> number_array(const Json& j, const std::string& field) {
  std::vector<double> out;
  for (std::size_t k = 0; k < as_array(j, field).size(); ++k)
    out.push_back(as_number(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

std::string idx(const std::string& base, std::size_t k) {
  return base + "[" + std::to_string(k) + "]";
}

CostSpec cost_from_json(const Json& j) {
  const std::string kind = [&] {
    const Json& k = require(j, "kind", "phi");
    if (!k.is_string()) throw ParseError("phi.kind", "expected a string");
    return k.get<std::string>();
  }();
  if (kind == "power") return CostSpec::power(as_number(require(j, "alpha", "phi"), "phi.alpha"));
  if (kind == "bounded_step")
    return CostSpec::bounded_step(as_number(require(j, "value", "phi"), "phi.value"));
  if (kind == "table") {
    const Json& pts = as_array(require(j, "points", "phi"), "phi.points");
    std::vector<std::pair<double, double>> points;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const auto f = idx("phi.points", k);
      if (!pts[k].is_array() || pts[k].size() != 2) throw ParseError(f, "expected [t, phi(t)]");
      points.emplace_back(as_number(pts[k][0], f), as_number(pts[k][1], f));
    }
    return CostSpec::table(std::move(points));
  }
  throw ParseError("phi.kind", "unknown cost kind '" + kind + "'");
}

Json cost_to_json(const CostSpec& c) {
  Json j;
  switch (c.kind) {
    case CostSpec::Kind::power:
      j["kind"] = "power";
      j["alpha"] = c.alpha;
      break;
    case CostSpec::Kind::bounded_step:
      j["kind"] = "bounded_step";
      j["value"] = c.value;
      break;
    case CostSpec::Kind::table: {
      j["kind"] = "table";
      Json pts = Json::array();
      for (const auto& [t, f] : c.points) pts.push_back({t, f});
      j["points"] = pts;
      break;
    }
  }
  return j;
}

PayoffSpec payoff_from_json(const Json& j) {
  const Json& k = require(j, "kind", "payoff");
  if (!k.is_string()) throw ParseError("payoff.kind", "expected a string");
  const auto kind = k.get<std::string>();
  if (kind == "constant")
    return PayoffSpec::constant(as_number(require(j, "value", "payoff"), "payoff.value"));
  if (kind == "table") {
    const Json& rows = as_array(require(j, "values", "payoff"), "payoff.values");
    std::vector<std::vector<double>> values;
    for (std::size_t i = 0; i < rows.size(); ++i)
      values.push_back(number_array(rows[i], idx("payoff.values", i)));
    return PayoffSpec::table(std::move(values));
  }
  throw ParseError("payoff.kind", "unknown payoff kind '" + kind + "'");
}

Json payoff_to_json(const PayoffSpec& p) {
  Json j;
  if (p.kind == PayoffSpec::Kind::constant) {
    j["kind"] = "constant";
    j["value"] = p.value;
  } else {
    j["kind"] = "table";
    j["values"] = p.values;
  }
  return j;
}

void check_format(const Json& j) {
  if (!j.is_object()) throw ParseError("<root>", "expected an object");
  if (auto it = j.find("format"); it != j.end()) {
    if (!it->is_number_integer() || it->get<int>() != kFormatVersion)
      throw ParseError("format", "unsupported format version");
  }
}

}  // namespace

Instance instance_from_json(const Json& j) {
  check_format(j);
  const int dim = as_int(require(j, "dimension", "<root>"), "dimension");
  if (dim <= 0) throw ValidationError("dimension", "must be positive");

  const Json& jv = as_array(require(j, "vertices", "<root>"), "vertices");
  std::vector<Vertex> vertices;
  for (std::size_t k = 0; k < jv.size(); ++k) {
    const auto f = idx("vertices", k);
    Vertex v;
    v.id = as_int(require(jv[k], "id", f), f + ".id");
    v.pos = number_array(require(jv[k], "pos", f), f + ".pos");
    vertices.push_back(std::move(v));
  }
  std::sort(vertices.begin(), vertices.end(),
            [](const Vertex& a, const Vertex& b) { return a.id < b.id; });

  const Json& je = as_array(require(j, "edges", "<root>"), "edges");
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < je.size(); ++k) {
    const auto f = idx("edges", k);
    Edge e;
    e.id = as_int(require(je[k], "id", f), f + ".id");
    e.u = as_int(require(je[k], "u", f), f + ".u");
    e.v = as_int(require(je[k], "v", f), f + ".v");
    if (auto it = je[k].find("length"); it != je[k].end()) {
      e.length = as_number(*it, f + ".length");
      if (e.length < 0.0) throw ValidationError(f + ".length", "negative length");
    } else {
      e.length = -1.0;  // resolved below
    }
    edges.push_back(e);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  const auto nv = static_cast<VertexId>(vertices.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    auto& e = edges[k];
    if (e.length >= 0.0) continue;
    if (e.u < 0 || e.u >= nv || e.v < 0 || e.v >= nv)
      throw ValidationError(idx("edges", k), "dangling vertex id");
    if (vertices[e.u].pos.size() != vertices[e.v].pos.size())
      throw ValidationError(idx("edges", k), "endpoint dimensions differ");
    double s = 0.0;
    for (std::size_t d = 0; d < vertices[e.u].pos.size(); ++d) {
      const double dx = vertices[e.u].pos[d] - vertices[e.v].pos[d];
      s += dx * dx;
    }
    e.length = std::sqrt(s);
  }

  Instance inst;
  inst.graph = GeometricGraph(dim, std::move(vertices), std::move(edges));

  const Json& jb = as_array(require(j, "boundary", "<root>"), "boundary");
  std::vector<double> mass(inst.graph.num_vertices(), 0.0);
  for (std::size_t k = 0; k < jb.size(); ++k) {
    const auto f = idx("boundary", k);
    const int v = as_int(require(jb[k], "vertex", f), f + ".vertex");
    const double m = as_number(require(jb[k], "mass", f), f + ".mass");
    if (v < 0 || v >= nv) throw ValidationError(f + ".vertex", "dangling vertex id");
    if ((mass[v] < 0 && m > 0) || (mass[v] > 0 && m < 0))
      throw ValidationError(f + ".mass", "vertex carries both signs");
    mass[v] += m;
  }
  inst.boundary = BoundaryMeasure(std::move(mass));
  inst.cost = cost_from_json(require(j, "phi", "<root>"));

  const Json& js = as_array(require(j, "scenarios", "<root>"), "scenarios");
  for (std::size_t k = 0; k < js.size(); ++k) {
    const auto f = idx("scenarios", k);
    DamageScenario s;
    s.id = as_int(require(js[k], "id", f), f + ".id");
    s.prob = as_number(require(js[k], "prob", f), f + ".prob");
    if (auto it = js[k].find("edge_mask"); it != js[k].end()) {
      std::vector<bool> mask;
      for (std::size_t e = 0; e < as_array(*it, f + ".edge_mask").size(); ++e) {
        if (!(*it)[e].is_boolean()) throw ParseError(idx(f + ".edge_mask", e), "expected a boolean");
        mask.push_back((*it)[e].get<bool>());
      }
      s.edge_mask = std::move(mask);
    }
    if (auto it = js[k].find("vertex_efficiency"); it != js[k].end())
      s.vertex_efficiency = number_array(*it, f + ".vertex_efficiency");
    if (auto it = js[k].find("edge_efficiency"); it != js[k].end())
      s.edge_efficiency = number_array(*it, f + ".edge_efficiency");
    inst.scenarios.push_back(std::move(s));
  }
  inst.payoff = payoff_from_json(require(j, "payoff", "<root>"));
  if (auto it = j.find("truncated_prob"); it != j.end())
    inst.truncated_prob = as_number(*it, "truncated_prob");

  const ValidationReport rep = validate_instance(inst);
  if (!rep.ok()) throw ValidationError(rep.findings.front().field, rep.findings.front().message);
  return inst;
}

Instance load_instance(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("<root>", e.what());
  }
  return instance_from_json(j);
}

Json instance_to_json(const Instance& inst) {
  const auto& g = inst.graph;
  Json j;
  j["format"] = kFormatVersion;
  j["dimension"] = g.dimension();
  Json jv = Json::array();
  for (const Vertex& v : g.vertices()) jv.push_back(Json{{"id", v.id}, {"pos", v.pos}});
  j["vertices"] = std::move(jv);
  Json je = Json::array();
  for (const Edge& e : g.edges())
    je.push_back(Json{{"id", e.id}, {"u", e.u}, {"v", e.v}, {"length", e.length}});
  j["edges"] = std::move(je);
  Json jb = Json::array();
  for (std::size_t v = 0; v < inst.boundary.size(); ++v) {
    const double m = inst.boundary.mass(static_cast<VertexId>(v));
    if (m != 0.0) jb.push_back(Json{{"vertex", v}, {"mass", m}});
  }
  j["boundary"] = std::move(jb);
  j["phi"] = cost_to_json(inst.cost);
  Json js = Json::array();
  for (const auto& s : inst.scenarios) {
    Json o;
    o["id"] = s.id;
    o["prob"] = s.prob;
    if (s.edge_mask) {
      Json m = Json::array();
      for (bool b : *s.edge_mask) m.push_back(b);
      o["edge_mask"] = std::move(m);
    }
    if (s.vertex_efficiency) o["vertex_efficiency"] = *s.vertex_efficiency;
    if (s.edge_efficiency) o["edge_efficiency"] = *s.edge_efficiency;
    js.push_back(std::move(o));
  }
  j["scenarios"] = std::move(js);
  j["payoff"] = payoff_to_json(inst.payoff);
  if (inst.truncated_prob > 0.0) j["truncated_prob"] = inst.truncated_prob;
  return j;
}

std::string serialize_instance(const Instance& inst) { return dump(instance_to_json(inst)); }

Json path_to_json(const Path& p) { return Json{{"path", p.vertices}, {"edges", p.edges}}; }

Path path_from_json(const GeometricGraph& g, const Json& j) {
  const Json& jp = as_array(require(j, "path", "path"), "path");
  std::vector<VertexId> vs;
  for (std::size_t k = 0; k < jp.size(); ++k) vs.push_back(as_int(jp[k], idx("path", k)));
  if (auto it = j.find("edges"); it != j.end()) {
    std::vector<EdgeId> es;
    for (std::size_t k = 0; k < as_array(*it, "edges").size(); ++k)
      es.push_back(as_int((*it)[k], idx("edges", k)));
    return make_path(g, std::move(vs), std::move(es));
  }
  return make_path(g, std::move(vs));
}

Json plan_to_json(const TrafficPlan& plan) {
  Json out = Json::array();
  for (const auto& wp : plan) {
    Json o = path_to_json(wp.path);
    o["weight"] = wp.weight;
    out.push_back(std::move(o));
  }
  return out;
}

TrafficPlan plan_from_json(const GeometricGraph& g, const Json& j) {
  TrafficPlan plan;
  for (std::size_t k = 0; k < as_array(j, "plan").size(); ++k) {
    const auto f = idx("plan", k);
    plan.push_back({path_from_json(g, j[k]), as_number(require(j[k], "weight", f), f + ".weight")});
  }
  return plan;
}

Json eulerian_competitor_to_json(const EulerianCompetitor& c) {
  return Json{{"format", kFormatVersion}, {"model", "eulerian"}, {"theta", c.theta}, {"flows", c.flows}};
}

EulerianCompetitor eulerian_competitor_from_json(const Json& j) {
  check_format(j);
  EulerianCompetitor c;
  c.theta = number_array(require(j, "theta", "<root>"), "theta");
  const Json& fl = as_array(require(j, "flows", "<root>"), "flows");
  for (std::size_t i = 0; i < fl.size(); ++i) c.flows.push_back(number_array(fl[i], idx("flows", i)));
  return c;
}

Json lagrangian_competitor_to_json(const LagrangianCompetitor& c) {
  return Json{{"format", kFormatVersion},
              {"model", "lagrangian"},
              {"plan", plan_to_json(c.plan)},
              {"subplans", c.subplans}};
}

LagrangianCompetitor lagrangian_competitor_from_json(const GeometricGraph& g, const Json& j) {
  check_format(j);
  LagrangianCompetitor c;
  c.plan = plan_from_json(g, require(j, "plan", "<root>"));
  const Json& sp = as_array(require(j, "subplans", "<root>"), "subplans");
  for (std::size_t i = 0; i < sp.size(); ++i) c.subplans.push_back(number_array(sp[i], idx("subplans", i)));
  return c;
}

Json energy_to_json(const EnergyBreakdown& e) {
  return Json{{"phi_mass", e.phi_mass},
              {"payoff_per_scenario", e.payoff_per_scenario},
              {"payoff_total", e.payoff_total},
              {"energy", e.energy}};
}

Json admissibility_to_json(const AdmissibilityReport& r) {
  Json per = Json::array();
  for (const auto& s : r.scenarios)
    per.push_back(Json{{"capacity", s.capacity},
                       {"support", s.support},
                       {"subplan", s.subplan},
                       {"boundary", s.boundary}});
  Json j{{"admissible", r.admissible()}, {"scenarios", per}};
  j["first_violation"] = r.first_violation ? Json(*r.first_violation) : Json(nullptr);
  return j;
}

Json validation_to_json(const ValidationReport& r) {
  Json f = Json::array();
  for (const auto& x : r.findings) f.push_back(Json{{"field", x.field}, {"message", x.message}});
  return Json{{"format", kFormatVersion},
              {"ok", r.ok()},
              {"findings", f},
              {"beta", r.beta},
              {"source_target_distance", r.source_target_distance},
              {"positive_distance", r.positive_distance},
              {"phi_bounded", r.phi_bounded},
              {"lagrangian_hypotheses", r.lagrangian_hypotheses()}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace rbot
