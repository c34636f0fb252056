#include <doctest.h>

#include <cmath>

#include "rbot/energy.hpp"
#include "rbot/examples.hpp"
#include "rbot/io.hpp"

using namespace rbot;

namespace {

struct Pt {
  double x, y;
};

// Even-odd ray casting.
bool inside(const std::vector<Pt>& poly, Pt p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Pt a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

// The two damage regions of the non-existence example.
const std::vector<Pt> kS1 = {{-3, 1}, {-2, -1}, {0, 0}, {2, -1}, {3, 1}};
const std::vector<Pt> kS2 = {{-4.25, 1.5}, {-3, -1}, {-2, 1}, {-1, -1}, {0, 0},
                             {1, -1},      {2, 1},   {3, -1}, {4.25, 1.5}};

bool edge_meets(const GeometricGraph& g, EdgeId e, const std::vector<Pt>& poly) {
  const auto& a = g.vertex(g.edge(e).u).pos;
  const auto& b = g.vertex(g.edge(e).v).pos;
  for (int k = 1; k < 1000; ++k) {
    const double t = k / 1000.0;
    if (inside(poly, {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])})) return true;
  }
  return false;
}

ExampleParams named(const std::string& name) {
  ExampleParams p;
  p.name = name;
  return p;
}

}  // namespace

TEST_CASE("non_existence builder") {
  const Instance inst = build_example(named("non_existence"));
  CHECK(inst.graph.num_vertices() == 8);
  CHECK(inst.graph.num_edges() == 8);
  CHECK(inst.graph.edge(7).length == 2.25);
  CHECK(inst.payoff.sup() == 20.0);
  CHECK(inst.scenarios[0].prob == 0.5);
  CHECK(inst.scenarios[1].prob == 0.5);
  CHECK(inst.boundary.mass(vertex_at(inst.graph, -3, 0)) == -0.5);
  CHECK(inst.boundary.mass(vertex_at(inst.graph, 2, 0)) == -0.5);
  CHECK(inst.boundary.mass(vertex_at(inst.graph, 3, 0)) == 0.5);
  CHECK(inst.boundary.mass(vertex_at(inst.graph, -2, 0)) == 0.5);

  ExampleParams p = named("non_existence");
  p.detour = 0.5;
  CHECK(build_example(p).graph.edge(7).length == 2.5);
  p.detour = 0;
  CHECK_THROWS_AS(build_example(p), ValidationError);
}

TEST_CASE("non_existence masks follow the damage regions") {
  const Instance inst = build_example(named("non_existence"));
  for (EdgeId e = 0; e < 7; ++e) {
    CAPTURE(e);
    CHECK((*inst.scenarios[0].edge_mask)[e] == !edge_meets(inst.graph, e, kS1));
    CHECK((*inst.scenarios[1].edge_mask)[e] == !edge_meets(inst.graph, e, kS2));
  }
  // The detour runs below y = -1, clear of both regions.
  CHECK((*inst.scenarios[0].edge_mask)[7]);
  CHECK((*inst.scenarios[1].edge_mask)[7]);
}

TEST_CASE("distance builder") {
  ExampleParams p = named("distance");
  p.levels = 1;
  Instance inst = build_example(p);
  CHECK(inst.num_scenarios() == 1);
  CHECK(inst.scenarios[0].prob == 0.5);
  CHECK(inst.truncated_prob == 0.5);
  const VertexId x = vertex_at(inst.graph, 0.125, 0), y = vertex_at(inst.graph, 0.125, 0.125);
  CHECK(inst.boundary.mass(x) == -0.5);
  CHECK(inst.boundary.mass(y) == 0.5);
  CHECK(inst.payoff.sup() == 1.0);

  p.levels = 3;
  inst = build_example(p);
  CHECK(inst.num_scenarios() == 7);
  double probs = inst.truncated_prob;
  for (const auto& s : inst.scenarios) probs += s.prob;
  CHECK(probs == 1.0);
  // Scenario i sees exactly its own curve.
  for (std::size_t i = 0; i < inst.num_scenarios(); ++i) {
    const auto eff = scenario_efficiency(inst, i);
    int open = 0;
    for (double f : eff.edge) open += f > 0;
    CHECK(open == 2);
    CHECK(eff.edge[2 * i] == 1.0);
    CHECK(eff.edge[2 * i + 1] == 1.0);
  }
  p.levels = 0;
  CHECK_THROWS_AS(build_example(p), ValidationError);
}

TEST_CASE("limit builder") {
  ExampleParams p = named("limit");
  p.loops = 2;
  const Instance inst = build_example(p);
  CHECK(inst.num_scenarios() == 2);
  CHECK(inst.scenarios[0].prob + inst.scenarios[1].prob + inst.truncated_prob == 1.0);
  CHECK(inst.cost.kind == CostSpec::Kind::bounded_step);
  CHECK(inst.boundary.mass(vertex_at(inst.graph, 0, 0)) == -1.0);
  CHECK(inst.boundary.mass(vertex_at(inst.graph, 1, 0)) == 1.0);
  CHECK(inst.payoff.sup() == 10.0);
  // The detour of loop 2 is a semicircle of radius 1/4 split into 8 arcs.
  double arc = 0;
  for (const Edge& e : inst.graph.edges())
    if (inst.graph.vertex(e.u).pos[1] > 0 || inst.graph.vertex(e.v).pos[1] > 0) arc += e.length;
  CHECK(arc == doctest::Approx(std::acos(-1.0) / 4).epsilon(1e-12));
  // Scenario 2 is blocked on the straight stretch under its detour.
  const auto eff = scenario_efficiency(inst, 1);
  for (const Edge& e : inst.graph.edges()) {
    const auto& a = inst.graph.vertex(e.u).pos;
    const auto& b = inst.graph.vertex(e.v).pos;
    const bool under = a[1] == 0 && b[1] == 0 && std::min(a[0], b[0]) >= 0.25 && std::max(a[0], b[0]) <= 0.75;
    if (under) CHECK(eff.edge[e.id] == 0.0);
  }
}

TEST_CASE("non_continuous builder") {
  ExampleParams p = named("non_continuous");
  p.epsilon = 1.0 / 8;
  const Instance inst = build_example(p);
  int top = 0;
  for (const Vertex& v : inst.graph.vertices()) top += v.pos[1] == 1.0;
  CHECK(top == 11);  // the 9 grid points plus x = 1/3 and 2/3
  CHECK(inst.boundary.mass(vertex_at(inst.graph, 0, 0)) == 1.0);
  CHECK(inst.boundary.mass(vertex_at(inst.graph, 1, 1)) == 1.0);
  CHECK(inst.boundary.mass(vertex_at(inst.graph, 1, 0)) == -1.0);
  CHECK(inst.boundary.mass(vertex_at(inst.graph, 0, 1)) == -1.0);
  const auto eff = scenario_efficiency(inst, 0);
  auto f = [&](double x, double y) { return eff.vertex[vertex_at(inst.graph, x, y)]; };
  CHECK(f(0, 0) == 1.0);        // on y = 3x
  CHECK(f(1, 0) == 1.0);        // on y = 3 - 3x
  CHECK(f(0.5, 0.5) == 0.5);    // middle: y^beta
  CHECK(f(0.125, 0.5) == 0.0);  // left of y = 3x
  CHECK(f(0.5, 1) == 1.0);      // top line inside the middle
  CHECK(f(0, 1) == 0.5);        // outer top strip
  CHECK(f(1.0 / 3, 1) == 1.0);  // diagonal meets the top
  p.epsilon = 0.3;
  CHECK_THROWS_AS(build_example(p), ValidationError);
}

TEST_CASE("every builder validates and is deterministic") {
  std::vector<ExampleParams> all;
  for (double d : {0.5, 0.25, 0.125}) {
    ExampleParams p = named("non_existence");
    p.detour = d;
    all.push_back(p);
  }
  for (int j = 1; j <= 4; ++j) {
    ExampleParams p = named("distance");
    p.levels = j;
    all.push_back(p);
  }
  for (int k = 1; k <= 5; ++k) {
    ExampleParams p = named("limit");
    p.loops = k;
    all.push_back(p);
  }
  for (double e : {0.25, 0.125, 0.0625}) {
    for (double b : {1.0, 2.0}) {
      ExampleParams p = named("non_continuous");
      p.epsilon = e;
      p.beta = b;
      all.push_back(p);
    }
  }
  for (const auto& p : all) {
    CAPTURE(p.name);
    const Instance inst = build_example(p);
    const auto rep = validate_instance(inst);
    CHECK(rep.ok());
    if (p.name == "distance") CHECK(rep.positive_distance);
    CHECK(serialize_instance(inst) == serialize_instance(build_example(p)));
  }
  CHECK_THROWS_AS(build_example(named("nonsense")), ValidationError);
}

TEST_CASE("non_continuous reference competitor") {
  ExampleParams p = named("non_continuous");
  p.epsilon = 1.0 / 8;
  const Instance inst = build_example(p);
  const auto ref = non_continuous_reference(inst, p);
  CHECK(check_lagrangian_admissible(inst, ref).admissible());
  const auto pen = penalized_plan(inst, ref.plan, ref.subplans[0], 0);
  double total = 0;
  for (const auto& wp : pen) total += wp.weight;
  CHECK(total == doctest::Approx(std::pow(1 - 3 * p.epsilon, p.beta) + 0.5).epsilon(1e-12));
}

TEST_CASE("phenomenon checks at small sizes") {
  SolveOptions opts;
  SUBCASE("distance") {
    ExampleParams p = named("distance");
    p.levels = 2;
    const auto r = verify_phenomenon(p, opts);
    CHECK(r.ok());
    const Json j = phenomenon_to_json(r);
    CHECK(j.at("kind") == "verify");
    const Json runs = j.at("measurements").at("runs");
    CHECK(runs.at(0).at("plan_mass") == 0.5);
    CHECK(runs.at(1).at("plan_mass") == 1.0);
  }
  SUBCASE("limit") {
    ExampleParams p = named("limit");
    p.loops = 2;
    const auto r = verify_phenomenon(p, opts);
    CHECK(r.ok());
    const Json runs = phenomenon_to_json(r).at("measurements").at("runs");
    CHECK(runs.at(1).at("energy").get<double>() < runs.at(0).at("energy").get<double>());
  }
}
