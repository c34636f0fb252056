#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "rbot/examples.hpp"
#include "rbot/io.hpp"
#include "rbot/model.hpp"

using namespace rbot;
using rbot::testing::make_instance;
using rbot::testing::Rng;

namespace {

Instance two_vertex(double h = 1.0) {
  return make_instance({{0, 0}, {1, 0}}, {{0, 1}}, {-1, 1}, CostSpec::power(0.5), {{1.0, {true}}},
                       PayoffSpec::constant(h));
}

const char* kMinimal = R"({
  "format": 1, "dimension": 2,
  "vertices": [{"id": 0, "pos": [0, 0]}, {"id": 1, "pos": [3, 4]}],
  "edges": [{"id": 0, "u": 0, "v": 1}],
  "boundary": [{"vertex": 0, "mass": -1}, {"vertex": 1, "mass": 1}],
  "phi": {"kind": "power", "alpha": 0.5},
  "scenarios": [{"id": 1, "prob": 1, "edge_mask": [true]}],
  "payoff": {"kind": "constant", "value": 1}
})";

}  // namespace

TEST_CASE("graph construction rejects broken inputs") {
  CHECK_THROWS_AS(GeometricGraph(2, {{0, {0, 0}}, {1, {1, 0}}}, {{0, 0, 0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(GeometricGraph(2, {{0, {0, 0}}, {1, {1, 0}}}, {{0, 0, 1, 0.0}}), ValidationError);
  CHECK_THROWS_AS(GeometricGraph(2, {{0, {0, 0}}, {1, {1, 0}}}, {{0, 0, 2, 1.0}}), ValidationError);
  CHECK_THROWS_AS(GeometricGraph(2, {{0, {0, 0}}, {1, {1, 0, 0}}}, {{0, 0, 1, 1.0}}), ValidationError);
  CHECK_THROWS_AS(GeometricGraph(2, {{1, {0, 0}}, {0, {1, 0}}}, {}), ValidationError);
}

TEST_CASE("edge_between prefers the shortest parallel edge") {
  const GeometricGraph g(2, {{0, {0, 0}}, {1, {1, 0}}}, {{0, 0, 1, 2.0}, {1, 1, 0, 1.5}, {2, 0, 1, 1.5}});
  REQUIRE(g.edge_between(0, 1).has_value());
  CHECK(*g.edge_between(0, 1) == 1);
  CHECK(g.incident(0) == std::vector<EdgeId>{0, 1, 2});
  CHECK(g.opposite(1, 1) == 0);
}

TEST_CASE("boundary measure parts") {
  const BoundaryMeasure nu({-0.5, 0.25, 0.0, 0.75, -0.5});
  CHECK(nu.source_total() == 1.0);
  CHECK(nu.target_total() == 1.0);
  CHECK(nu.total_variation() == 2.0);
  CHECK(nu.source_vertices() == std::vector<VertexId>{0, 4});
  CHECK(nu.target_vertices() == std::vector<VertexId>{1, 3});
  CHECK(nu.sources(0) == 0.5);
  CHECK(nu.targets(0) == 0.0);
}

TEST_CASE("preceq examples") {
  const BoundaryMeasure nu({1.0, -1.0});
  CHECK(preceq(std::vector<double>{0.5, -0.5}, nu));
  CHECK(preceq(std::vector<double>{1.0, -1.0}, nu));
  CHECK_FALSE(preceq(std::vector<double>{-0.5, 0.0}, nu));
  CHECK_FALSE(preceq(std::vector<double>{1.0 + 1e-6, 0.0}, nu));
  CHECK(preceq(std::vector<double>{1.0 + 1e-10, 0.0}, nu));
}

TEST_CASE("preceq is reflexive, transitive and bounds total variation") {
  Rng rng(5);
  for (int k = 0; k < 300; ++k) {
    const int n = 1 + rng.index(6);
    std::vector<double> c(n), b(n), a(n);
    for (int v = 0; v < n; ++v) {
      c[v] = (rng.coin() ? 1 : -1) * rng.dyadic(3);
      b[v] = c[v] * rng.index(5) / 4.0;
      a[v] = b[v] * rng.index(5) / 4.0;
    }
    CHECK(preceq(c, c));
    REQUIRE(preceq(a, b));
    REQUIRE(preceq(b, c));
    CHECK(preceq(a, c));
    double ta = 0, tc = 0;
    for (int v = 0; v < n; ++v) ta += std::abs(a[v]), tc += std::abs(c[v]);
    CHECK(ta <= tc + 1e-12);
  }
}

TEST_CASE("paths") {
  const GeometricGraph g(2, {{0, {0, 0}}, {1, {1, 0}}, {2, {1, 1}}}, {{0, 0, 1, 1.0}, {1, 1, 2, 1.0}, {2, 2, 0, 1.5}});
  const Path p = make_path(g, {0, 1, 2});
  CHECK(p.edges == std::vector<EdgeId>{0, 1});
  CHECK(p.simple());
  CHECK(p.length(g) == 2.0);
  CHECK_FALSE(make_path(g, {0, 1, 2, 0, 1}).simple());
  CHECK_THROWS_AS(make_path(g, {0}), ValidationError);
  CHECK_THROWS_AS(make_path(g, {0, 1}, {1}), ValidationError);
  const GeometricGraph h(2, {{0, {0, 0}}, {1, {1, 0}}, {2, {2, 0}}}, {{0, 0, 1, 1.0}});
  CHECK_THROWS_AS(make_path(h, {0, 2}), ValidationError);
}

TEST_CASE("lagrangian competitor construction") {
  const Instance inst = two_vertex();
  const Path p = make_path(inst.graph, {0, 1});
  const auto c = make_lagrangian_competitor({{p, 0.5}, {p, 0.0}}, {{0.5, 0.0}});
  CHECK(c.plan.size() == 1);
  CHECK(c.subplans[0].size() == 1);
  CHECK_THROWS(make_lagrangian_competitor({{p, 0.5}}, {{0.7}}));
}

TEST_CASE("eulerian admissibility") {
  Instance inst = two_vertex();
  SUBCASE("null competitor") {
    const EulerianCompetitor c{{0.0}, {{0.0}}};
    CHECK(check_eulerian_admissible(inst, c).admissible());
  }
  SUBCASE("capacity") {
    const EulerianCompetitor c{{0.4}, {{0.5}}};
    const auto r = check_eulerian_admissible(inst, c);
    CHECK_FALSE(r.admissible());
    CHECK_FALSE(r.scenarios[0].capacity);
    CHECK(r.scenarios[0].support);
  }
  SUBCASE("support") {
    inst.scenarios[0].edge_mask = std::vector<bool>{false};
    const EulerianCompetitor c{{0.5}, {{0.5}}};
    const auto r = check_eulerian_admissible(inst, c);
    CHECK_FALSE(r.scenarios[0].support);
  }
  SUBCASE("boundary") {
    const EulerianCompetitor c{{0.5}, {{-0.5}}};
    CHECK_FALSE(check_eulerian_admissible(inst, c).scenarios[0].boundary);
  }
  SUBCASE("shape") {
    const EulerianCompetitor c{{0.5, 0.5}, {{0.5}}};
    CHECK_THROWS(check_eulerian_admissible(inst, c));
  }
}

TEST_CASE("lagrangian admissibility") {
  const Instance inst = two_vertex();
  const Path fwd = make_path(inst.graph, {0, 1});
  const Path back = make_path(inst.graph, {1, 0});
  CHECK(check_lagrangian_admissible(inst, make_lagrangian_competitor({{fwd, 0.5}}, {{0.5}})).admissible());
  LagrangianCompetitor over{{{fwd, 0.5}}, {{0.7}}};
  CHECK_FALSE(check_lagrangian_admissible(inst, over).scenarios[0].subplan);
  const auto rev = check_lagrangian_admissible(inst, make_lagrangian_competitor({{back, 0.5}}, {{0.5}}));
  CHECK_FALSE(rev.scenarios[0].boundary);
}

TEST_CASE("random competitors are admissible and single perturbations are caught") {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const Instance inst = rbot::testing::random_instance(rng, 8, 14);
    const auto e = rbot::testing::random_eulerian(rng, inst);
    const auto l = rbot::testing::random_lagrangian(rng, inst);
    REQUIRE(check_eulerian_admissible(inst, e).admissible());
    REQUIRE(check_lagrangian_admissible(inst, l).admissible());

    // Capacity: shrink theta below a used edge.
    for (std::size_t ed = 0; ed < e.theta.size(); ++ed) {
      if (std::abs(e.flows[0][ed]) < 1e-6) continue;
      auto bad = e;
      bad.theta[ed] = std::abs(e.flows[0][ed]) / 2;
      CHECK_FALSE(check_eulerian_admissible(inst, bad).scenarios[0].capacity);
      break;
    }
    // Support: put flow on a masked edge.
    const auto& mask = *inst.scenarios[0].edge_mask;
    for (std::size_t ed = 0; ed < mask.size(); ++ed) {
      if (mask[ed]) continue;
      auto bad = e;
      bad.flows[0][ed] = 0.25;
      bad.theta[ed] = std::max(bad.theta[ed], 0.25);
      CHECK_FALSE(check_eulerian_admissible(inst, bad).scenarios[0].support);
      break;
    }
    // Boundary: triple every flow of a scenario that carries something.
    for (std::size_t i = 0; i < e.flows.size(); ++i) {
      const auto d = boundary_of_flow(inst.graph, e.flows[i]);
      double tot = 0;
      for (double x : d) tot += std::abs(x);
      if (tot < 1e-6) continue;
      auto bad = e;
      double scale = 1.0;
      // Find a scale that overflows some atom.
      for (VertexId v = 0; v < static_cast<VertexId>(d.size()); ++v)
        if (std::abs(d[v]) > 1e-9) scale = std::max(scale, 2 * std::abs(inst.boundary.mass(v)) / std::abs(d[v]));
      for (double& x : bad.flows[i]) x *= scale;
      for (std::size_t ed = 0; ed < bad.theta.size(); ++ed)
        bad.theta[ed] = std::max(bad.theta[ed], std::abs(bad.flows[i][ed]));
      CHECK_FALSE(check_eulerian_admissible(inst, bad).scenarios[i].boundary);
      break;
    }
    // Sub-plan: exceed w_p.
    if (!l.plan.empty()) {
      auto bad = l;
      bad.subplans[0][0] = bad.plan[0].weight + 0.125;
      CHECK_FALSE(check_lagrangian_admissible(inst, bad).scenarios[0].subplan);
    }
  }
}

TEST_CASE("scenario efficiency") {
  Instance inst = make_instance({{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}}, {-1, 0, 1}, CostSpec::power(0.5),
                                {{1.0, {true, false}}}, PayoffSpec::constant(1));
  auto eff = scenario_efficiency(inst, 0);
  CHECK(eff.edge == std::vector<double>{1.0, 0.0});
  CHECK(eff.vertex == std::vector<double>{1.0, 1.0, 1.0});
  inst.scenarios[0].vertex_efficiency = std::vector<double>{1.0, 0.5, 0.25};
  inst.scenarios[0].edge_mask.reset();
  eff = scenario_efficiency(inst, 0);
  CHECK(eff.edge == std::vector<double>{0.5, 0.25});
  inst.scenarios[0].vertex_efficiency.reset();
  CHECK_THROWS_AS(scenario_efficiency(inst, 0), ValidationError);
}

TEST_CASE("validate_instance") {
  SUBCASE("probabilities") {
    Instance inst = make_instance({{0, 0}, {1, 0}}, {{0, 1}}, {-1, 1}, CostSpec::power(0.5),
                                  {{0.6, {true}}, {0.3, {true}}}, PayoffSpec::constant(1));
    const auto r = validate_instance(inst);
    CHECK_FALSE(r.ok());
    CHECK(r.findings[0].field == "scenarios.prob");
  }
  SUBCASE("truncated family balances the sum") {
    Instance inst = make_instance({{0, 0}, {1, 0}}, {{0, 1}}, {-1, 1}, CostSpec::power(0.5), {{0.75, {true}}},
                                  PayoffSpec::constant(1), 0.25);
    CHECK(validate_instance(inst).ok());
  }
  SUBCASE("hypotheses") {
    Instance inst = two_vertex();
    auto r = validate_instance(inst);
    CHECK(r.ok());
    CHECK(r.beta == 1.0);
    CHECK(r.positive_distance);
    CHECK(r.source_target_distance == doctest::Approx(1.0));
    CHECK_FALSE(r.phi_bounded);
    CHECK(r.lagrangian_hypotheses());
    inst.cost = CostSpec::bounded_step(1.0);
    CHECK(validate_instance(inst).phi_bounded);
  }
  SUBCASE("coincident source and target positions") {
    Instance inst = make_instance({{0, 0}, {0, 0}}, {{0, 1, 1.0}}, {-1, 1}, CostSpec::power(0.5),
                                  {{1.0, {true}}}, PayoffSpec::constant(1));
    const auto r = validate_instance(inst);
    CHECK(r.source_target_distance == 0.0);
    CHECK_FALSE(r.positive_distance);
  }
  SUBCASE("distance example, two levels") {
    ExampleParams p;
    p.name = "distance";
    p.levels = 2;
    const auto r = validate_instance(build_example(p));
    CHECK(r.ok());
    CHECK(r.source_target_distance == doctest::Approx(std::ldexp(1.0, -6)).epsilon(1e-12));
  }
}

TEST_CASE("load_instance") {
  SUBCASE("minimal file, lengths filled in") {
    const Instance inst = load_instance(kMinimal);
    CHECK(inst.graph.edge(0).length == 5.0);
    CHECK(inst.boundary.total_variation() == 2.0);
  }
  SUBCASE("errors name the field") {
    auto expect_field = [](std::string text, const std::string& from, const std::string& to,
                           const std::string& field, bool parse) {
      text.replace(text.find(from), from.size(), to);
      try {
        load_instance(text);
        FAIL("expected an error");
      } catch (const ParseError& e) {
        CHECK(parse);
        CHECK(e.field() == field);
      } catch (const ValidationError& e) {
        CHECK_FALSE(parse);
        CHECK(e.field() == field);
      }
    };
    expect_field(kMinimal, R"("dimension": 2,)", "", "<root>.dimension", true);
    expect_field(kMinimal, R"("u": 0, "v": 1)", R"("u": 0, "v": 7)", "edges[0]", false);
    expect_field(kMinimal, R"("v": 1})", R"("v": 1, "length": -2})", "edges[0].length", false);
    expect_field(kMinimal, R"("kind": "power")", R"("kind": "cubic")", "phi.kind", true);
    expect_field(kMinimal, R"("prob": 1)", R"("prob": 0.6)", "scenarios.prob", false);
    expect_field(kMinimal, R"("format": 1)", R"("format": 2)", "format", true);
    expect_field(kMinimal, R"([true])", R"([1])", "scenarios[0].edge_mask[0]", true);
    CHECK_THROWS_AS(load_instance("{ not json"), ParseError);
  }
  SUBCASE("vertex carrying both signs") {
    std::string text = kMinimal;
    const std::string from = R"({"vertex": 1, "mass": 1})";
    text.replace(text.find(from), from.size(), R"({"vertex": 1, "mass": 1}, {"vertex": 1, "mass": -0.5})");
    CHECK_THROWS_AS(load_instance(text), ValidationError);
  }
  SUBCASE("limit example round trip keeps the bounded cost") {
    ExampleParams p;
    p.name = "limit";
    const Instance inst = load_instance(serialize_instance(build_example(p)));
    CHECK(inst.cost.kind == CostSpec::Kind::bounded_step);
    CHECK(inst.cost.value == 1.0);
  }
}

TEST_CASE("serialize and load round-trip byte for byte") {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const Instance inst = rbot::testing::random_instance(rng, 9, 16);
    const std::string a = serialize_instance(inst);
    const std::string b = serialize_instance(load_instance(a));
    REQUIRE(a == b);
  }
  for (const auto& [name, inst] : rbot::testing::oracle_suite()) {
    CAPTURE(name);
    const std::string a = serialize_instance(inst);
    CHECK(serialize_instance(load_instance(a)) == a);
  }
}

TEST_CASE("competitor json round trip") {
  const Instance inst = rbot::testing::oracle_suite()[7].inst;  // non_existence, parallel detour edge
  const Path via_detour = make_path(inst.graph, {0, 1, 2, 3, 4, 5}, {0, 1, 7, 3, 4});
  const auto c = make_lagrangian_competitor({{via_detour, 0.5}}, {{0.5}, {0.0}});
  const auto back = lagrangian_competitor_from_json(inst.graph, lagrangian_competitor_to_json(c));
  CHECK(back.plan[0].path.edges == via_detour.edges);
  CHECK(dump(lagrangian_competitor_to_json(back)) == dump(lagrangian_competitor_to_json(c)));
  const EulerianCompetitor e{{0.5, 0.25}, {{0.5, -0.25}}};
  CHECK(dump(eulerian_competitor_to_json(eulerian_competitor_from_json(eulerian_competitor_to_json(e)))) ==
        dump(eulerian_competitor_to_json(e)));
}

TEST_CASE("dump ends with a newline and keeps key order") {
  Json j;
  j["zeta"] = 1;
  j["alpha"] = 0.1;
  CHECK(dump(j) == "{\n  \"zeta\": 1,\n  \"alpha\": 0.1\n}\n");
}
