#include "rbot/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <sstream>

#include "rbot/energy.hpp"

namespace rbot {

namespace {

constexpr double kWidth = 800.0, kHeight = 600.0, kMargin = 40.0;
constexpr double kMaxStroke = 8.0;
const char* const kPalette[] = {"#2a9d8f", "#e76f51", "#8e44ad", "#f4a261", "#264653", "#6a994e"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

class Canvas {
 public:
  explicit Canvas(const GeometricGraph& g) {
    if (g.num_vertices() == 0) return;
    xmin_ = ymin_ = std::numeric_limits<double>::infinity();
    double xmax = -xmin_, ymax = -ymin_;
    for (const Vertex& v : g.vertices()) {
      xmin_ = std::min(xmin_, v.pos[0]);
      xmax = std::max(xmax, v.pos[0]);
      ymin_ = std::min(ymin_, v.pos[1]);
      ymax = std::max(ymax, v.pos[1]);
    }
    const double w = std::max(xmax - xmin_, 1e-12), h = std::max(ymax - ymin_, 1e-12);
    scale_ = std::min((kWidth - 2 * kMargin) / w, (kHeight - 2 * kMargin) / h);
  }

  double x(double px) const { return kMargin + (px - xmin_) * scale_; }
  double y(double py) const { return kHeight - kMargin - (py - ymin_) * scale_; }

 private:
  double xmin_ = 0.0, ymin_ = 0.0, scale_ = 1.0;
};

bool damaged(const ScenarioEfficiency& eff, EdgeId e) { return eff.edge[e] < 1.0; }

std::string render(const Instance& inst, const EulerianCompetitor* c) {
  const auto& g = inst.graph;
  if (g.dimension() != 2)
    throw UnsupportedError("svg rendering needs a 2-dimensional instance, got dimension " +
                           std::to_string(g.dimension()));
  const Canvas cv(g);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << num(kWidth) << ' '
      << num(kHeight) << "\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight) << "\">\n";
  out << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" "
         "markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" "
         "fill=\"context-stroke\"/></marker></defs>\n";
  out << "<g id=\"axes\" stroke=\"#999999\" stroke-width=\"1\">\n"
      << "<line x1=\"" << num(kMargin / 2) << "\" y1=\"" << num(kHeight - kMargin / 2) << "\" x2=\""
      << num(kWidth - kMargin / 2) << "\" y2=\"" << num(kHeight - kMargin / 2) << "\"/>\n"
      << "<line x1=\"" << num(kMargin / 2) << "\" y1=\"" << num(kHeight - kMargin / 2) << "\" x2=\""
      << num(kMargin / 2) << "\" y2=\"" << num(kMargin / 2) << "\"/>\n</g>\n";

  auto segment = [&](EdgeId e, bool forward, double shift) {
    const Edge& ed = g.edge(e);
    const auto& a = g.vertex(forward ? ed.u : ed.v).pos;
    const auto& b = g.vertex(forward ? ed.v : ed.u).pos;
    double x1 = cv.x(a[0]), y1 = cv.y(a[1]), x2 = cv.x(b[0]), y2 = cv.y(b[1]);
    const double len = std::hypot(x2 - x1, y2 - y1);
    if (len > 0 && shift != 0) {
      const double nx = -(y2 - y1) / len * shift, ny = (x2 - x1) / len * shift;
      x1 += nx, x2 += nx, y1 += ny, y2 += ny;
    }
    std::ostringstream s;
    s << "x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\""
      << num(y2) << '"';
    return s.str();
  };

  if (c) {
    double tmax = 0.0;
    for (double t : c->theta) tmax = std::max(tmax, t);
    out << "<g id=\"network\" stroke=\"#333333\" stroke-linecap=\"round\">\n";
    for (const Edge& e : g.edges()) {
      const double t = c->theta[e.id];
      if (t <= kSnapTol) continue;
      out << "<line " << segment(e.id, true, 0.0) << " stroke-width=\""
          << num(kMaxStroke * t / tmax) << "\"/>\n";
    }
    out << "</g>\n";
    const std::size_t m = inst.num_scenarios();
    for (std::size_t i = 0; i < m && i < c->flows.size(); ++i) {
      const ScenarioEfficiency eff = scenario_efficiency(inst, i);
      const char* color = kPalette[i % std::size(kPalette)];
      // Spread the overlays so opposite flows on a shared edge stay visible.
      const double shift = 3.0 * (static_cast<double>(i) - (static_cast<double>(m) - 1) / 2);
      out << "<g id=\"scenario-" << inst.scenarios[i].id << "\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" fill=\"none\">\n";
      for (const Edge& e : g.edges()) {
        const double f = c->flows[i][e.id];
        if (std::abs(f) > kSnapTol)
          out << "<line " << segment(e.id, f > 0, shift) << " marker-end=\"url(#arrow)\"/>\n";
        else if (c->theta[e.id] > kSnapTol && damaged(eff, e.id))
          out << "<line " << segment(e.id, true, shift) << " stroke-dasharray=\"4 3\"/>\n";
      }
      out << "</g>\n";
    }
  }

  out << "<g id=\"boundary\" stroke=\"none\">\n";
  for (const Vertex& v : g.vertices()) {
    const double mass = inst.boundary.mass(v.id);
    if (mass == 0.0) continue;
    out << "<circle cx=\"" << num(cv.x(v.pos[0])) << "\" cy=\"" << num(cv.y(v.pos[1]))
        << "\" r=\"4.00\" fill=\"" << (mass < 0 ? "#d62828" : "#1d4ed8") << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace

EulerianCompetitor lagrangian_as_flows(const Instance& inst, const LagrangianCompetitor& c) {
  const auto& g = inst.graph;
  EulerianCompetitor out;
  out.theta = multiplicities(g, c.plan);
  out.flows.assign(c.subplans.size(), std::vector<double>(g.num_edges(), 0.0));
  for (std::size_t i = 0; i < c.subplans.size(); ++i)
    for (std::size_t p = 0; p < c.plan.size(); ++p) {
      const Path& path = c.plan[p].path;
      for (std::size_t k = 0; k < path.edges.size(); ++k) {
        const int sign = g.edge(path.edges[k]).u == path.vertices[k] ? 1 : -1;
        out.flows[i][path.edges[k]] += sign * c.subplans[i][p];
      }
    }
  return out;
}

std::string render_svg(const Instance& inst) { return render(inst, nullptr); }

std::string render_svg(const Instance& inst, const EulerianCompetitor& c) {
  return render(inst, &c);
}

std::string render_svg(const Instance& inst, const LagrangianCompetitor& c) {
  const EulerianCompetitor flows = lagrangian_as_flows(inst, c);
  return render(inst, &flows);
}

}  // namespace rbot
