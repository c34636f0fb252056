#pragma once

// Helpers shared by the solver translation units.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <limits>
#include <span>
#include <thread>
#include <vector>

#include "rbot/model.hpp"
#include "rbot/solver.hpp"

namespace rbot::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs f(0..n-1) on up to worker_threads() threads. The first exception by
// index is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers = std::min<std::size_t>(worker_threads(), n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) {
      try {
        f(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < n;) {
          try {
            f(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Directed edge weight: (edge, +1 for u->v / -1 for v->u) -> weight, or
// kInf when the traversal is not allowed.
using ArcWeight = std::function<double(EdgeId, int)>;

struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<EdgeId> parent_edge;
  std::vector<VertexId> parent;
};

// Dijkstra from s; ties go to the smaller vertex id, and a vertex keeps the
// first parent that reached its final distance.
ShortestPathTree dijkstra(const GeometricGraph& g, VertexId s, const ArcWeight& w,
                          std::span<const char> banned_vertices = {});

// Path s -> t from the tree, or empty vertices if unreachable.
Path extract_path(const ShortestPathTree& tree, VertexId s, VertexId t);

// +1 if the k-th edge of p is traversed u->v, -1 otherwise.
inline int traversal_sign(const GeometricGraph& g, const Path& p, std::size_t k) {
  return g.edge(p.edges[k]).u == p.vertices[k] ? +1 : -1;
}

// Allowed range of the endpoint measure at each vertex: [min(nu,0), max(nu,0)].
struct BoundaryBox {
  std::vector<double> lo, hi;
  explicit BoundaryBox(const BoundaryMeasure& nu) {
    for (double x : nu.masses()) {
      lo.push_back(std::min(x, 0.0));
      hi.push_back(std::max(x, 0.0));
    }
  }
};

// Candidate move sizes: multiples of delta up to `cap`, plus `cap` itself.
inline std::vector<double> quanta(double delta, double cap) {
  std::vector<double> out;
  if (cap <= kMeasureTol) return out;
  for (int k = 1; k * delta <= cap + 1e-12; ++k) out.push_back(std::min(k * delta, cap));
  if (out.empty() || out.back() < cap - 1e-12) out.push_back(cap);
  return out;
}

void snap_all(std::vector<double>& v);

}  // namespace rbot::detail
