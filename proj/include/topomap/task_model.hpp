#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "topomap/errors.hpp"
#include "topomap/point_set.hpp"

namespace topomap {

struct TaskEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 1.0;

  friend bool operator==(const TaskEdge&, const TaskEdge&) = default;
};

/// Tasks with geometric coordinates and directed, weighted communication
/// edges. A symmetric exchange is stored as two directed edges.
struct TaskGraph {
  PointSet coords;
  std::vector<TaskEdge> edges;

  std::size_t dim() const { return coords.dim(); }
  std::size_t num_tasks() const { return coords.size(); }

  void validate() const {
    detail::require(coords.dim() > 0, "task graph needs a positive dimension");
    detail::require(coords.all_finite(), "task coordinates must be finite");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const TaskEdge& edge = edges[e];
      const std::string where = "edge " + std::to_string(e);
      detail::require(edge.src < num_tasks() && edge.dst < num_tasks(), where + " references a missing task");
      detail::require(edge.src != edge.dst, where + " is a self edge");
      detail::require(edge.weight > 0.0, where + " has a non-positive weight");
    }
  }

  friend bool operator==(const TaskGraph&, const TaskGraph&) = default;
};

/// One task per grid point, communicating with its +/-1 neighbor along every
/// dimension (wrapping where requested). Row-major task numbering.
inline TaskGraph gen_stencil_tasks(const std::vector<int>& dims, const std::vector<bool>& wrap) {
  detail::require(!dims.empty(), "stencil needs at least one dimension");
  detail::require(wrap.size() == dims.size(), "wrap flags must match dimension count");
  std::size_t count = 1;
  for (int l : dims) {
    detail::require(l >= 1, "stencil extents must be >= 1");
    count *= static_cast<std::size_t>(l);
  }
  const std::size_t td = dims.size();
  std::vector<std::size_t> stride(td, 1);
  for (std::size_t d = td - 1; d-- > 0;) stride[d] = stride[d + 1] * static_cast<std::size_t>(dims[d + 1]);

  TaskGraph graph;
  graph.coords = PointSet(td, count);
  graph.edges.reserve(count * 2 * td);
  std::vector<int> pos(td, 0);
  for (std::size_t t = 0; t < count; ++t) {
    for (std::size_t d = 0; d < td; ++d) graph.coords(t, d) = pos[d];
    for (std::size_t d = 0; d < td; ++d) {
      const int l = dims[d];
      const int p = pos[d];
      auto neighbor = [&](int q) { return t + stride[d] * static_cast<std::size_t>(q) - stride[d] * static_cast<std::size_t>(p); };
      const bool has_minus = p > 0 || (wrap[d] && l > 1);
      const bool has_plus = p + 1 < l || (wrap[d] && l > 1);
      const int minus = p > 0 ? p - 1 : l - 1;
      const int plus = p + 1 < l ? p + 1 : 0;
      if (has_minus) graph.edges.push_back({t, neighbor(minus), 1.0});
      if (has_plus && !(has_minus && plus == minus)) graph.edges.push_back({t, neighbor(plus), 1.0});
    }
    for (std::size_t d = td; d-- > 0;) {
      if (++pos[d] < dims[d]) break;
      pos[d] = 0;
    }
  }
  return graph;
}

} // namespace topomap
