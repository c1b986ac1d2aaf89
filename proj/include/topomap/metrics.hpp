#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "topomap/machine_model.hpp"
#include "topomap/mapping.hpp"
#include "topomap/task_model.hpp"

namespace topomap {

/// Per-link accumulation together with its bottleneck value.
struct LinkLoads {
  std::map<Link, double> per_link;
  double max = 0.0;
};

/// Traffic on the links of one (dimension, direction) class.
struct DimDirectionLoad {
  int dim = 0;
  int direction = 1;
  double data_sum = 0.0;
  double data_max = 0.0;
  double latency_sum = 0.0;
  double latency_max = 0.0;

  friend bool operator==(const DimDirectionLoad&, const DimDirectionLoad&) = default;
};

struct MetricsReport {
  std::int64_t total_hops = 0;
  double average_hops = 0.0;
  double weighted_hops = 0.0;
  double max_link_data = 0.0;
  double max_latency = 0.0;
  /// Number of directed task edges (messages) evaluated.
  std::int64_t total_messages = 0;
  std::map<Link, double> per_link_data;
  /// Ordered dim 0 +, dim 0 -, dim 1 +, ...
  std::vector<DimDirectionLoad> per_dim_direction;
};

namespace detail {

/// Flattened router coordinates per core, for the hot per-edge loops.
class CoreGeometry {
public:
  CoreGeometry(const Allocation& alloc, const Mapping& mapping, std::size_t tnum) : spec_(alloc.spec) {
    mapping.validate(tnum, alloc.num_cores());
    pd_ = spec_.num_dims();
    coords_.resize(alloc.nodes.size() * pd_);
    for (std::size_t n = 0; n < alloc.nodes.size(); ++n)
      std::copy(alloc.nodes[n].begin(), alloc.nodes[n].end(), coords_.begin() + static_cast<std::ptrdiff_t>(n * pd_));
    task_node_.resize(tnum);
    for (std::size_t t = 0; t < tnum; ++t) task_node_[t] = alloc.node_of_core(mapping.task_to_core[t]);
  }

  int hops(std::size_t t1, std::size_t t2) const {
    const int* a = coords_.data() + task_node_[t1] * pd_;
    const int* b = coords_.data() + task_node_[t2] * pd_;
    int h = 0;
    for (std::size_t d = 0; d < pd_; ++d) h += axis_distance(spec_, d, a[d], b[d]);
    return h;
  }

  Coord node_coord(std::size_t task) const {
    const int* a = coords_.data() + task_node_[task] * pd_;
    return Coord(a, a + pd_);
  }

private:
  const TorusSpec& spec_;
  std::size_t pd_ = 0;
  std::vector<int> coords_;
  std::vector<std::size_t> task_node_;
};

} // namespace detail

/// Sum of hop counts over all directed task edges.
inline std::int64_t total_hops(const TaskGraph& tasks, const Allocation& alloc, const Mapping& mapping) {
  const detail::CoreGeometry geo(alloc, mapping, tasks.num_tasks());
  std::int64_t sum = 0;
  for (const TaskEdge& e : tasks.edges) sum += geo.hops(e.src, e.dst);
  return sum;
}

/// Hops per directed edge; 0 for a graph without edges.
inline double average_hops(const TaskGraph& tasks, const Allocation& alloc, const Mapping& mapping) {
  if (tasks.edges.empty()) {
    mapping.validate(tasks.num_tasks(), alloc.num_cores());
    return 0.0;
  }
  return static_cast<double>(total_hops(tasks, alloc, mapping)) / static_cast<double>(tasks.edges.size());
}

inline double weighted_hops(const TaskGraph& tasks, const Allocation& alloc, const Mapping& mapping) {
  const detail::CoreGeometry geo(alloc, mapping, tasks.num_tasks());
  double sum = 0.0;
  for (const TaskEdge& e : tasks.edges) sum += e.weight * geo.hops(e.src, e.dst);
  return sum;
}

/// Data(e): every message deposits its weight on each link of its route.
inline LinkLoads link_data(const TaskGraph& tasks, const Allocation& alloc, const Mapping& mapping) {
  const detail::CoreGeometry geo(alloc, mapping, tasks.num_tasks());
  LinkLoads loads;
  for (const TaskEdge& e : tasks.edges) {
    for (Link& link : route(alloc.spec, geo.node_coord(e.src), geo.node_coord(e.dst)))
      loads.per_link[std::move(link)] += e.weight;
  }
  for (const auto& [link, data] : loads.per_link) loads.max = std::max(loads.max, data);
  return loads;
}

/// Latency(e) = Data(e) / bw(e).
inline LinkLoads link_latency(const TorusSpec& spec, const LinkLoads& data) {
  LinkLoads out;
  for (const auto& [link, d] : data.per_link) {
    const double lat = d / spec.link_bandwidth(link.from, static_cast<std::size_t>(link.dim), link.direction);
    out.per_link.emplace(link, lat);
    out.max = std::max(out.max, lat);
  }
  return out;
}

inline LinkLoads link_latency(const TaskGraph& tasks, const Allocation& alloc, const Mapping& mapping) {
  return link_latency(alloc.spec, link_data(tasks, alloc, mapping));
}

inline MetricsReport report(const TaskGraph& tasks, const Allocation& alloc, const Mapping& mapping) {
  MetricsReport r;
  r.total_hops = total_hops(tasks, alloc, mapping);
  r.total_messages = static_cast<std::int64_t>(tasks.edges.size());
  r.average_hops = tasks.edges.empty() ? 0.0 : static_cast<double>(r.total_hops) / static_cast<double>(r.total_messages);
  r.weighted_hops = weighted_hops(tasks, alloc, mapping);

  LinkLoads data = link_data(tasks, alloc, mapping);
  LinkLoads latency = link_latency(alloc.spec, data);
  r.max_link_data = data.max;
  r.max_latency = latency.max;

  const std::size_t pd = alloc.spec.num_dims();
  r.per_dim_direction.resize(2 * pd);
  for (std::size_t d = 0; d < pd; ++d) {
    r.per_dim_direction[2 * d] = {static_cast<int>(d), 1};
    r.per_dim_direction[2 * d + 1] = {static_cast<int>(d), -1};
  }
  for (const auto& [link, d] : data.per_link) {
    DimDirectionLoad& slot = r.per_dim_direction[2 * static_cast<std::size_t>(link.dim) + (link.direction > 0 ? 0 : 1)];
    const double lat = latency.per_link.at(link);
    slot.data_sum += d;
    slot.data_max = std::max(slot.data_max, d);
    slot.latency_sum += lat;
    slot.latency_max = std::max(slot.latency_max, lat);
  }
  r.per_link_data = std::move(data.per_link);
  return r;
}

} // namespace topomap
