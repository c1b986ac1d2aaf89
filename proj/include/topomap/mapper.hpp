#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "topomap/machine_model.hpp"
#include "topomap/mapping.hpp"
#include "topomap/metrics.hpp"
#include "topomap/mj_partition.hpp"
#include "topomap/parallel.hpp"
#include "topomap/task_model.hpp"

namespace topomap {

struct BoxLiftParams {
  std::vector<int> box_dims;
  double outer_scale = 16.0;
};

/// Coordinate preprocessing applied before partitioning. Machine-side steps
/// run in the order shift, bandwidth scale or box lift, mask.
struct CoordinateTransforms {
  bool shift = false;
  bool bandwidth_scale = false;
  std::optional<BoxLiftParams> box_lift;
  std::vector<bool> core_mask; ///< empty keeps every machine dimension
  std::vector<bool> task_mask; ///< empty keeps every task dimension
};

struct RotationReport {
  std::vector<std::size_t> task_permutation;
  std::vector<std::size_t> core_permutation;
  double weighted_hops = 0.0;
  std::size_t candidates_evaluated = 0;
};

/// Transformed coordinates of each allocated node.
inline PointSet transformed_node_points(const Allocation& alloc, const CoordinateTransforms& tf) {
  detail::require(!(tf.bandwidth_scale && tf.box_lift), "bandwidth scaling and box lifting cannot be combined");
  PointSet pts = tf.shift ? shift_coordinates(alloc) : node_points(alloc);
  if (tf.bandwidth_scale) pts = scale_by_bandwidth(alloc.spec, pts);
  if (tf.box_lift) pts = box_lift(pts, tf.box_lift->box_dims, tf.box_lift->outer_scale);
  if (!tf.core_mask.empty()) pts = mask_dimensions(pts, tf.core_mask);
  return pts;
}

/// Transformed coordinates of each core (cores inherit their node's point).
inline PointSet core_points(const Allocation& alloc, const CoordinateTransforms& tf = {}) {
  detail::require(!alloc.nodes.empty(), "allocation has no nodes");
  const PointSet nodes = transformed_node_points(alloc, tf);
  PointSet out(nodes.dim(), alloc.num_cores());
  for (std::size_t c = 0; c < alloc.num_cores(); ++c) {
    const auto src = nodes.row(alloc.node_of_core(c));
    std::copy(src.begin(), src.end(), out.row(c).begin());
  }
  return out;
}

inline PointSet task_points(const TaskGraph& tasks, const CoordinateTransforms& tf = {}) {
  return tf.task_mask.empty() ? tasks.coords : mask_dimensions(tasks.coords, tf.task_mask);
}

/// Picks `count` mutually close cores: repeatedly take the cores nearest the
/// centroid of the current pick (initially all cores) until the pick settles.
inline std::vector<std::size_t> select_core_subset(const PointSet& cores, std::size_t count) {
  detail::require(count >= 1 && count <= cores.size(), "subset size must be between 1 and the core count");
  const std::size_t pnum = cores.size();
  const std::size_t dim = cores.dim();
  std::vector<std::size_t> chosen(pnum);
  std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  constexpr int max_iterations = 100;
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t c : chosen)
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += cores(c, d);
    for (double& v : centroid) v /= static_cast<double>(chosen.size());

    std::vector<std::pair<double, std::size_t>> by_distance(pnum);
    for (std::size_t c = 0; c < pnum; ++c) {
      double dist = 0.0;
      for (std::size_t d = 0; d < dim; ++d) dist += (cores(c, d) - centroid[d]) * (cores(c, d) - centroid[d]);
      by_distance[c] = {dist, c};
    }
    std::nth_element(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(count - 1),
                     by_distance.end());
    std::vector<std::size_t> next;
    next.reserve(count);
    for (std::size_t k = 0; k < count; ++k) next.push_back(by_distance[k].second);
    std::sort(next.begin(), next.end());
    if (next == chosen) break;
    chosen = std::move(next);
  }
  return chosen;
}

inline std::vector<std::size_t> select_core_subset(const Allocation& alloc, std::size_t count) {
  return select_core_subset(core_points(alloc), count);
}

namespace detail {

inline PointSet select_rows(const PointSet& pts, const std::vector<std::size_t>& rows) {
  PointSet out(pts.dim(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto src = pts.row(rows[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

} // namespace detail

/// Orderings used for the task and the core partition. MFZ only differs from
/// FZ when the core dimension is a proper multiple of the task dimension; the
/// lower-dimensional (task) set then gets the MFZ flips.
inline std::pair<Ordering, Ordering> resolve_orderings(Ordering requested, std::size_t td, std::size_t pd) {
  if (requested != Ordering::MFZ) return {requested, requested};
  if (pd != td && pd % td == 0) return {Ordering::MFZ, Ordering::FZ};
  return {Ordering::FZ, Ordering::FZ};
}

/// Core of the task mapping: partitions both point sets into min(tnum, pnum)
/// parts with matching numbering and pairs equal parts.
inline Mapping map_points(const PointSet& tasks, const PointSet& cores, const PartitionConfig& cfg) {
  const std::size_t tnum = tasks.size();
  const std::size_t pnum = cores.size();
  detail::require(tnum >= 1 && pnum >= 1, "mapping needs at least one task and one core");

  if (tnum < pnum) {
    const std::vector<std::size_t> subset = select_core_subset(cores, tnum);
    const Mapping inner = map_points(tasks, detail::select_rows(cores, subset), cfg);
    std::vector<std::size_t> task_to_core(tnum);
    for (std::size_t t = 0; t < tnum; ++t) task_to_core[t] = subset[inner.task_to_core[t]];
    return Mapping::from_task_to_core(std::move(task_to_core), pnum);
  }

  const auto [task_order, core_order] = resolve_orderings(cfg.ordering, tasks.dim(), cores.dim());
  PartitionConfig task_cfg = cfg;
  task_cfg.num_parts = pnum;
  task_cfg.ordering = task_order;
  PartitionConfig core_cfg = task_cfg;
  core_cfg.ordering = core_order;

  const PartitionResult task_parts = mj_partition(tasks, task_cfg);
  const PartitionResult core_parts = mj_partition(cores, core_cfg);
  return get_mapping_arrays(task_parts, core_parts, tnum, pnum);
}

/// Maps tasks to cores by geometric partitioning of both coordinate sets.
inline Mapping map_tasks(const TaskGraph& tasks, const Allocation& alloc, const PartitionConfig& cfg,
                         const CoordinateTransforms& tf = {}) {
  detail::require(tasks.num_tasks() >= 1, "task graph is empty");
  detail::require(alloc.num_cores() >= 1, "allocation is empty");
  return map_points(task_points(tasks, tf), core_points(alloc, tf), cfg);
}

/// Tries every axis permutation of the task and core coordinates and keeps
/// the mapping with the lowest WeightedHops (first permutation pair wins ties).
inline std::pair<Mapping, RotationReport> map_best_rotation(const TaskGraph& tasks, const Allocation& alloc,
                                                            const PartitionConfig& cfg,
                                                            const CoordinateTransforms& tf = {}) {
  detail::require(!tasks.edges.empty(), "rotation search needs at least one task edge");
  const PointSet tpts = task_points(tasks, tf);
  const PointSet cpts = core_points(alloc, tf);

  std::vector<std::vector<std::size_t>> task_perms;
  std::vector<std::size_t> perm(tpts.dim());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do task_perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<std::vector<std::size_t>> core_perms;
  perm.resize(cpts.dim());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do core_perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  const std::size_t candidates = task_perms.size() * core_perms.size();
  std::vector<double> cost(candidates);
  parallel_for(candidates, [&](std::size_t k) {
    const auto& tp = task_perms[k / core_perms.size()];
    const auto& cp = core_perms[k % core_perms.size()];
    const Mapping m = map_points(tpts.permuted(tp), cpts.permuted(cp), cfg);
    cost[k] = weighted_hops(tasks, alloc, m);
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < candidates; ++k)
    if (cost[k] < cost[best]) best = k;

  RotationReport rep;
  rep.task_permutation = task_perms[best / core_perms.size()];
  rep.core_permutation = core_perms[best % core_perms.size()];
  rep.weighted_hops = cost[best];
  rep.candidates_evaluated = candidates;
  Mapping m = map_points(tpts.permuted(rep.task_permutation), cpts.permuted(rep.core_permutation), cfg);
  return {std::move(m), std::move(rep)};
}

} // namespace topomap
