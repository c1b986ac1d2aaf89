#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "topomap/errors.hpp"
#include "topomap/mj_partition.hpp"

namespace topomap {

/// Task -> core assignment and its inverse.
struct Mapping {
  std::vector<std::size_t> task_to_core;
  std::vector<std::vector<std::size_t>> core_to_tasks;

  static Mapping from_task_to_core(std::vector<std::size_t> task_to_core, std::size_t num_cores) {
    Mapping m;
    m.core_to_tasks.assign(num_cores, {});
    for (std::size_t t = 0; t < task_to_core.size(); ++t) {
      detail::require(task_to_core[t] < num_cores,
                      "task " + std::to_string(t) + " is mapped to missing core " + std::to_string(task_to_core[t]));
      m.core_to_tasks[task_to_core[t]].push_back(t);
    }
    m.task_to_core = std::move(task_to_core);
    return m;
  }

  std::size_t num_tasks() const { return task_to_core.size(); }
  std::size_t num_cores() const { return core_to_tasks.size(); }

  /// Checks that the two arrays describe the same total assignment.
  void validate(std::size_t tnum, std::size_t pnum) const {
    detail::require(task_to_core.size() == tnum, "mapping covers " + std::to_string(task_to_core.size()) +
                                                     " tasks, expected " + std::to_string(tnum));
    detail::require(core_to_tasks.size() == pnum, "mapping covers " + std::to_string(core_to_tasks.size()) +
                                                      " cores, expected " + std::to_string(pnum));
    std::vector<int> seen(tnum, 0);
    for (std::size_t p = 0; p < pnum; ++p) {
      for (std::size_t t : core_to_tasks[p]) {
        detail::require(t < tnum && task_to_core[t] == p, "mapping arrays disagree at core " + std::to_string(p));
        ++seen[t];
      }
    }
    for (std::size_t t = 0; t < tnum; ++t)
      detail::require(seen[t] == 1, "task " + std::to_string(t) + " is not mapped exactly once");
  }

  friend bool operator==(const Mapping&, const Mapping&) = default;
};

/// Pairs tasks and cores that received the same part number. Tasks of a part
/// are dealt to that part's cores in index order.
inline Mapping get_mapping_arrays(const PartitionResult& task_parts, const PartitionResult& core_parts,
                                  std::size_t tnum, std::size_t pnum) {
  detail::require(task_parts.num_parts == core_parts.num_parts, "task and core partitions have different part counts");
  detail::require(task_parts.part.size() == tnum && core_parts.part.size() == pnum,
                  "partition sizes do not match task/core counts");
  const std::size_t np = task_parts.num_parts;

  // Counting sort of cores by part: offsets[k]..offsets[k+1] are part k's cores.
  std::vector<std::size_t> offsets(np + 1, 0);
  for (std::size_t p : core_parts.part) ++offsets[p + 1];
  for (std::size_t k = 0; k < np; ++k) offsets[k + 1] += offsets[k];
  std::vector<std::size_t> cores(pnum);
  {
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t c = 0; c < pnum; ++c) cores[fill[core_parts.part[c]]++] = c;
  }

  std::vector<std::size_t> dealt(np, 0);
  std::vector<std::size_t> task_to_core(tnum);
  for (std::size_t t = 0; t < tnum; ++t) {
    const std::size_t k = task_parts.part[t];
    const std::size_t count = offsets[k + 1] - offsets[k];
    detail::require(count > 0, "part " + std::to_string(k) + " has tasks but no cores");
    task_to_core[t] = cores[offsets[k] + dealt[k]++ % count];
  }
  return Mapping::from_task_to_core(std::move(task_to_core), pnum);
}

} // namespace topomap
