#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "topomap/mapper.hpp"
#include "topomap/metrics.hpp"

namespace topomap {

/// Connectivity of the task stencil and of the network.
enum class Connectivity { MeshToMesh, MeshToTorus, TorusToTorus };

inline constexpr std::array<Connectivity, 3> kAllConnectivities{Connectivity::MeshToMesh, Connectivity::MeshToTorus,
                                                                 Connectivity::TorusToTorus};
inline constexpr std::array<Ordering, 4> kTableOrderings{Ordering::Z, Ordering::Gray, Ordering::FZ, Ordering::MFZ};

inline std::string to_string(Connectivity c) {
  switch (c) {
  case Connectivity::MeshToMesh: return "mesh-to-mesh";
  case Connectivity::MeshToTorus: return "mesh-to-torus";
  case Connectivity::TorusToTorus: return "torus-to-torus";
  }
  return "?";
}

inline Connectivity parse_connectivity(const std::string& s) {
  for (Connectivity c : kAllConnectivities)
    if (to_string(c) == s) return c;
  throw InputError("unknown connectivity class '" + s + "'");
}

/// One ordering-comparison experiment: `tasks` tasks on a td-dimensional
/// stencil mapped one-to-one onto a pd-dimensional block of as many nodes,
/// with the same extent along every dimension of each grid.
struct Table1Row {
  std::size_t tasks = 0;
  int pd = 0;
  int td = 0;

  friend bool operator==(const Table1Row&, const Table1Row&) = default;
};

/// The 45 grid shapes of the ordering comparison sweep.
inline const std::vector<Table1Row>& table1_manifest() {
  static const std::vector<Table1Row> rows = {
      {262144, 1, 2},  {32768, 1, 3},    {1048576, 1, 4},  {32768, 1, 5},    {262144, 1, 6},   {65536, 1, 8},
      {262144, 2, 1},  {262144, 2, 3},   {1048576, 2, 4},  {1048576, 2, 5},  {262144, 2, 6},   {65536, 2, 8},
      {32768, 3, 1},   {262144, 3, 2},   {4096, 3, 4},     {32768, 3, 5},    {262144, 3, 6},   {262144, 3, 9},
      {1048576, 4, 1}, {1048576, 4, 2},  {4096, 4, 3},     {1048576, 4, 5},  {4096, 4, 6},     {65536, 4, 8},
      {32768, 5, 1},   {1048576, 5, 2},  {32768, 5, 3},    {1048576, 5, 4},  {1048576, 5, 10},
      {262144, 6, 1},  {262144, 6, 2},   {262144, 6, 3},   {4096, 6, 4},     {262144, 6, 9},
      {65536, 8, 1},   {65536, 8, 2},    {65536, 8, 4},
      {262144, 9, 1},  {262144, 9, 2},   {262144, 9, 3},   {262144, 9, 6},
      {1048576, 10, 1}, {1048576, 10, 2}, {1048576, 10, 4}, {1048576, 10, 5},
  };
  return rows;
}

/// Exact integer extent e with e^dim == count.
inline int equal_extent(std::size_t count, int dim) {
  detail::require(dim >= 1, "grid dimension must be >= 1");
  const auto guess = static_cast<long long>(std::llround(std::pow(static_cast<double>(count), 1.0 / dim)));
  for (long long e = std::max(1LL, guess - 1); e <= guess + 1; ++e) {
    long double p = 1;
    for (int d = 0; d < dim; ++d) p *= static_cast<long double>(e);
    if (p == static_cast<long double>(count)) return static_cast<int>(e);
  }
  throw InputError(std::to_string(count) + " is not a perfect " + std::to_string(dim) + "-th power");
}

/// MFZ only changes the numbering when pd is a proper multiple of td.
inline bool mfz_applies(int pd, int td) { return pd != td && pd % td == 0; }

struct Table1Result {
  Table1Row row;
  /// average_hops[class][ordering]; empty when not computed or not applicable.
  std::array<std::array<std::optional<double>, 4>, 3> average_hops{};

  std::optional<double> at(Connectivity c, Ordering o) const {
    return average_hops[static_cast<std::size_t>(c)][static_cast<std::size_t>(o)];
  }
};

/// Maps the row's stencil with each requested ordering and measures
/// AverageHops under each requested connectivity class.
inline Table1Result compute_table1_row(const Table1Row& row, const std::vector<Ordering>& orderings,
                                       const std::vector<Connectivity>& classes) {
  const int task_extent = equal_extent(row.tasks, row.td);
  const int node_extent = equal_extent(row.tasks, row.pd);
  const std::vector<int> task_dims(static_cast<std::size_t>(row.td), task_extent);
  const std::vector<int> node_dims(static_cast<std::size_t>(row.pd), node_extent);
  const std::vector<bool> task_mesh(task_dims.size(), false), task_torus(task_dims.size(), true);
  const std::vector<bool> node_mesh(node_dims.size(), false), node_torus(node_dims.size(), true);

  Table1Result result;
  result.row = row;

  auto wanted = [&](Connectivity c) { return std::find(classes.begin(), classes.end(), c) != classes.end(); };
  const Allocation mesh_alloc = gen_block_allocation(TorusSpec(node_dims, node_mesh));
  Allocation torus_alloc = mesh_alloc;
  torus_alloc.spec = TorusSpec(node_dims, node_torus);

  std::vector<std::pair<Ordering, Mapping>> mappings;
  {
    const TaskGraph mesh_tasks = gen_stencil_tasks(task_dims, task_mesh);
    for (Ordering o : orderings) {
      if (o == Ordering::MFZ && !mfz_applies(row.pd, row.td)) continue;
      PartitionConfig cfg;
      cfg.num_parts = row.tasks;
      cfg.ordering = o;
      cfg.dim_policy = DimPolicy::Longest;
      Mapping m = map_tasks(mesh_tasks, mesh_alloc, cfg);
      const auto oi = static_cast<std::size_t>(o);
      if (wanted(Connectivity::MeshToMesh))
        result.average_hops[0][oi] = average_hops(mesh_tasks, mesh_alloc, m);
      if (wanted(Connectivity::MeshToTorus))
        result.average_hops[1][oi] = average_hops(mesh_tasks, torus_alloc, m);
      mappings.emplace_back(o, std::move(m));
    }
  }
  if (wanted(Connectivity::TorusToTorus)) {
    const TaskGraph torus_tasks = gen_stencil_tasks(task_dims, task_torus);
    for (const auto& [o, m] : mappings)
      result.average_hops[2][static_cast<std::size_t>(o)] = average_hops(torus_tasks, torus_alloc, m);
  }
  return result;
}

inline std::string format_hops(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

inline void write_table1_csv(std::ostream& out, const std::vector<Table1Result>& results,
                             const std::vector<Connectivity>& classes) {
  out << "tasks,pd,td,class,Z,GRAY,FZ,MFZ\n";
  for (const Table1Result& r : results) {
    for (Connectivity c : classes) {
      out << r.row.tasks << ',' << r.row.pd << ',' << r.row.td << ',' << to_string(c);
      for (Ordering o : kTableOrderings) out << ',' << format_hops(r.at(c, o));
      out << '\n';
    }
  }
}

} // namespace topomap
