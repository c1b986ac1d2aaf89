#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "topomap/machine_model.hpp"
#include "topomap/mapper.hpp"
#include "topomap/metrics.hpp"
#include "topomap/sfc_analysis.hpp"
#include "topomap/task_model.hpp"

namespace topomap::io {

using nlohmann::json;

namespace detail {

template <typename T>
T get_field(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key)) throw ParseError(ctx + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(ctx + ": field '" + key + "' has the wrong type (" + e.what() + ")");
  }
}

inline json parse_text(const std::string& text, const std::string& ctx) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ParseError(ctx + ": top level must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ParseError(ctx + ": malformed JSON (" + e.what() + ")");
  }
}

} // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes text to path, or to stdout when path is empty or "-".
inline void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// --- machine -------------------------------------------------------------

inline json to_json(const Allocation& alloc) {
  json j;
  j["dims"] = alloc.spec.dims;
  j["wrap"] = alloc.spec.wrap;
  j["bandwidth"] = alloc.spec.bandwidth;
  j["nodes"] = alloc.nodes;
  j["cores_per_node"] = alloc.cores_per_node;
  return j;
}

inline Allocation machine_from_json(const json& j, const std::string& ctx = "machine") {
  TorusSpec spec;
  spec.dims = detail::get_field<std::vector<int>>(j, "dims", ctx);
  spec.wrap = detail::get_field<std::vector<bool>>(j, "wrap", ctx);
  if (j.contains("bandwidth")) {
    spec.bandwidth = detail::get_field<std::vector<std::vector<double>>>(j, "bandwidth", ctx);
  } else {
    for (int l : spec.dims) spec.bandwidth.emplace_back(static_cast<std::size_t>(std::max(l, 0)), 1.0);
  }
  const std::size_t cpn = j.contains("cores_per_node") ? detail::get_field<std::size_t>(j, "cores_per_node", ctx) : 1;
  try {
    spec.validate();
    if (!j.contains("nodes")) return gen_block_allocation(spec, cpn);
    const json& nodes = j.at("nodes");
    if (!nodes.is_array()) throw ParseError(ctx + ": field 'nodes' must be an array");
    std::vector<Coord> coords;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const std::string where = ctx + ": nodes[" + std::to_string(k) + "]";
      Coord c;
      try {
        c = nodes[k].get<Coord>();
      } catch (const json::exception&) {
        throw ParseError(where + " is not an integer tuple");
      }
      if (!spec.contains(c)) throw ParseError(where + " lies outside the machine");
      coords.push_back(std::move(c));
    }
    return Allocation(spec, std::move(coords), cpn);
  } catch (const InputError& e) {
    throw ParseError(ctx + ": " + e.what());
  }
}

inline Allocation load_machine(const std::string& path) {
  return machine_from_json(detail::parse_text(read_file(path), path), path);
}

inline void save_machine(const Allocation& alloc, const std::string& path) { write_file(path, dump(to_json(alloc))); }

// --- tasks ---------------------------------------------------------------

inline json to_json(const TaskGraph& g) {
  json j;
  j["dim"] = g.dim();
  json coords = json::array();
  for (std::size_t t = 0; t < g.num_tasks(); ++t) {
    const auto row = g.coords.row(t);
    coords.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["coords"] = std::move(coords);
  json edges = json::array();
  for (const TaskEdge& e : g.edges) edges.push_back(json::array({e.src, e.dst, e.weight}));
  j["edges"] = std::move(edges);
  return j;
}

inline TaskGraph tasks_from_json(const json& j, const std::string& ctx = "tasks") {
  const auto dim = detail::get_field<std::size_t>(j, "dim", ctx);
  if (dim == 0) throw ParseError(ctx + ": 'dim' must be positive");
  if (!j.contains("coords") || !j.at("coords").is_array()) throw ParseError(ctx + ": 'coords' must be an array");
  TaskGraph g;
  g.coords = PointSet(dim);
  const json& coords = j.at("coords");
  for (std::size_t t = 0; t < coords.size(); ++t) {
    const std::string where = ctx + ": coords[" + std::to_string(t) + "]";
    std::vector<double> row;
    try {
      row = coords[t].get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ParseError(where + " is not a numeric tuple");
    }
    if (row.size() != dim) throw ParseError(where + " has " + std::to_string(row.size()) + " values, expected " +
                                            std::to_string(dim));
    for (double v : row)
      if (!std::isfinite(v)) throw ParseError(where + " is not finite");
    g.coords.push_back(row);
  }
  const json edges = j.contains("edges") ? j.at("edges") : json::array();
  if (!edges.is_array()) throw ParseError(ctx + ": 'edges' must be an array");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string where = ctx + ": edges[" + std::to_string(e) + "]";
    const json& rec = edges[e];
    if (!rec.is_array() || rec.size() != 3 || !rec[0].is_number_unsigned() || !rec[1].is_number_unsigned() ||
        !rec[2].is_number())
      throw ParseError(where + " must be [src, dst, weight]");
    TaskEdge edge{rec[0].get<std::size_t>(), rec[1].get<std::size_t>(), rec[2].get<double>()};
    if (edge.src >= g.num_tasks() || edge.dst >= g.num_tasks())
      throw ParseError(where + " references a task index out of range");
    if (edge.src == edge.dst) throw ParseError(where + " is a self edge");
    if (!(edge.weight > 0.0)) throw ParseError(where + " has a non-positive weight");
    g.edges.push_back(edge);
  }
  return g;
}

inline TaskGraph load_tasks(const std::string& path) {
  return tasks_from_json(detail::parse_text(read_file(path), path), path);
}

inline void save_tasks(const TaskGraph& g, const std::string& path) { write_file(path, dump(to_json(g))); }

// --- mapping -------------------------------------------------------------

inline json to_json(const Mapping& m) {
  json j;
  j["task_to_core"] = m.task_to_core;
  j["core_to_tasks"] = m.core_to_tasks;
  return j;
}

inline Mapping mapping_from_json(const json& j, const std::string& ctx = "mapping") {
  auto t2c = detail::get_field<std::vector<std::size_t>>(j, "task_to_core", ctx);
  auto c2t = detail::get_field<std::vector<std::vector<std::size_t>>>(j, "core_to_tasks", ctx);
  Mapping m;
  m.task_to_core = std::move(t2c);
  m.core_to_tasks = std::move(c2t);
  return m;
}

inline Mapping load_mapping(const std::string& path) {
  return mapping_from_json(detail::parse_text(read_file(path), path), path);
}

inline void save_mapping(const Mapping& m, const std::string& path) { write_file(path, dump(to_json(m))); }

inline json to_json(const RotationReport& r) {
  json j;
  j["task_permutation"] = r.task_permutation;
  j["core_permutation"] = r.core_permutation;
  j["weighted_hops"] = r.weighted_hops;
  j["candidates_evaluated"] = r.candidates_evaluated;
  return j;
}

// --- metrics -------------------------------------------------------------

inline json to_json(const MetricsReport& r) {
  json j;
  j["total_hops"] = r.total_hops;
  j["average_hops"] = r.average_hops;
  j["weighted_hops"] = r.weighted_hops;
  j["max_link_data"] = r.max_link_data;
  j["max_latency"] = r.max_latency;
  j["total_messages"] = r.total_messages;
  json links = json::array();
  for (const auto& [link, data] : r.per_link_data)
    links.push_back({{"from", link.from}, {"dim", link.dim}, {"direction", link.direction}, {"data", data}});
  j["per_link_data"] = std::move(links);
  json dims = json::array();
  for (const DimDirectionLoad& d : r.per_dim_direction)
    dims.push_back({{"dim", d.dim},
                    {"direction", d.direction},
                    {"data_sum", d.data_sum},
                    {"data_max", d.data_max},
                    {"latency_sum", d.latency_sum},
                    {"latency_max", d.latency_max}});
  j["per_dim_direction"] = std::move(dims);
  return j;
}

/// Per-dimension breakdown: one row per (dimension, direction).
inline std::string per_dim_csv(const MetricsReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "dim,direction,data_sum,data_max,latency_max\n";
  for (const DimDirectionLoad& d : r.per_dim_direction)
    out << d.dim << ',' << (d.direction > 0 ? '+' : '-') << ',' << d.data_sum << ',' << d.data_max << ','
        << d.latency_max << '\n';
  return out.str();
}

// --- appendix verification ------------------------------------------------

inline json to_json(const sfc::CaseCheck& c) {
  json j;
  j["n"] = c.config.n;
  j["td"] = c.config.td;
  j["pd"] = c.config.pd;
  j["ordering"] = to_string(c.config.ordering);
  j["pass"] = c.pass;
  json cuts = json::array();
  for (const auto& cc : c.cuts) {
    cuts.push_back({{"dim", cc.measured.dim},
                    {"cut", cc.measured.cut},
                    {"pairs", cc.measured.pairs},
                    {"expected_pairs", cc.expected_pairs.str()},
                    {"measured_total", cc.measured.total_hops},
                    {"measured_average", cc.measured.average().str()},
                    {"measured_min", cc.measured.min_hops},
                    {"measured_max", cc.measured.max_hops},
                    {"analytic", cc.analytic.str()},
                    {"pass", cc.pass}});
  }
  j["cuts"] = std::move(cuts);
  json totals = json::array();
  for (const auto& [analytic, measured] : c.totals)
    totals.push_back({{"analytic", analytic.str()}, {"measured", measured}});
  j["totals"] = std::move(totals);
  return j;
}

} // namespace topomap::io
