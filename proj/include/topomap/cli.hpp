#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topomap/io.hpp"
#include "topomap/mapper.hpp"
#include "topomap/sfc_analysis.hpp"
#include "topomap/table1.hpp"

namespace topomap::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kUsageError = 2 };

namespace detail {

using topomap::detail::require;

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& what) {
  T value{};
  std::istringstream in(s);
  in >> value;
  if (!in || !in.eof()) throw InputError("bad " + what + " '" + s + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const std::string& what) {
  require(!s.empty(), what + " list is empty");
  std::vector<T> out;
  for (const std::string& item : split(s, ',')) out.push_back(parse_number<T>(item, what));
  return out;
}

/// "all", "none", or one 0/1 flag per dimension.
inline std::vector<bool> parse_wrap(const std::string& s, std::size_t dims) {
  if (s == "all") return std::vector<bool>(dims, true);
  if (s == "none") return std::vector<bool>(dims, false);
  const auto flags = parse_list<int>(s, "wrap flag");
  require(flags.size() == dims, "wrap list has " + std::to_string(flags.size()) + " entries for " +
                                    std::to_string(dims) + " dimensions");
  std::vector<bool> out;
  for (int f : flags) {
    require(f == 0 || f == 1, "wrap flags must be 0 or 1");
    out.push_back(f == 1);
  }
  return out;
}

inline std::vector<bool> parse_mask(const std::string& s) {
  std::vector<bool> out;
  for (int f : parse_list<int>(s, "mask flag")) {
    require(f == 0 || f == 1, "mask flags must be 0 or 1");
    out.push_back(f == 1);
  }
  return out;
}

/// Node list written as "x,y,z;x,y,z;...".
inline std::vector<Coord> parse_nodes(const std::string& s) {
  std::vector<Coord> out;
  for (const std::string& item : split(s, ';')) out.push_back(parse_list<int>(item, "node coordinate"));
  return out;
}

inline std::vector<Connectivity> parse_classes(const std::string& s) {
  if (s == "all") return {kAllConnectivities.begin(), kAllConnectivities.end()};
  std::vector<Connectivity> out;
  for (const std::string& item : split(s, ',')) out.push_back(parse_connectivity(item));
  return out;
}

inline std::vector<Ordering> parse_orderings(const std::string& s) {
  if (s == "all") return {kTableOrderings.begin(), kTableOrderings.end()};
  std::vector<Ordering> out;
  for (const std::string& item : split(s, ',')) out.push_back(parse_ordering(item));
  return out;
}

} // namespace detail

/// Rows checked against fixed values from the published table.
inline std::vector<Table1Row> golden_table1_rows() {
  return {{65536, 8, 1}, {262144, 2, 1}, {262144, 2, 3}, {4096, 3, 4}};
}

struct GenMachineArgs {
  std::string dims;
  std::string wrap = "all";
  std::string bandwidth;
  std::string nodes;
  std::optional<std::size_t> sparse;
  std::uint64_t seed = 0;
  std::size_t cores_per_node = 1;
  std::string output;
};

inline int cmd_gen_machine(const GenMachineArgs& a) {
  const auto dims = detail::parse_list<int>(a.dims, "dimension");
  TorusSpec spec(dims, detail::parse_wrap(a.wrap, dims.size()));
  if (!a.bandwidth.empty()) {
    // One value for every cable, one per dimension, or a full
    // "d0c0,d0c1,...;d1c0,..." listing.
    if (a.bandwidth.find(';') != std::string::npos) {
      spec.bandwidth.clear();
      for (const std::string& item : detail::split(a.bandwidth, ';'))
        spec.bandwidth.push_back(detail::parse_list<double>(item, "bandwidth"));
    } else {
      const auto bw = detail::parse_list<double>(a.bandwidth, "bandwidth");
      detail::require(bw.size() == 1 || bw.size() == dims.size(),
                      "--bandwidth needs one value, one per dimension, or per-cable lists separated by ';'");
      for (std::size_t d = 0; d < dims.size(); ++d)
        spec.bandwidth[d].assign(static_cast<std::size_t>(dims[d]), bw.size() == 1 ? bw[0] : bw[d]);
    }
    spec.validate();
  }
  Allocation alloc;
  if (a.sparse) {
    alloc = gen_sparse_allocation(spec, *a.sparse, a.seed, a.cores_per_node);
  } else if (!a.nodes.empty()) {
    alloc = Allocation(spec, detail::parse_nodes(a.nodes), a.cores_per_node);
  } else {
    alloc = gen_block_allocation(spec, a.cores_per_node);
  }
  io::save_machine(alloc, a.output);
  return kSuccess;
}

struct GenTasksArgs {
  std::string dims;
  std::string wrap = "none";
  std::string output;
};

inline int cmd_gen_tasks(const GenTasksArgs& a) {
  const auto dims = detail::parse_list<int>(a.dims, "dimension");
  io::save_tasks(gen_stencil_tasks(dims, detail::parse_wrap(a.wrap, dims.size())), a.output);
  return kSuccess;
}

struct MapArgs {
  std::string machine;
  std::string tasks;
  std::string output;
  std::string ordering = "z";
  std::string dim_policy = "longest";
  std::string levels;
  bool uneven_bisection = false;
  bool shift = false;
  bool bw_scale = false;
  std::string box_lift;
  double outer_scale = 16.0;
  std::string mask;
  std::string task_mask;
  bool rotations = false;
  std::string rotation_report;
};

inline int cmd_map(const MapArgs& a) {
  PartitionConfig cfg;
  cfg.ordering = parse_ordering(a.ordering);
  cfg.dim_policy = parse_dim_policy(a.dim_policy);
  cfg.uneven_bisection = a.uneven_bisection;
  if (!a.levels.empty()) cfg.parts_per_level = detail::parse_list<std::size_t>(a.levels, "parts per level");

  CoordinateTransforms tf;
  tf.shift = a.shift;
  tf.bandwidth_scale = a.bw_scale;
  if (!a.box_lift.empty()) tf.box_lift = BoxLiftParams{detail::parse_list<int>(a.box_lift, "box extent"), a.outer_scale};
  if (!a.mask.empty()) tf.core_mask = detail::parse_mask(a.mask);
  if (!a.task_mask.empty()) tf.task_mask = detail::parse_mask(a.task_mask);
  detail::require(a.rotation_report.empty() || a.rotations, "--rotation-report requires --rotations");

  const Allocation alloc = io::load_machine(a.machine);
  const TaskGraph tasks = io::load_tasks(a.tasks);
  try {
    tasks.validate();
  } catch (const InputError& e) {
    throw InputError(a.tasks + ": " + e.what());
  }
  // Partition counts depend on the inputs, so this check runs after loading.
  cfg.num_parts = std::min(tasks.num_tasks(), alloc.num_cores());
  if (!cfg.parts_per_level.empty()) {
    try {
      cfg.validate();
    } catch (const InputError& e) {
      throw InputError(a.tasks + " on " + a.machine + ": " + e.what());
    }
  }

  Mapping mapping;
  try {
    if (a.rotations) {
      auto [m, rep] = map_best_rotation(tasks, alloc, cfg, tf);
      mapping = std::move(m);
      if (!a.rotation_report.empty()) io::write_file(a.rotation_report, io::dump(io::to_json(rep)));
    } else {
      mapping = map_tasks(tasks, alloc, cfg, tf);
    }
  } catch (const InputError& e) {
    throw InputError("mapping " + a.tasks + " onto " + a.machine + ": " + e.what());
  }
  io::save_mapping(mapping, a.output);
  return kSuccess;
}

struct EvalArgs {
  std::string machine;
  std::string tasks;
  std::string mapping;
  std::string output;
  std::string per_dim;
};

inline int cmd_eval(const EvalArgs& a) {
  const Allocation alloc = io::load_machine(a.machine);
  const TaskGraph tasks = io::load_tasks(a.tasks);
  const Mapping mapping = io::load_mapping(a.mapping);
  try {
    mapping.validate(tasks.num_tasks(), alloc.num_cores());
  } catch (const InputError& e) {
    throw InputError(a.mapping + ": " + e.what());
  }
  const MetricsReport rep = report(tasks, alloc, mapping);
  io::write_file(a.output, io::dump(io::to_json(rep)));
  if (!a.per_dim.empty()) io::write_file(a.per_dim, io::per_dim_csv(rep));
  return kSuccess;
}

struct Table1Args {
  std::string rows = "golden";
  std::optional<std::size_t> tasks;
  std::optional<int> pd;
  std::optional<int> td;
  std::string classes = "all";
  std::string orderings = "all";
  std::string output;
};

inline int cmd_table1(const Table1Args& a) {
  std::vector<Table1Row> rows;
  const bool explicit_row = a.tasks || a.pd || a.td;
  if (explicit_row) {
    detail::require(a.tasks && a.pd && a.td, "--tasks, --pd and --td must be given together");
    rows.push_back({*a.tasks, *a.pd, *a.td});
  } else if (a.rows == "all") {
    rows = table1_manifest();
  } else if (a.rows == "golden") {
    rows = golden_table1_rows();
  } else {
    throw InputError("--rows must be 'all' or 'golden'");
  }
  const auto classes = detail::parse_classes(a.classes);
  const auto orderings = detail::parse_orderings(a.orderings);
  for (const Table1Row& r : rows) {
    detail::require(r.tasks >= 1 && r.pd >= 1 && r.td >= 1, "row values must be positive");
    equal_extent(r.tasks, r.pd);
    equal_extent(r.tasks, r.td);
  }

  std::vector<Table1Result> results;
  for (const Table1Row& r : rows) results.push_back(compute_table1_row(r, orderings, classes));
  std::ostringstream csv;
  write_table1_csv(csv, results, classes);
  io::write_file(a.output, csv.str());
  return kSuccess;
}

struct VerifyAppendixArgs {
  int max_n = 12;
  std::optional<int> td;
  std::optional<int> pd;
  std::string output;
};

inline int cmd_verify_appendix(const VerifyAppendixArgs& a, std::ostream& out) {
  detail::require(a.max_n >= 1 && a.max_n <= 24, "--max-n must be in [1, 24]");
  detail::require(!a.td || *a.td >= 1, "--td must be positive");
  detail::require(!a.pd || *a.pd >= 1, "--pd must be positive");

  std::vector<sfc::CaseCheck> checks;
  std::vector<std::string> failures;
  for (int n = 1; n <= a.max_n; ++n) {
    for (const char* role : {"td", "pd"}) {
      const auto& filter = std::string(role) == "td" ? a.td : a.pd;
      if (filter && n % *filter != 0)
        out << "note: n=" << n << " skipped, " << role << "=" << *filter << " does not divide n\n";
    }
    for (int td = 1; td <= n; ++td)
      for (int pd = 1; pd <= n; ++pd) {
        if (n % td != 0 || n % pd != 0) continue;
        if ((a.td && td != *a.td) || (a.pd && pd != *a.pd)) continue;
        for (Ordering o : {Ordering::Z, Ordering::FZ}) checks.push_back(sfc::check_case({n, td, pd, o}));
      }
  }

  out << "n,td,pd,ordering,dim,cut,pairs,expected_pairs,measured,analytic,pass\n";
  for (const sfc::CaseCheck& c : checks) {
    for (const auto& cc : c.cuts) {
      // Z is exact per pair, so report the common value; FZ reports the mean.
      const std::string measured = c.config.ordering == Ordering::Z && cc.measured.min_hops == cc.measured.max_hops
                                       ? std::to_string(cc.measured.min_hops)
                                       : cc.measured.average().str();
      out << c.config.n << ',' << c.config.td << ',' << c.config.pd << ',' << to_string(c.config.ordering) << ','
          << cc.measured.dim << ',' << cc.measured.cut << ',' << cc.measured.pairs << ',' << cc.expected_pairs << ','
          << measured << ',' << cc.analytic << ',' << (cc.pass ? "yes" : "NO") << '\n';
    }
    for (std::size_t i = 0; i < c.totals.size(); ++i)
      out << c.config.n << ',' << c.config.td << ',' << c.config.pd << ',' << to_string(c.config.ordering) << ','
          << i << ",total,,," << c.totals[i].second << ',' << c.totals[i].first << ','
          << (c.totals[i].first == sfc::Integer(c.totals[i].second) ? "yes" : "NO") << '\n';
    if (!c.pass)
      failures.push_back("n=" + std::to_string(c.config.n) + " td=" + std::to_string(c.config.td) +
                         " pd=" + std::to_string(c.config.pd) + " " + to_string(c.config.ordering));
  }
  out << "cases: " << checks.size() << ", failures: " << failures.size() << '\n';
  for (const std::string& f : failures) out << "FAILED " << f << '\n';

  if (!a.output.empty()) {
    io::json rep;
    rep["max_n"] = a.max_n;
    rep["pass"] = failures.empty();
    io::json cases = io::json::array();
    for (const sfc::CaseCheck& c : checks) cases.push_back(io::to_json(c));
    rep["cases"] = std::move(cases);
    io::write_file(a.output, io::dump(rep));
  }
  return failures.empty() ? kSuccess : kVerificationFailure;
}

/// Parses the command line and runs one subcommand. Returns the process exit
/// code; diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Topology-aware task mapping for mesh and torus machines"};
  app.require_subcommand(1);

  GenMachineArgs gm;
  auto* gen_machine = app.add_subcommand("gen-machine", "Write a machine/allocation file");
  gen_machine->add_option("--dims", gm.dims, "Extents, e.g. 4,4,4")->required();
  gen_machine->add_option("--wrap", gm.wrap, "all, none, or 0/1 per dimension")->capture_default_str();
  gen_machine->add_option("--bandwidth", gm.bandwidth, "One value, one per dimension, or per-cable lists");
  auto* nodes_opt = gen_machine->add_option("--nodes", gm.nodes, "Explicit nodes, e.g. 0,0;0,1;1,1");
  auto* sparse_opt = gen_machine->add_option("--sparse", gm.sparse, "Number of nodes of a seeded sparse allocation");
  gen_machine->add_option("--seed", gm.seed, "Seed for --sparse")->capture_default_str()->needs(sparse_opt);
  nodes_opt->excludes(sparse_opt);
  gen_machine->add_option("--cores-per-node", gm.cores_per_node)->capture_default_str();
  gen_machine->add_option("-o,--output", gm.output, "Output path (default stdout)");

  GenTasksArgs gt;
  auto* gen_tasks = app.add_subcommand("gen-tasks", "Write a stencil task graph");
  gen_tasks->add_option("--dims", gt.dims, "Extents, e.g. 8,8")->required();
  gen_tasks->add_option("--wrap", gt.wrap, "all, none, or 0/1 per dimension")->capture_default_str();
  gen_tasks->add_option("-o,--output", gt.output, "Output path (default stdout)");

  MapArgs mp;
  auto* map = app.add_subcommand("map", "Map tasks to cores");
  map->add_option("--machine", mp.machine)->required();
  map->add_option("--tasks", mp.tasks)->required();
  map->add_option("-o,--output", mp.output, "Mapping path (default stdout)");
  map->add_option("--ordering", mp.ordering, "z, gray, fz or mfz")->capture_default_str();
  map->add_option("--dim-policy", mp.dim_policy, "longest or round-robin")->capture_default_str();
  map->add_option("--levels", mp.levels, "Parts per partitioning level, e.g. 4,4,2");
  map->add_flag("--uneven-bisection", mp.uneven_bisection);
  map->add_flag("--shift", mp.shift, "Move torus coordinates across the largest gap");
  auto* bw_opt = map->add_flag("--bw-scale", mp.bw_scale, "Stretch coordinates by inverse link bandwidth");
  auto* box_opt = map->add_option("--box-lift", mp.box_lift, "Box extents, e.g. 2,2,8");
  bw_opt->excludes(box_opt);
  map->add_option("--outer-scale", mp.outer_scale, "Box lift outer coordinate scale")->capture_default_str();
  map->add_option("--mask", mp.mask, "Machine dimensions to keep, e.g. 1,1,1,1,0");
  map->add_option("--task-mask", mp.task_mask, "Task dimensions to keep");
  map->add_flag("--rotations", mp.rotations, "Search all axis permutations");
  map->add_option("--rotation-report", mp.rotation_report, "Write the rotation search summary here");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate a mapping");
  eval->add_option("--machine", ev.machine)->required();
  eval->add_option("--tasks", ev.tasks)->required();
  eval->add_option("--mapping", ev.mapping)->required();
  eval->add_option("-o,--output", ev.output, "Report path (default stdout)");
  eval->add_option("--per-dim", ev.per_dim, "Per-dimension CSV path");

  Table1Args t1;
  auto* table1 = app.add_subcommand("table1", "AverageHops for the ordering comparison grids");
  table1->add_option("--rows", t1.rows, "golden or all")->capture_default_str();
  table1->add_option("--tasks", t1.tasks);
  table1->add_option("--pd", t1.pd);
  table1->add_option("--td", t1.td);
  table1->add_option("--classes", t1.classes, "all or a list of mesh-to-mesh,mesh-to-torus,torus-to-torus")
      ->capture_default_str();
  table1->add_option("--orderings", t1.orderings, "all or a list of z,gray,fz,mfz")->capture_default_str();
  table1->add_option("-o,--output", t1.output, "CSV path (default stdout)");

  VerifyAppendixArgs va;
  auto* verify = app.add_subcommand("verify-appendix", "Check the closed-form hop counts against measurements");
  verify->add_option("--max-n", va.max_n)->capture_default_str();
  verify->add_option("--td", va.td, "Only this task dimension");
  verify->add_option("--pd", va.pd, "Only this machine dimension");
  verify->add_option("-o,--output", va.output, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*gen_machine) return cmd_gen_machine(gm);
    if (*gen_tasks) return cmd_gen_tasks(gt);
    if (*map) return cmd_map(mp);
    if (*eval) return cmd_eval(ev);
    if (*table1) return cmd_table1(t1);
    if (*verify) return cmd_verify_appendix(va, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

} // namespace topomap::cli
