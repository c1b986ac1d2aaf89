#pragma once

// Closed-form hop counts for Z and flipped-Z part numbering on power-of-two
// structured grids, and a brute-force oracle that measures the same
// quantities on real mappings.
//
// Conventions: 2^n tasks on a td-dimensional mesh stencil are mapped
// one-to-one onto 2^n nodes of a pd-dimensional mesh. Cuts are numbered in
// reverse (the first of the n cuts has index n-1) and cut x runs along
// dimension x mod dim. Along task dimension i there are C = n/td cuts; the
// local cut j of dimension i is global cut td*j + i.

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "topomap/machine_model.hpp"
#include "topomap/mapper.hpp"
#include "topomap/task_model.hpp"

namespace topomap::sfc {

using Integer = boost::multiprecision::cpp_int;

inline Integer pow2(long long e) {
  detail::require(e >= 0, "negative power of two");
  Integer r = 1;
  r <<= static_cast<unsigned>(e);
  return r;
}

/// Exact non-negative rational, kept reduced.
struct Rational {
  Integer num = 0;
  Integer den = 1;

  Rational() = default;
  Rational(Integer n, Integer d = 1) : num(std::move(n)), den(std::move(d)) {
    detail::require(den != 0, "zero denominator");
    const Integer g = boost::multiprecision::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const { return num.convert_to<double>() / den.convert_to<double>(); }
  std::string str() const { return den == 1 ? num.str() : num.str() + "/" + den.str(); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
};

/// Ordered neighbor pairs of a 1D line of 2^C tasks split by local cut j.
inline Integer nn1d(long long C, long long j) {
  detail::require(0 <= j && j < C, "cut index out of range");
  return pow2(C - j);
}

/// Ordered neighbor pairs split by local cut j over the whole 2^n grid.
inline Integer nn(long long n, long long j) {
  detail::require(0 <= j && j < n, "cut index out of range");
  return pow2(n - j);
}

/// Hops between Z-numbered neighbors split by local cut j of task dimension i.
inline Integer nhz(long long td, long long pd, long long i, long long j) {
  detail::require(td >= 1 && pd >= 1 && 0 <= i && i < td && j >= 0, "invalid nhz arguments");
  const long long top_dim = (td * j + i) % pd;
  Integer hops = pow2((td * j + i) / pd);
  for (long long k = 0; k < j; ++k) {
    const Integer term = pow2((td * k + i) / pd);
    if ((td * k + i) % pd == top_dim) {
      hops -= term;
    } else {
      hops += term;
    }
  }
  return hops;
}

/// Average hops between FZ-numbered neighbors split by local cut j of task
/// dimension i.
inline Integer nhf(long long td, long long pd, long long i, long long j) {
  detail::require(td >= 1 && pd >= 1 && 0 <= i && i < td && j >= 0, "invalid nhf arguments");
  if (td == pd) return 1;
  const long long e = (td * j + i) / pd;
  if (pd % td == 0) return pow2(e + 1) - 1;
  return pow2(e);
}

/// nhz specialised to pd = m * td.
inline Integer nhz_even_multiple(long long td, long long pd, long long j) {
  detail::require(td >= 1 && pd % td == 0, "pd must be a multiple of td");
  const long long m = pd / td;
  detail::require(m >= 1, "multiple must be >= 1");
  const Integer base = pow2(j / m);
  return base * (j % m) + (m - 1) * base + 2 - m;
}

/// nhz for pd = 2 * td, split by the parity of j.
inline Integer nhz_double(long long j) {
  return j % 2 == 0 ? pow2(j / 2) : pow2((j - 1) / 2 + 1);
}

/// Total Z hops along one task dimension (one 1D line) for pd = 2 * td.
inline Integer total_hops_z(long long C) {
  detail::require(C >= 1, "cut count must be >= 1");
  if (C % 2 == 0) return pow2(C + 2) - 4 * pow2(C / 2);
  return pow2(C + 2) - 3 * pow2((C + 1) / 2);
}

/// Total FZ hops along one task dimension (one 1D line) for pd = 2 * td.
inline Integer total_hops_f(long long C) {
  detail::require(C >= 1, "cut count must be >= 1");
  if (C % 2 == 0) return pow2(C + 2) - 6 * pow2(C / 2) + 2;
  return pow2(C + 2) - 4 * pow2((C + 1) / 2) + 2;
}

struct StructuredCase {
  int n = 0;
  int td = 1;
  int pd = 1;
  Ordering ordering = Ordering::Z;

  void validate() const {
    detail::require(n >= 1 && n <= 24, "bit count must be in [1, 24]");
    detail::require(td >= 1 && pd >= 1, "dimensions must be positive");
    detail::require(n % td == 0, "td must divide n");
    detail::require(n % pd == 0, "pd must divide n");
    detail::require(ordering == Ordering::Z || ordering == Ordering::FZ, "oracle supports z and fz orderings");
  }
};

/// What the oracle saw for one (task dimension, local cut) pair.
struct CutMeasurement {
  int dim = 0;
  int cut = 0;
  std::int64_t pairs = 0;
  std::int64_t total_hops = 0;
  std::int64_t min_hops = 0;
  std::int64_t max_hops = 0;

  Rational average() const { return Rational(Integer(total_hops), Integer(pairs)); }
};

struct OracleResult {
  StructuredCase config;
  std::vector<CutMeasurement> cuts; ///< ordered by dim, then cut
  /// Measured total over all cuts of each task dimension.
  std::vector<std::int64_t> dim_totals;
};

/// Builds the structured mapping with the library's own partitioner and
/// measures hops for every ordered neighbor pair, grouped by separating cut.
inline OracleResult measure_oracle(const StructuredCase& c) {
  c.validate();
  const int task_bits = c.n / c.td;
  const int node_bits = c.n / c.pd;
  const std::vector<int> task_dims(static_cast<std::size_t>(c.td), 1 << task_bits);
  const std::vector<int> node_dims(static_cast<std::size_t>(c.pd), 1 << node_bits);
  const TaskGraph tasks = gen_stencil_tasks(task_dims, std::vector<bool>(task_dims.size(), false));
  const Allocation alloc = gen_block_allocation(TorusSpec(node_dims, std::vector<bool>(node_dims.size(), false)));

  PartitionConfig cfg;
  cfg.num_parts = std::size_t{1} << c.n;
  cfg.ordering = c.ordering;
  cfg.dim_policy = DimPolicy::RoundRobin;
  const PartitionResult task_parts = mj_partition(tasks.coords, cfg);
  const PartitionResult core_parts = mj_partition(node_points(alloc), cfg);
  const Mapping mapping = get_mapping_arrays(task_parts, core_parts, tasks.num_tasks(), alloc.num_cores());

  OracleResult out;
  out.config = c;
  out.dim_totals.assign(static_cast<std::size_t>(c.td), 0);
  out.cuts.resize(static_cast<std::size_t>(c.td * task_bits));
  for (int i = 0; i < c.td; ++i)
    for (int j = 0; j < task_bits; ++j) {
      CutMeasurement& m = out.cuts[static_cast<std::size_t>(i * task_bits + j)];
      m.dim = i;
      m.cut = j;
      m.min_hops = std::numeric_limits<std::int64_t>::max();
    }

  const detail::CoreGeometry geo(alloc, mapping, tasks.num_tasks());
  for (const TaskEdge& e : tasks.edges) {
    // Stencil edges differ by one step along exactly one dimension.
    int dim = 0;
    while (tasks.coords(e.src, static_cast<std::size_t>(dim)) == tasks.coords(e.dst, static_cast<std::size_t>(dim)))
      ++dim;
    const auto lower = static_cast<std::uint64_t>(std::min(tasks.coords(e.src, static_cast<std::size_t>(dim)),
                                                           tasks.coords(e.dst, static_cast<std::size_t>(dim))));
    const int cut = std::countr_one(lower);
    CutMeasurement& m = out.cuts[static_cast<std::size_t>(dim * task_bits + cut)];
    const std::int64_t h = geo.hops(e.src, e.dst);
    ++m.pairs;
    m.total_hops += h;
    m.min_hops = std::min(m.min_hops, h);
    m.max_hops = std::max(m.max_hops, h);
    out.dim_totals[static_cast<std::size_t>(dim)] += h;
  }
  return out;
}

/// Analytic-vs-measured comparison for one structured case.
struct CaseCheck {
  StructuredCase config;
  struct CutCheck {
    CutMeasurement measured;
    Integer expected_pairs;
    Integer analytic; ///< per-pair hops (Z) or average hops (FZ)
    bool pass = false;
  };
  std::vector<CutCheck> cuts;
  /// Present when pd = 2 td: replicated closed-form totals per task dimension.
  std::vector<std::pair<Integer, std::int64_t>> totals; ///< (analytic, measured)
  bool pass = true;
};

/// Checks every cut of the case against the closed forms: Z per pair, FZ on
/// the average, pair counts everywhere, and dimension totals when pd = 2 td.
inline CaseCheck check_case(const StructuredCase& c) {
  const OracleResult r = measure_oracle(c);
  const long long C = c.n / c.td;
  CaseCheck out;
  out.config = c;
  for (const CutMeasurement& m : r.cuts) {
    CaseCheck::CutCheck cc;
    cc.measured = m;
    cc.expected_pairs = nn1d(C, m.cut) * pow2(c.n - C);
    if (c.ordering == Ordering::Z) {
      cc.analytic = nhz(c.td, c.pd, m.dim, m.cut);
      cc.pass = m.min_hops == m.max_hops && Integer(m.min_hops) == cc.analytic;
    } else {
      cc.analytic = nhf(c.td, c.pd, m.dim, m.cut);
      cc.pass = m.average() == Rational(cc.analytic);
    }
    cc.pass = cc.pass && Integer(m.pairs) == cc.expected_pairs;
    out.pass = out.pass && cc.pass;
    out.cuts.push_back(std::move(cc));
  }
  if (c.pd == 2 * c.td) {
    const Integer per_line = c.ordering == Ordering::Z ? total_hops_z(C) : total_hops_f(C);
    for (std::int64_t measured : r.dim_totals) {
      const Integer analytic = per_line * pow2(c.n - C);
      out.totals.emplace_back(analytic, measured);
      out.pass = out.pass && analytic == Integer(measured);
    }
  }
  return out;
}

/// All valid (td, pd, ordering) cases for n = 1..max_n.
inline std::vector<StructuredCase> appendix_cases(int max_n) {
  std::vector<StructuredCase> cases;
  for (int n = 1; n <= max_n; ++n)
    for (int td = 1; td <= n; ++td)
      for (int pd = 1; pd <= n; ++pd) {
        if (n % td != 0 || n % pd != 0) continue;
        for (Ordering o : {Ordering::Z, Ordering::FZ}) cases.push_back({n, td, pd, o});
      }
  return cases;
}

} // namespace topomap::sfc
