#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "topomap/errors.hpp"
#include "topomap/point_set.hpp"

namespace topomap {

using Coord = std::vector<int>;

/// Mesh/torus network shape. bandwidth[d][c] belongs to the cable pair
/// joining coordinate c and c+1 along d; entry L_d-1 is the wrap cable.
struct TorusSpec {
  std::vector<int> dims;
  std::vector<bool> wrap;
  std::vector<std::vector<double>> bandwidth;

  TorusSpec() = default;

  TorusSpec(std::vector<int> extents, std::vector<bool> wraps)
      : dims(std::move(extents)), wrap(std::move(wraps)) {
    for (int l : dims) bandwidth.emplace_back(static_cast<std::size_t>(std::max(l, 0)), 1.0);
    validate();
  }

  TorusSpec(std::vector<int> extents, std::vector<bool> wraps,
            std::vector<std::vector<double>> bw)
      : dims(std::move(extents)), wrap(std::move(wraps)), bandwidth(std::move(bw)) {
    validate();
  }

  std::size_t num_dims() const { return dims.size(); }

  std::size_t num_nodes() const {
    std::size_t n = 1;
    for (int l : dims) n *= static_cast<std::size_t>(l);
    return n;
  }

  bool contains(const Coord& c) const {
    if (c.size() != dims.size()) return false;
    for (std::size_t d = 0; d < dims.size(); ++d)
      if (c[d] < 0 || c[d] >= dims[d]) return false;
    return true;
  }

  /// Bandwidth of the directed link leaving `from` along `dim` in `direction`.
  double link_bandwidth(const Coord& from, std::size_t dim, int direction) const {
    const int l = dims[dim];
    const int cable = direction > 0 ? from[dim] : (from[dim] - 1 + l) % l;
    return bandwidth[dim][static_cast<std::size_t>(cable)];
  }

  void validate() const {
    detail::require(!dims.empty(), "torus spec needs at least one dimension");
    detail::require(wrap.size() == dims.size(), "wrap flags must match dimension count");
    detail::require(bandwidth.size() == dims.size(), "bandwidth lists must match dimension count");
    for (std::size_t d = 0; d < dims.size(); ++d) {
      detail::require(dims[d] >= 1, "dimension extents must be >= 1");
      detail::require(bandwidth[d].size() == static_cast<std::size_t>(dims[d]),
                      "bandwidth list for dimension " + std::to_string(d) +
                          " must have one entry per coordinate");
      for (double b : bandwidth[d])
        detail::require(b > 0.0 && std::isfinite(b), "bandwidths must be positive");
    }
  }

  friend bool operator==(const TorusSpec&, const TorusSpec&) = default;
};

/// Nodes granted to a job; core i lives on node i / cores_per_node.
struct Allocation {
  TorusSpec spec;
  std::vector<Coord> nodes;
  std::size_t cores_per_node = 1;

  Allocation() = default;

  Allocation(TorusSpec s, std::vector<Coord> n, std::size_t cpn = 1)
      : spec(std::move(s)), nodes(std::move(n)), cores_per_node(cpn) {
    validate();
  }

  std::size_t num_cores() const { return nodes.size() * cores_per_node; }
  std::size_t node_of_core(std::size_t core) const { return core / cores_per_node; }
  const Coord& core_coord(std::size_t core) const { return nodes[node_of_core(core)]; }

  void validate() const {
    spec.validate();
    detail::require(cores_per_node >= 1, "cores_per_node must be positive");
    std::vector<Coord> sorted = nodes;
    for (const Coord& c : sorted)
      detail::require(spec.contains(c), "allocated node outside machine bounds");
    std::sort(sorted.begin(), sorted.end());
    detail::require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                    "allocation lists a node twice");
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// A directed physical link; the reverse direction is a different link.
struct Link {
  Coord from;
  int dim = 0;
  int direction = 1;

  friend auto operator<=>(const Link&, const Link&) = default;
  friend bool operator==(const Link&, const Link&) = default;
};

namespace detail {

inline void require_in_bounds(const TorusSpec& spec, const Coord& c) {
  require(spec.contains(c), "coordinate outside machine bounds");
}

inline int axis_distance(const TorusSpec& spec, std::size_t d, int a, int b) {
  const int delta = std::abs(a - b);
  return spec.wrap[d] ? std::min(delta, spec.dims[d] - delta) : delta;
}

inline bool less_msb(std::uint64_t x, std::uint64_t y) { return x < y && x < (x ^ y); }

/// Z-order comparison of non-negative coordinate tuples (dimension 0 is the
/// most significant axis within each bit level).
inline bool z_order_less(const Coord& a, const Coord& b) {
  std::size_t msd = 0;
  std::uint64_t best = 0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const std::uint64_t x = static_cast<std::uint64_t>(a[d]) ^ static_cast<std::uint64_t>(b[d]);
    if (less_msb(best, x)) {
      msd = d;
      best = x;
    }
  }
  return a[msd] < b[msd];
}

inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Shortest-path hop count; wrapped dimensions take the shorter way round.
inline int hop_distance(const TorusSpec& spec, const Coord& a, const Coord& b) {
  detail::require_in_bounds(spec, a);
  detail::require_in_bounds(spec, b);
  int hops = 0;
  for (std::size_t d = 0; d < spec.dims.size(); ++d) hops += detail::axis_distance(spec, d, a[d], b[d]);
  return hops;
}

/// Dimension-order route: dimensions corrected in increasing index, each in
/// the shorter direction; a half-way tie on a torus goes the + way.
inline std::vector<Link> route(const TorusSpec& spec, const Coord& a, const Coord& b) {
  detail::require_in_bounds(spec, a);
  detail::require_in_bounds(spec, b);
  std::vector<Link> links;
  Coord at = a;
  for (std::size_t d = 0; d < spec.dims.size(); ++d) {
    const int l = spec.dims[d];
    int forward = ((b[d] - at[d]) % l + l) % l; // steps going +
    int backward = (l - forward) % l;           // steps going -
    int dir = 0;
    int steps = 0;
    if (!spec.wrap[d]) {
      dir = b[d] >= at[d] ? 1 : -1;
      steps = std::abs(b[d] - at[d]);
    } else if (forward <= backward) {
      dir = 1;
      steps = forward;
    } else {
      dir = -1;
      steps = backward;
    }
    for (int s = 0; s < steps; ++s) {
      links.push_back(Link{at, static_cast<int>(d), dir});
      at[d] = ((at[d] + dir) % l + l) % l;
    }
  }
  return links;
}

/// Node coordinates as points, one row per allocated node.
inline PointSet node_points(const Allocation& alloc) {
  PointSet out(alloc.spec.num_dims(), alloc.nodes.size());
  for (std::size_t i = 0; i < alloc.nodes.size(); ++i)
    for (std::size_t d = 0; d < alloc.spec.num_dims(); ++d) out(i, d) = alloc.nodes[i][d];
  return out;
}

/// Moves the low side of the largest coordinate gap of each wrapped dimension
/// up by the extent, so nodes near the seam become geometrically close.
inline PointSet shift_coordinates(const Allocation& alloc) {
  detail::require(!alloc.nodes.empty(), "cannot shift an empty allocation");
  PointSet out = node_points(alloc);
  const TorusSpec& spec = alloc.spec;
  for (std::size_t d = 0; d < spec.num_dims(); ++d) {
    if (!spec.wrap[d]) continue;
    std::vector<int> occupied;
    occupied.reserve(alloc.nodes.size());
    for (const Coord& c : alloc.nodes) occupied.push_back(c[d]);
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());

    const int l = spec.dims[d];
    int best_gap = l - occupied.back() + occupied.front(); // seam gap
    std::optional<int> border;
    for (std::size_t k = 1; k < occupied.size(); ++k) {
      const int gap = occupied[k] - occupied[k - 1];
      if (gap > best_gap) {
        best_gap = gap;
        border = occupied[k];
      }
    }
    if (!border || best_gap <= 1) continue;
    for (std::size_t i = 0; i < alloc.nodes.size(); ++i)
      if (alloc.nodes[i][d] < *border) out(i, d) += l;
  }
  return out;
}

namespace detail {

/// Prefix sums of 1/bandwidth along one dimension, normalized by the mean
/// bandwidth of the links that exist.
struct BandwidthAxis {
  std::vector<double> prefix; // prefix[c] = position of coordinate c
  double period = 0.0;        // position of c + L relative to c

  BandwidthAxis(const TorusSpec& spec, std::size_t d) {
    const int l = spec.dims[d];
    const std::vector<double>& bw = spec.bandwidth[d];
    const std::size_t cables = spec.wrap[d] ? static_cast<std::size_t>(l) : static_cast<std::size_t>(l - 1);
    double norm = 1.0;
    if (cables > 0) {
      norm = std::accumulate(bw.begin(), bw.begin() + static_cast<std::ptrdiff_t>(cables), 0.0) /
             static_cast<double>(cables);
    }
    prefix.assign(static_cast<std::size_t>(l) + 1, 0.0);
    for (int c = 0; c < l; ++c) prefix[c + 1] = prefix[c] + norm / bw[c];
    period = prefix[l];
  }

  double position(double c) const {
    const long ic = std::lround(c);
    const long l = static_cast<long>(prefix.size()) - 1;
    const long wraps = ic >= 0 ? ic / l : -((-ic + l - 1) / l);
    const long base = ic - wraps * l;
    return prefix[static_cast<std::size_t>(base)] + static_cast<double>(wraps) * period;
  }
};

} // namespace detail

/// Rescales integer-valued (possibly shifted) coordinates so that a hop over a
/// fast link is geometrically shorter than a hop over a slow one.
inline PointSet scale_by_bandwidth(const TorusSpec& spec, const PointSet& coords) {
  detail::require(coords.dim() == spec.num_dims(), "coordinate dimension mismatch");
  PointSet out(coords.dim(), coords.size());
  for (std::size_t d = 0; d < spec.num_dims(); ++d) {
    detail::BandwidthAxis axis(spec, d);
    for (std::size_t i = 0; i < coords.size(); ++i) out(i, d) = axis.position(coords(i, d));
  }
  return out;
}

inline PointSet scale_by_bandwidth(const Allocation& alloc) {
  return scale_by_bandwidth(alloc.spec, node_points(alloc));
}

/// Lifts each coordinate into (outer box index * outer_scale, offset inside
/// box); outer coordinates come first.
inline PointSet box_lift(const PointSet& coords, const std::vector<int>& box_dims, double outer_scale) {
  detail::require(box_dims.size() == coords.dim(), "box dimensions must match coordinate dimension");
  detail::require(outer_scale > 0.0, "outer scale must be positive");
  for (int b : box_dims) detail::require(b >= 1, "box extents must be >= 1");
  const std::size_t pd = coords.dim();
  PointSet out(2 * pd, coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t d = 0; d < pd; ++d) {
      const long c = std::lround(coords(i, d));
      const long b = box_dims[d];
      out(i, d) = static_cast<double>(c / b) * outer_scale;
      out(i, pd + d) = static_cast<double>(c % b);
    }
  }
  return out;
}

inline PointSet box_lift(const Allocation& alloc, const std::vector<int>& box_dims, double outer_scale) {
  detail::require(box_dims.size() == alloc.spec.num_dims(), "box dimensions must match machine dimension");
  return box_lift(node_points(alloc), box_dims, outer_scale);
}

/// Drops the coordinates whose keep flag is false.
inline PointSet mask_dimensions(const PointSet& points, const std::vector<bool>& keep) {
  detail::require(keep.size() == points.dim(), "mask length must match point dimension");
  const auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
  detail::require(kept > 0, "mask must keep at least one dimension");
  PointSet out(kept, points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t k = 0;
    for (std::size_t d = 0; d < points.dim(); ++d)
      if (keep[d]) out(i, k++) = points(i, d);
  }
  return out;
}

/// Every node of the grid, row-major (last dimension fastest).
inline Allocation gen_block_allocation(const TorusSpec& spec, std::size_t cores_per_node = 1) {
  spec.validate();
  std::vector<Coord> nodes;
  nodes.reserve(spec.num_nodes());
  Coord c(spec.num_dims(), 0);
  for (std::size_t n = 0; n < spec.num_nodes(); ++n) {
    nodes.push_back(c);
    for (std::size_t d = spec.num_dims(); d-- > 0;) {
      if (++c[d] < spec.dims[d]) break;
      c[d] = 0;
    }
  }
  Allocation alloc;
  alloc.spec = spec;
  alloc.nodes = std::move(nodes);
  alloc.cores_per_node = cores_per_node;
  detail::require(cores_per_node >= 1, "cores_per_node must be positive");
  return alloc;
}

/// Scattered allocation: walk the grid's Z-order curve from a seeded offset,
/// dropping each visited node with probability 1/4, until enough are taken.
inline Allocation gen_sparse_allocation(const TorusSpec& spec, std::size_t node_count, std::uint64_t seed,
                                        std::size_t cores_per_node = 1) {
  spec.validate();
  const std::size_t total = spec.num_nodes();
  detail::require(node_count <= total, "requested " + std::to_string(node_count) + " nodes but the grid has " +
                                           std::to_string(total));
  Allocation block = gen_block_allocation(spec, cores_per_node);
  std::vector<Coord> curve = std::move(block.nodes);
  std::sort(curve.begin(), curve.end(), detail::z_order_less);

  std::mt19937_64 rng(seed);
  constexpr double drop_probability = 0.25;
  std::vector<bool> taken(total, false);
  std::vector<Coord> nodes;
  nodes.reserve(node_count);
  std::size_t pos = total == 0 ? 0 : static_cast<std::size_t>(rng() % total);
  while (nodes.size() < node_count) {
    if (!taken[pos] && detail::unit_draw(rng) >= drop_probability) {
      taken[pos] = true;
      nodes.push_back(curve[pos]);
    }
    pos = (pos + 1) % total;
  }
  return Allocation(spec, std::move(nodes), cores_per_node);
}

} // namespace topomap
