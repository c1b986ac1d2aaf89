#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <limits>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "topomap/errors.hpp"
#include "topomap/point_set.hpp"

namespace topomap {

/// Part-numbering scheme. After each bisection, Gray negates every coordinate
/// of the upper half, FZ negates only the cut coordinate of the upper half,
/// MFZ negates the cut coordinate of the lower half, and Z negates nothing.
enum class Ordering { Z, Gray, FZ, MFZ };

enum class DimPolicy { Longest, RoundRobin };

inline std::string to_string(Ordering o) {
  switch (o) {
  case Ordering::Z: return "z";
  case Ordering::Gray: return "gray";
  case Ordering::FZ: return "fz";
  case Ordering::MFZ: return "mfz";
  }
  return "?";
}

inline std::string to_string(DimPolicy p) { return p == DimPolicy::Longest ? "longest" : "round-robin"; }

inline Ordering parse_ordering(const std::string& name) {
  if (name == "z" || name == "Z") return Ordering::Z;
  if (name == "gray" || name == "GRAY") return Ordering::Gray;
  if (name == "fz" || name == "FZ") return Ordering::FZ;
  if (name == "mfz" || name == "MFZ") return Ordering::MFZ;
  throw InputError("unknown ordering '" + name + "' (expected z, gray, fz or mfz)");
}

inline DimPolicy parse_dim_policy(const std::string& name) {
  if (name == "longest") return DimPolicy::Longest;
  if (name == "round-robin" || name == "round_robin") return DimPolicy::RoundRobin;
  throw InputError("unknown dimension policy '" + name + "' (expected longest or round-robin)");
}

template <std::unsigned_integral T>
constexpr T gray_encode(T i) {
  return i ^ (i >> 1);
}

template <std::unsigned_integral T>
constexpr T gray_decode(T g) {
  for (T shift = 1; shift < std::numeric_limits<T>::digits; shift <<= 1) g ^= g >> shift;
  return g;
}

/// Prime-weighted uneven bisection: with q the largest prime divisor of
/// parts, the left side takes ceil(q/2)/q of the parts.
inline std::pair<std::size_t, std::size_t> uneven_split_counts(std::size_t parts) {
  detail::require(parts >= 2, "uneven split needs at least two parts");
  std::size_t q = 1;
  std::size_t rest = parts;
  for (std::size_t f = 2; f * f <= rest; ++f) {
    while (rest % f == 0) {
      q = f;
      rest /= f;
    }
  }
  if (rest > 1) q = std::max(q, rest);
  const std::size_t unit = parts / q;
  return {(q + 1) / 2 * unit, q / 2 * unit};
}

struct PartitionConfig {
  std::size_t num_parts = 1;
  /// Empty means automatic (bisection, ceil(log2 num_parts) levels).
  std::optional<std::size_t> recursion_depth;
  /// Parts created at each level; must multiply to num_parts.
  std::vector<std::size_t> parts_per_level;
  Ordering ordering = Ordering::Z;
  DimPolicy dim_policy = DimPolicy::Longest;
  bool uneven_bisection = false;

  /// Per-level part counts actually used; empty for plain bisection.
  std::vector<std::size_t> level_parts() const {
    if (!parts_per_level.empty() || !recursion_depth) return parts_per_level;
    // Spread num_parts over the requested depth, smallest divisor that keeps
    // the remaining levels feasible first.
    std::vector<std::size_t> out;
    std::size_t remaining = num_parts;
    for (std::size_t left = *recursion_depth; left > 0; --left) {
      const auto target = static_cast<std::size_t>(
          std::ceil(std::pow(static_cast<double>(remaining), 1.0 / static_cast<double>(left)) - 1e-9));
      std::size_t p = std::max<std::size_t>(target, 1);
      while (remaining % p != 0) ++p;
      out.push_back(p);
      remaining /= p;
    }
    return out;
  }

  bool is_bisection() const {
    const auto levels = level_parts();
    return std::all_of(levels.begin(), levels.end(), [](std::size_t p) { return p == 2; });
  }

  void validate() const {
    detail::require(num_parts >= 1, "number of parts must be >= 1");
    if (!parts_per_level.empty()) {
      std::size_t prod = 1;
      for (std::size_t p : parts_per_level) {
        detail::require(p >= 1, "parts per level must be >= 1");
        prod *= p;
      }
      detail::require(prod == num_parts, "parts per level must multiply to the number of parts");
      detail::require(!recursion_depth || *recursion_depth == parts_per_level.size(),
                      "recursion depth disagrees with parts per level");
    }
    if (recursion_depth && parts_per_level.empty())
      detail::require(*recursion_depth >= 1 || num_parts == 1, "recursion depth must be >= 1");
    if (ordering != Ordering::Z)
      detail::require(is_bisection(), "gray, fz and mfz numbering require bisection");
    if (uneven_bisection)
      detail::require(level_parts().empty(), "uneven bisection cannot be combined with multisection levels");
  }
};

struct PartitionResult {
  std::vector<std::size_t> part;
  std::size_t num_parts = 0;

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s(num_parts, 0);
    for (std::size_t p : part) ++s[p];
    return s;
  }

  std::vector<std::vector<std::size_t>> members() const {
    std::vector<std::vector<std::size_t>> m(num_parts);
    for (std::size_t i = 0; i < part.size(); ++i) m[part[i]].push_back(i);
    return m;
  }

  friend bool operator==(const PartitionResult&, const PartitionResult&) = default;
};

namespace detail {

/// Strict total order used by the 1D split: cut coordinate, then the whole
/// tuple lexicographically, then the original index.
struct SplitKeyLess {
  const double* coords;
  std::size_t dim;
  std::size_t cut;

  bool operator()(std::size_t a, std::size_t b) const {
    const double* pa = coords + a * dim;
    const double* pb = coords + b * dim;
    if (pa[cut] != pb[cut]) return pa[cut] < pb[cut];
    for (std::size_t d = 0; d < dim; ++d)
      if (pa[d] != pb[d]) return pa[d] < pb[d];
    return a < b;
  }
};

inline std::size_t longest_dimension(const double* coords, std::size_t dim, std::span<const std::size_t> active) {
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i : active) {
    const double* p = coords + i * dim;
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  std::size_t best = 0;
  for (std::size_t d = 1; d < dim; ++d)
    if (hi[d] - lo[d] > hi[best] - lo[best]) best = d;
  return best;
}

inline std::pair<std::size_t, std::size_t> bisection_counts(std::size_t np, bool uneven) {
  if (uneven) return uneven_split_counts(np);
  return {(np + 1) / 2, np / 2};
}

/// Nearest-integer share of n for np_part out of np parts (halves round up).
inline std::size_t apportion(std::size_t n, std::size_t np_part, std::size_t np) {
  return (2 * n * np_part + np) / (2 * np);
}

class MultiJagged {
public:
  MultiJagged(const PointSet& points, const PartitionConfig& cfg)
      : cfg_(cfg), dim_(points.dim()), work_(points.values()), levels_(cfg.level_parts()) {
    index_.resize(points.size());
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    part_.assign(points.size(), 0);
    total_levels_ = levels_.empty() ? bisection_depth(cfg.num_parts) : levels_.size();
  }

  PartitionResult run() {
    recurse(0, index_.size(), cfg_.num_parts, 0, 0);
    return PartitionResult{std::move(part_), cfg_.num_parts};
  }

private:
  std::size_t bisection_depth(std::size_t np) {
    if (np <= 1) return 0;
    const auto [l, r] = bisection_counts(np, cfg_.uneven_bisection);
    return 1 + std::max(bisection_depth(l), bisection_depth(r));
  }

  std::size_t cut_dimension(std::size_t lo, std::size_t hi, std::size_t level) const {
    if (cfg_.dim_policy == DimPolicy::RoundRobin) return (total_levels_ - 1 - level) % dim_;
    return longest_dimension(work_.data(), dim_, std::span<const std::size_t>(index_.data() + lo, hi - lo));
  }

  void negate(std::size_t lo, std::size_t hi, std::optional<std::size_t> only_dim) {
    for (std::size_t k = lo; k < hi; ++k) {
      double* p = work_.data() + index_[k] * dim_;
      if (only_dim) {
        p[*only_dim] = -p[*only_dim];
      } else {
        for (std::size_t d = 0; d < dim_; ++d) p[d] = -p[d];
      }
    }
  }

  void recurse(std::size_t lo, std::size_t hi, std::size_t np, std::size_t level, std::size_t base) {
    if (np == 1 || hi == lo) {
      for (std::size_t k = lo; k < hi; ++k) part_[index_[k]] = base;
      return;
    }
    const std::size_t n = hi - lo;
    const std::size_t d = cut_dimension(lo, hi, level);
    const SplitKeyLess less{work_.data(), dim_, d};
    auto first = index_.begin() + static_cast<std::ptrdiff_t>(lo);

    if (!levels_.empty() && levels_[level] != 2) {
      // Z-numbered multisection into levels_[level] slabs.
      const std::size_t slabs = levels_[level];
      const std::size_t child = np / slabs;
      std::sort(first, first + static_cast<std::ptrdiff_t>(n), less);
      std::size_t start = lo;
      for (std::size_t s = 0; s < slabs; ++s) {
        const std::size_t stop = lo + apportion(n, child * (s + 1), np);
        recurse(start, stop, child, level + 1, base + s * child);
        start = stop;
      }
      return;
    }

    const auto [np_left, np_right] =
        levels_.empty() ? bisection_counts(np, cfg_.uneven_bisection) : std::pair{np / 2, np / 2};
    const std::size_t n_left = apportion(n, np_left, np);
    if (n_left > 0 && n_left < n)
      std::nth_element(first, first + static_cast<std::ptrdiff_t>(n_left), first + static_cast<std::ptrdiff_t>(n), less);
    const std::size_t mid = lo + n_left;

    switch (cfg_.ordering) {
    case Ordering::Z: break;
    case Ordering::Gray: negate(mid, hi, std::nullopt); break;
    case Ordering::FZ: negate(mid, hi, d); break;
    case Ordering::MFZ: negate(lo, mid, d); break;
    }
    recurse(lo, mid, np_left, level + 1, base);
    recurse(mid, hi, np_right, level + 1, base + np_left);
  }

  const PartitionConfig& cfg_;
  std::size_t dim_;
  std::vector<double> work_;
  std::vector<std::size_t> levels_;
  std::vector<std::size_t> index_;
  std::vector<std::size_t> part_;
  std::size_t total_levels_ = 0;
};

} // namespace detail

/// Result of a counted 1D split: `left` holds the n_left smallest keys.
struct Split1D {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};

/// Splits `active` (indices into points) so that the n_left elements with the
/// smallest (coordinate in dim, full tuple, index) key form the left side.
inline Split1D bin_1d_partition(const PointSet& points, std::size_t dim, std::span<const std::size_t> active,
                                std::size_t n_left) {
  detail::require(dim < points.dim(), "split dimension out of range");
  detail::require(n_left > 0 && n_left < active.size(), "left count must leave both sides non-empty");
  std::vector<std::size_t> order(active.begin(), active.end());
  const detail::SplitKeyLess less{points.values().data(), points.dim(), dim};
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_left), order.end(), less);
  Split1D out;
  out.left.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_left));
  out.right.assign(order.begin() + static_cast<std::ptrdiff_t>(n_left), order.end());
  std::sort(out.left.begin(), out.left.end());
  std::sort(out.right.begin(), out.right.end());
  return out;
}

inline Split1D bin_1d_partition(const PointSet& points, std::size_t dim, std::size_t n_left) {
  std::vector<std::size_t> all(points.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return bin_1d_partition(points, dim, all, n_left);
}

/// Dimension of largest bounding-box extent over `active`, lowest index on ties.
inline std::size_t get_part_dim(const PointSet& points, std::span<const std::size_t> active) {
  detail::require(!active.empty(), "cannot choose a cut dimension for an empty set");
  return detail::longest_dimension(points.values().data(), points.dim(), active);
}

/// Round-robin cut dimension. Cuts are indexed in reverse (the first cut of
/// an n-cut partition has index n-1) and cut x runs along dimension x mod dim.
inline std::size_t round_robin_dim(std::size_t cut_index, std::size_t dim) { return cut_index % dim; }

/// Recursive multi-jagged partition of `points` into cfg.num_parts parts.
inline PartitionResult mj_partition(const PointSet& points, const PartitionConfig& cfg) {
  cfg.validate();
  detail::require(!points.empty(), "cannot partition an empty point set");
  detail::require(cfg.num_parts <= points.size(),
                  "requested " + std::to_string(cfg.num_parts) + " parts for " + std::to_string(points.size()) +
                      " points");
  detail::require(points.all_finite(), "point coordinates must be finite");
  return detail::MultiJagged(points, cfg).run();
}

} // namespace topomap
