#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "topomap/errors.hpp"

namespace topomap {

/// Fixed-dimension set of real coordinate tuples, stored row-major.
class PointSet {
public:
  PointSet() = default;

  explicit PointSet(std::size_t dim, std::size_t count = 0)
      : dim_(dim), values_(dim * count, 0.0) {
    detail::require(dim > 0, "point set dimension must be positive");
  }

  PointSet(std::size_t dim, std::vector<double> values)
      : dim_(dim), values_(std::move(values)) {
    detail::require(dim > 0, "point set dimension must be positive");
    detail::require(values_.size() % dim == 0,
                    "point set value count is not a multiple of its dimension");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const { return size() == 0; }

  double& operator()(std::size_t i, std::size_t d) { return values_[i * dim_ + d]; }
  double operator()(std::size_t i, std::size_t d) const { return values_[i * dim_ + d]; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> p) {
    detail::require(p.size() == dim_, "point dimension mismatch");
    values_.insert(values_.end(), p.begin(), p.end());
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  /// New point set whose axis k is this set's axis perm[k].
  PointSet permuted(std::span<const std::size_t> perm) const {
    detail::require(perm.size() == dim_, "axis permutation length mismatch");
    PointSet out(dim_, size());
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t k = 0; k < dim_; ++k) out(i, k) = (*this)(i, perm[k]);
    return out;
  }

  friend bool operator==(const PointSet&, const PointSet&) = default;

private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

} // namespace topomap
