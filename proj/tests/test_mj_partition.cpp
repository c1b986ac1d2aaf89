#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <random>
#include <set>

#include "topomap/machine_model.hpp"
#include "topomap/mj_partition.hpp"
#include "topomap/task_model.hpp"

using namespace topomap;

namespace {

PointSet line(std::vector<double> xs) { return PointSet(1, std::move(xs)); }

PointSet grid(const std::vector<int>& dims) {
  return gen_stencil_tasks(dims, std::vector<bool>(dims.size(), false)).coords;
}

PartitionConfig config(std::size_t parts, Ordering o = Ordering::Z, DimPolicy p = DimPolicy::Longest) {
  PartitionConfig cfg;
  cfg.num_parts = parts;
  cfg.ordering = o;
  cfg.dim_policy = p;
  return cfg;
}

} // namespace

TEST(MjPartition, CollinearBisection) {
  EXPECT_EQ(mj_partition(line({0, 1, 2, 3}), config(2)).part, (std::vector<std::size_t>{0, 0, 1, 1}));
}

TEST(MjPartition, TwoByTwoZ) {
  EXPECT_EQ(mj_partition(grid({2, 2}), config(4)).part, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(MjPartition, OneDimensionalFzIsGrayCode) {
  const auto parts = mj_partition(line({0, 1, 2, 3, 4, 5, 6, 7}), config(8, Ordering::FZ)).part;
  EXPECT_EQ(parts, (std::vector<std::size_t>{0, 1, 3, 2, 6, 7, 5, 4}));
}

TEST(MjPartition, GrayEqualsFzOnOneDimensionalData) {
  std::mt19937_64 rng(5);
  for (std::size_t n : {8u, 13u, 64u, 100u}) {
    std::vector<double> xs(n);
    for (double& x : xs) x = static_cast<double>(rng() % 1000);
    for (std::size_t np : {2u, 5u, 8u}) {
      EXPECT_EQ(mj_partition(line(xs), config(np, Ordering::Gray)), mj_partition(line(xs), config(np, Ordering::FZ)));
    }
  }
}

TEST(MjPartition, ExactBalanceAllOrderingsAndPolicies) {
  const PointSet pts = grid({6, 4, 5});
  for (Ordering o : {Ordering::Z, Ordering::Gray, Ordering::FZ, Ordering::MFZ})
    for (DimPolicy p : {DimPolicy::Longest, DimPolicy::RoundRobin})
      for (std::size_t np : {1u, 2u, 3u, 4u, 5u, 8u, 10u, 24u, 40u, 120u}) {
        const auto sizes = mj_partition(pts, config(np, o, p)).sizes();
        for (std::size_t s : sizes) ASSERT_EQ(s, pts.size() / np) << to_string(o) << " np=" << np;
      }
}

TEST(MjPartition, NearBalanceWhenIndivisible) {
  const PointSet pts = grid({7, 3});
  for (std::size_t np : {2u, 4u, 5u, 8u, 11u}) {
    const auto sizes = mj_partition(pts, config(np)).sizes();
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    EXPECT_GE(*lo, 1u);
    EXPECT_LE(*hi - *lo, 2u) << np;
  }
}

TEST(MjPartition, DeterministicAndBijectiveWhenPartsEqualPoints) {
  const PointSet pts = grid({4, 4, 2});
  for (Ordering o : {Ordering::Z, Ordering::FZ}) {
    const auto a = mj_partition(pts, config(pts.size(), o));
    EXPECT_EQ(a, mj_partition(pts, config(pts.size(), o)));
    std::set<std::size_t> seen(a.part.begin(), a.part.end());
    EXPECT_EQ(seen.size(), pts.size());
  }
}

// On a 2^b x 2^b grid with round-robin cuts, the part number's bits split
// into the bits of each dimension's cuts. Z gives consecutive values along a
// dimension, FZ gives the Gray code of the position.
TEST(MjPartition, ZAndFzBitStructure) {
  const int bits = 3;
  const int side = 1 << bits;
  const PointSet pts = grid({side, side});
  for (Ordering o : {Ordering::Z, Ordering::FZ}) {
    const auto parts = mj_partition(pts, config(pts.size(), o, DimPolicy::RoundRobin)).part;
    for (std::size_t t = 0; t < pts.size(); ++t) {
      const auto p = static_cast<unsigned>(parts[t]);
      for (int dim = 0; dim < 2; ++dim) {
        // Cut x runs along dimension x mod 2: dimension `dim` owns bits dim, dim+2, ...
        unsigned sub = 0;
        for (int k = 0; k < bits; ++k) sub |= ((p >> (2 * k + dim)) & 1u) << k;
        const auto pos = static_cast<unsigned>(pts(t, static_cast<std::size_t>(dim)));
        const unsigned expected = o == Ordering::Z ? pos : gray_encode(pos);
        ASSERT_EQ(sub, expected) << to_string(o) << " task " << t << " dim " << dim;
      }
    }
  }
}

TEST(MjPartition, MultisectionLevels) {
  PartitionConfig cfg = config(12);
  cfg.parts_per_level = {3, 4};
  const PointSet pts = grid({6, 8});
  const auto r = mj_partition(pts, cfg);
  for (std::size_t s : r.sizes()) EXPECT_EQ(s, 4u);
  // The first level slabs the longer dimension (1) into thirds.
  std::vector<double> lo(3, 1e9), hi(3, -1e9);
  for (std::size_t t = 0; t < pts.size(); ++t) {
    const std::size_t slab = r.part[t] / 4;
    lo[slab] = std::min(lo[slab], pts(t, 1));
    hi[slab] = std::max(hi[slab], pts(t, 1));
  }
  EXPECT_LE(hi[0], lo[1]);
  EXPECT_LE(hi[1], lo[2]);

  PartitionConfig depth = config(8);
  depth.recursion_depth = 1;
  EXPECT_EQ(depth.level_parts(), (std::vector<std::size_t>{8}));
  depth.recursion_depth = 3;
  EXPECT_EQ(depth.level_parts(), (std::vector<std::size_t>{2, 2, 2}));
}

TEST(MjPartition, ConfigErrors) {
  PartitionConfig cfg = config(6, Ordering::FZ);
  cfg.parts_per_level = {3, 2};
  EXPECT_THROW(mj_partition(grid({6}), cfg), InputError);
  cfg.ordering = Ordering::Z;
  cfg.parts_per_level = {4, 2};
  EXPECT_THROW(mj_partition(grid({8}), cfg), InputError);
  cfg.parts_per_level = {3, 2};
  cfg.uneven_bisection = true;
  EXPECT_THROW(mj_partition(grid({6}), cfg), InputError);
  EXPECT_THROW(mj_partition(grid({3}), config(4)), InputError);
  EXPECT_THROW(mj_partition(PointSet(2), config(1)), InputError);
  PointSet nan(1, std::vector<double>{0.0, std::nan("")});
  EXPECT_THROW(mj_partition(nan, config(2)), InputError);
}

TEST(MjPartition, UnevenBisection) {
  PartitionConfig cfg = config(6);
  cfg.uneven_bisection = true;
  const auto r = mj_partition(line({0, 1, 2, 3, 4, 5}), cfg);
  EXPECT_EQ(r.part.size(), 6u);
  std::set<std::size_t> seen(r.part.begin(), r.part.end());
  EXPECT_EQ(seen.size(), 6u);
  // First split 4 | 2 keeps parts 0..3 on the low side.
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(r.part[i], 4u);
}

TEST(GetPartDim, Examples) {
  PointSet pts(2);
  pts.push_back(std::vector<double>{0, 0});
  pts.push_back(std::vector<double>{4, 2});
  const std::vector<std::size_t> all{0, 1};
  EXPECT_EQ(get_part_dim(pts, all), 0u);
  const PointSet square = grid({3, 3});
  std::vector<std::size_t> every(square.size());
  std::iota(every.begin(), every.end(), std::size_t{0});
  EXPECT_EQ(get_part_dim(square, every), 0u);
  const PointSet tall = grid({2, 5});
  std::vector<std::size_t> every_tall(tall.size());
  std::iota(every_tall.begin(), every_tall.end(), std::size_t{0});
  EXPECT_EQ(get_part_dim(tall, every_tall), 1u);
}

TEST(RoundRobinDim, AlternatesStartingFromLastCut) {
  // Six cuts in 2D, indexed 5 (first) down to 0.
  std::vector<std::size_t> dims;
  for (std::size_t cut = 6; cut-- > 0;) dims.push_back(round_robin_dim(cut, 2));
  EXPECT_EQ(dims, (std::vector<std::size_t>{1, 0, 1, 0, 1, 0}));

  // The partitioner follows the same cycle: the first cut of a 4-part
  // round-robin partition of a square runs along dimension 1.
  const auto r = mj_partition(grid({2, 2}), config(4, Ordering::Z, DimPolicy::RoundRobin));
  EXPECT_EQ(r.part, (std::vector<std::size_t>{0, 2, 1, 3}));
}

TEST(Bin1dPartition, Examples) {
  const Split1D s = bin_1d_partition(line({3, 1, 2, 0}), 0, 2);
  EXPECT_EQ(s.left, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(s.right, (std::vector<std::size_t>{0, 2}));

  const Split1D ties = bin_1d_partition(line({5, 5, 5, 5}), 0, 2);
  EXPECT_EQ(ties.left, (std::vector<std::size_t>{0, 1}));

  const Split1D last = bin_1d_partition(line({4, 9, 1, 7}), 0, 3);
  EXPECT_EQ(last.right, (std::vector<std::size_t>{1}));

  EXPECT_THROW(bin_1d_partition(line({1, 2}), 0, 0), InputError);
  EXPECT_THROW(bin_1d_partition(line({1, 2}), 0, 2), InputError);
}

TEST(Bin1dPartition, TiesBrokenByFullTuple) {
  PointSet pts(2);
  pts.push_back(std::vector<double>{0, 5});
  pts.push_back(std::vector<double>{0, 1});
  pts.push_back(std::vector<double>{0, 3});
  EXPECT_EQ(bin_1d_partition(pts, 0, 1).left, (std::vector<std::size_t>{1}));
}

TEST(UnevenSplitCounts, Examples) {
  EXPECT_EQ(uneven_split_counts(10800), (std::pair<std::size_t, std::size_t>{6480, 4320}));
  EXPECT_EQ(uneven_split_counts(8), (std::pair<std::size_t, std::size_t>{4, 4}));
  EXPECT_EQ(uneven_split_counts(6), (std::pair<std::size_t, std::size_t>{4, 2}));
  EXPECT_EQ(uneven_split_counts(7), (std::pair<std::size_t, std::size_t>{4, 3}));
  EXPECT_THROW(uneven_split_counts(1), InputError);
}

TEST(GrayCode, MatchesBinaryGrayColumn) {
  EXPECT_EQ(gray_encode(2u), 3u);
  EXPECT_EQ(gray_encode(31u), 0b10000u);
  const unsigned table[32] = {0b00000, 0b00001, 0b00011, 0b00010, 0b00110, 0b00111, 0b00101, 0b00100,
                              0b01100, 0b01101, 0b01111, 0b01110, 0b01010, 0b01011, 0b01001, 0b01000,
                              0b11000, 0b11001, 0b11011, 0b11010, 0b11110, 0b11111, 0b11101, 0b11100,
                              0b10100, 0b10101, 0b10111, 0b10110, 0b10010, 0b10011, 0b10001, 0b10000};
  for (unsigned i = 0; i < 32; ++i) EXPECT_EQ(gray_encode(i), table[i]) << i;
}

TEST(GrayCode, DecodeInvertsEncode) {
  for (std::uint64_t i = 0; i < (1u << 20); ++i) ASSERT_EQ(gray_decode(gray_encode(i)), i);
  for (std::uint64_t i = 0; i + 1 < (1u << 12); ++i) ASSERT_EQ(std::popcount(gray_encode(i) ^ gray_encode(i + 1)), 1);
}

TEST(Names, RoundTripAndReject) {
  for (Ordering o : {Ordering::Z, Ordering::Gray, Ordering::FZ, Ordering::MFZ})
    EXPECT_EQ(parse_ordering(to_string(o)), o);
  EXPECT_EQ(parse_dim_policy("round-robin"), DimPolicy::RoundRobin);
  EXPECT_EQ(parse_dim_policy("longest"), DimPolicy::Longest);
  EXPECT_THROW(parse_ordering("hilbert"), InputError);
  EXPECT_THROW(parse_dim_policy("random"), InputError);
}
