#include <gtest/gtest.h>

#include <set>

#include "topomap/machine_model.hpp"
#include "topomap/mj_partition.hpp"

using namespace topomap;

namespace {

std::vector<Coord> all_coords(const TorusSpec& spec) { return gen_block_allocation(spec).nodes; }

} // namespace

TEST(HopDistance, SpecExamples) {
  EXPECT_EQ(hop_distance(TorusSpec({4, 4, 4}, {true, true, true}), {0, 0, 0}, {3, 3, 3}), 3);
  EXPECT_EQ(hop_distance(TorusSpec({8}, {false}), {0}, {7}), 7);
  EXPECT_EQ(hop_distance(TorusSpec({8}, {true}), {0}, {7}), 1);
}

TEST(HopDistance, IsAMetricOnSmallGrids) {
  for (const TorusSpec& spec : {TorusSpec({6, 6, 6}, {true, true, true}), TorusSpec({6, 5, 4}, {true, false, true}),
                                TorusSpec({3, 6}, {false, false})}) {
    const auto nodes = all_coords(spec);
    const std::size_t n = nodes.size();
    std::vector<int> dist(n * n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) dist[a * n + b] = hop_distance(spec, nodes[a], nodes[b]);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        ASSERT_EQ(dist[a * n + b], dist[b * n + a]);
        ASSERT_EQ(dist[a * n + b] == 0, a == b);
        for (std::size_t c = 0; c < n; ++c) ASSERT_LE(dist[a * n + c], dist[a * n + b] + dist[b * n + c]);
      }
  }
}

TEST(Route, SpecExamples) {
  const TorusSpec torus({4, 4}, {true, true});
  const std::vector<Link> expected{{{0, 0}, 0, -1}, {{3, 0}, 1, +1}};
  EXPECT_EQ(route(torus, {0, 0}, {3, 1}), expected);
  EXPECT_TRUE(route(torus, {2, 1}, {2, 1}).empty());

  const TorusSpec ring({4}, {true});
  const std::vector<Link> tie{{{0}, 0, +1}, {{1}, 0, +1}};
  EXPECT_EQ(route(ring, {0}, {2}), tie);
}

TEST(Route, LengthEqualsHopDistanceAndPathIsConnected) {
  for (const TorusSpec& spec : {TorusSpec({6, 6, 6}, {true, true, true}), TorusSpec({5, 6, 3}, {false, true, false})}) {
    const auto nodes = all_coords(spec);
    for (const Coord& a : nodes)
      for (const Coord& b : nodes) {
        const auto path = route(spec, a, b);
        ASSERT_EQ(static_cast<int>(path.size()), hop_distance(spec, a, b));
        Coord at = a;
        for (const Link& l : path) {
          ASSERT_EQ(l.from, at);
          const int ext = spec.dims[static_cast<std::size_t>(l.dim)];
          int& c = at[static_cast<std::size_t>(l.dim)];
          c += l.direction;
          if (spec.wrap[static_cast<std::size_t>(l.dim)]) c = (c + ext) % ext;
          ASSERT_TRUE(spec.contains(at));
        }
        ASSERT_EQ(at, b);
      }
  }
}

TEST(ShiftCoordinates, MovesLowSideAcrossLargestGap) {
  const Allocation alloc(TorusSpec({16}, {true}), {{0}, {1}, {14}, {15}});
  const PointSet shifted = shift_coordinates(alloc);
  EXPECT_EQ(shifted.values(), (std::vector<double>{16, 17, 14, 15}));
  double spread = 0;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) spread = std::max(spread, std::abs(shifted(a, 0) - shifted(b, 0)));
  EXPECT_EQ(spread, 3.0);
}

TEST(ShiftCoordinates, ContiguousAndMeshUnchanged) {
  const Allocation contiguous(TorusSpec({16}, {true}), {{0}, {1}, {2}, {3}});
  EXPECT_EQ(shift_coordinates(contiguous), node_points(contiguous));
  const Allocation mesh(TorusSpec({16}, {false}), {{0}, {1}, {14}, {15}});
  EXPECT_EQ(shift_coordinates(mesh), node_points(mesh));
}

TEST(ShiftCoordinates, PreservesIdentityAndIsIdempotent) {
  const TorusSpec spec({8, 8, 8}, {true, false, true});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Allocation alloc = gen_sparse_allocation(spec, 40, seed);
    const PointSet once = shift_coordinates(alloc);
    for (std::size_t n = 0; n < alloc.nodes.size(); ++n)
      for (std::size_t d = 0; d < 3; ++d)
        ASSERT_EQ(static_cast<int>(once(n, d)) % spec.dims[d], alloc.nodes[n][d]);
    // Re-shifting the reduced output reproduces the same points.
    EXPECT_EQ(shift_coordinates(alloc), once);
  }
}

TEST(ScaleByBandwidth, UniformIsIdentity) {
  const Allocation alloc(TorusSpec({3}, {false}), {{0}, {1}, {2}});
  EXPECT_EQ(scale_by_bandwidth(alloc), node_points(alloc));
  const Allocation torus = gen_block_allocation(TorusSpec({4, 5}, {true, true}));
  EXPECT_EQ(scale_by_bandwidth(torus), node_points(torus));
}

TEST(ScaleByBandwidth, AlternatingBandwidthGivesTwoToOneSpacing) {
  const TorusSpec spec({6}, {false}, {{37.5, 75, 37.5, 75, 37.5, 75}});
  const PointSet p = scale_by_bandwidth(gen_block_allocation(spec));
  for (std::size_t c = 0; c + 2 < 6; c += 2) {
    const double slow = p(c + 1, 0) - p(c, 0);
    const double fast = p(c + 2, 0) - p(c + 1, 0);
    EXPECT_DOUBLE_EQ(slow / fast, 2.0);
  }
}

TEST(ScaleByBandwidth, SingleNodeAtOrigin) {
  const Allocation alloc(TorusSpec({1, 1}, {false, false}), {{0, 0}});
  EXPECT_EQ(scale_by_bandwidth(alloc).values(), (std::vector<double>{0, 0}));
}

TEST(BoxLift, Examples) {
  const Allocation alloc(TorusSpec({4, 4, 16}, {true, true, true}), {{3, 1, 9}});
  EXPECT_EQ(box_lift(alloc, {2, 2, 8}, 16).values(), (std::vector<double>{16, 0, 16, 1, 1, 1}));

  const Allocation block = gen_block_allocation(TorusSpec({3, 2}, {false, false}));
  const PointSet unit = box_lift(block, {1, 1}, 5);
  for (std::size_t n = 0; n < block.nodes.size(); ++n) {
    EXPECT_EQ(unit(n, 0), 5.0 * block.nodes[n][0]);
    EXPECT_EQ(unit(n, 1), 5.0 * block.nodes[n][1]);
    EXPECT_EQ(unit(n, 2), 0.0);
    EXPECT_EQ(unit(n, 3), 0.0);
  }
}

TEST(BoxLift, FirstCutsSeparateBoxes) {
  const Allocation block = gen_block_allocation(TorusSpec({4, 4, 16}, {false, false, false}));
  const PointSet lifted = box_lift(block, {2, 2, 8}, 16);
  std::vector<std::size_t> all(lifted.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  EXPECT_LT(get_part_dim(lifted, all), 3u);

  // Eight boxes of 2x2x8: three cuts leave every part inside a single box.
  PartitionConfig cfg;
  cfg.num_parts = 8;
  const PartitionResult parts = mj_partition(lifted, cfg);
  for (const auto& members : parts.members()) {
    std::set<Coord> boxes;
    for (std::size_t n : members) {
      const Coord& c = block.nodes[n];
      boxes.insert({c[0] / 2, c[1] / 2, c[2] / 8});
    }
    EXPECT_EQ(boxes.size(), 1u);
  }
}

TEST(BoxLift, InjectiveOnDistinctNodes) {
  const Allocation block = gen_block_allocation(TorusSpec({4, 6, 8}, {true, true, true}));
  const PointSet lifted = box_lift(block, {2, 3, 4}, 16);
  std::set<std::vector<double>> seen;
  for (std::size_t n = 0; n < lifted.size(); ++n) seen.emplace(lifted.row(n).begin(), lifted.row(n).end());
  EXPECT_EQ(seen.size(), block.nodes.size());
}

TEST(MaskDimensions, Examples) {
  PointSet p(5);
  p.push_back(std::vector<double>{1, 2, 3, 4, 5});
  EXPECT_EQ(mask_dimensions(p, {true, true, true, true, false}).values(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(mask_dimensions(p, std::vector<bool>(5, true)), p);
  EXPECT_EQ(mask_dimensions(p, {false, false, true, false, false}).values(), (std::vector<double>{3}));
  EXPECT_THROW(mask_dimensions(p, std::vector<bool>(5, false)), InputError);
  EXPECT_THROW(mask_dimensions(p, {true, true}), InputError);
}

TEST(BlockAllocation, RowMajorAndCores) {
  const Allocation a = gen_block_allocation(TorusSpec({2, 2}, {false, false}));
  EXPECT_EQ(a.nodes, (std::vector<Coord>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  EXPECT_EQ(gen_block_allocation(TorusSpec({4}, {false})).nodes.size(), 4u);
  const Allocation two = gen_block_allocation(TorusSpec({2, 2}, {false, false}), 2);
  EXPECT_EQ(two.num_cores(), 8u);
  EXPECT_EQ(two.core_coord(0), (Coord{0, 0}));
  EXPECT_EQ(two.core_coord(1), (Coord{0, 0}));
  EXPECT_EQ(two.core_coord(2), (Coord{0, 1}));
}

TEST(SparseAllocation, Examples) {
  const TorusSpec spec({4, 4}, {true, true});
  const Allocation full = gen_sparse_allocation(spec, 16, 3);
  std::set<Coord> nodes(full.nodes.begin(), full.nodes.end());
  EXPECT_EQ(nodes.size(), 16u);
  EXPECT_EQ(gen_sparse_allocation(spec, 1, 3).nodes.size(), 1u);
  EXPECT_EQ(gen_sparse_allocation(spec, 9, 11), gen_sparse_allocation(spec, 9, 11));
  EXPECT_THROW(gen_sparse_allocation(spec, 17, 0), InputError);
}

TEST(SparseAllocation, SeedsDiffer) {
  const TorusSpec spec({8, 8, 8}, {true, true, true});
  EXPECT_NE(gen_sparse_allocation(spec, 64, 1).nodes, gen_sparse_allocation(spec, 64, 2).nodes);
}

TEST(TorusSpec, ValidationErrors) {
  EXPECT_THROW(TorusSpec({}, {}), InputError);
  EXPECT_THROW(TorusSpec({4, 0}, {false, false}), InputError);
  EXPECT_THROW(TorusSpec({4}, {false, true}), InputError);
  EXPECT_THROW(TorusSpec({2}, {false}, {{1.0, -1.0}}), InputError);
  EXPECT_THROW(TorusSpec({2}, {false}, {{1.0}}), InputError);
  const TorusSpec spec({2}, {false});
  EXPECT_THROW(Allocation(spec, {{0}, {0}}), InputError);
  EXPECT_THROW(Allocation(spec, {{2}}), InputError);
}

TEST(TorusSpec, LinkBandwidthUsesCableIndex) {
  const TorusSpec spec({4}, {true}, {{1, 2, 3, 4}});
  EXPECT_EQ(spec.link_bandwidth({1}, 0, +1), 2);
  EXPECT_EQ(spec.link_bandwidth({2}, 0, -1), 2);
  EXPECT_EQ(spec.link_bandwidth({0}, 0, -1), 4);
  EXPECT_EQ(spec.link_bandwidth({3}, 0, +1), 4);
}
