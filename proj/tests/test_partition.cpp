#include <doctest.h>

#include "pedcoal/partition.hpp"
#include "test_support.hpp"

using namespace pedcoal;

TEST_CASE("canonical form is unique and idempotent") {
  const auto p = Partition::from_blocks(4, {{3, 1}, {4, 2}});
  const auto q = Partition::from_blocks(4, {{2, 4}, {1, 3}});
  CHECK(p == q);
  CHECK(p.to_text() == "{1,3|2,4}");
  CHECK(Partition::parse_text(p.to_text()) == p);

  // Large-n path uses the same canonical order.
  std::vector<std::vector<int>> blocks;
  std::vector<int> big;
  for (int e = 1; e <= 70; ++e) big.push_back(e);
  blocks.push_back(big);
  const auto r = Partition::from_blocks(70, blocks);
  CHECK(!r.uses_mask_rep());
  CHECK(r.block_count() == 1);
  CHECK(r.block_size(0) == 70);
}

TEST_CASE("from_blocks validates coverage and disjointness") {
  CHECK_THROWS(Partition::from_blocks(3, {{1, 2}}));
  CHECK_THROWS(Partition::from_blocks(3, {{1, 2}, {2, 3}}));
  CHECK_THROWS(Partition::from_blocks(3, {{1, 2}, {3, 4}}));
  CHECK_THROWS(Partition::from_blocks(3, {{1, 2}, {}, {3}}));
}

TEST_CASE("complete dispersion erases pairing") {
  const auto base = Partition::from_blocks(3, {{1, 2}, {3}});
  const GroupedPartition g(base, {{0, 1}});
  CHECK(complete_dispersion(g) == base);

  const GroupedPartition plain(base, {});
  CHECK(complete_dispersion(plain) == base);

  const auto singles = Partition::singletons(3);
  const GroupedPartition h(singles, {{1, 2}});
  CHECK(complete_dispersion(h) == singles);
}

TEST_CASE("grouped partition validates pair indices") {
  const auto base = Partition::singletons(4);
  CHECK_THROWS(GroupedPartition(base, {{0, 0}}));
  CHECK_THROWS(GroupedPartition(base, {{0, 4}}));
  CHECK_THROWS(GroupedPartition(base, {{0, 1}, {1, 2}}));
  const GroupedPartition ok(base, {{2, 0}, {1, 3}});
  CHECK(ok.pairs()[0] == std::make_pair(0, 2));
  CHECK(ok.pair_count() == 2);
}

TEST_CASE("coagulate matches the definition on examples") {
  const auto xi = Partition::singletons(3);
  CHECK(coagulate(xi, Partition::singletons(3)) == xi);
  CHECK(coagulate(xi, Partition::single_block(3)) == Partition::single_block(3));

  // Indices beyond the block count are ignored.
  const auto xi2 = Partition::from_blocks(4, {{1, 4}, {2}, {3}});
  const auto alpha = Partition::from_blocks(4, {{1, 3}, {2}, {4}});
  CHECK(coagulate(xi2, alpha) == Partition::from_blocks(4, {{1, 3, 4}, {2}}));
}

TEST_CASE("coagulate agrees with the labels-to-roots reference") {
  RngStream rng(7, "coag-ref");
  for (int rep = 0; rep < 500; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_below(9));
    const auto xi = testing::random_partition(n, rng);
    const auto alpha = testing::random_partition(n, rng);
    CHECK(coagulate(xi, alpha) == testing::coagulate_reference(xi, alpha));
  }
  // Vector-representation path.
  for (int rep = 0; rep < 100; ++rep) {
    const auto xi = testing::random_partition(70, rng);
    const auto alpha = testing::random_partition(70, rng);
    CHECK(coagulate(xi, alpha) == testing::coagulate_reference(xi, alpha));
  }
}

TEST_CASE("coagulation composes through flows") {
  RngStream rng(11, "coag-flow");
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_below(7));
    const auto xi = testing::random_partition(n, rng);
    const auto a = testing::random_partition(n, rng);
    const auto b = testing::random_partition(n, rng);
    const auto lhs = coagulate(coagulate(xi, a), b);
    const auto rhs =
        testing::coagulate_reference(testing::coagulate_reference(xi, a), b);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("pair coalescence detection") {
  CHECK(is_pair_coalescence(Partition::singletons(2), Partition::single_block(2)));
  const auto xi = Partition::singletons(3);
  CHECK_FALSE(is_pair_coalescence(xi, xi));
  CHECK_FALSE(is_pair_coalescence(xi, Partition::single_block(3)));
  CHECK(is_pair_coalescence(xi, Partition::from_blocks(3, {{1, 3}, {2}})));
  CHECK_FALSE(is_pair_coalescence(Partition::from_blocks(4, {{1, 2}, {3}, {4}}),
                                  Partition::from_blocks(4, {{1, 3}, {2}, {4}})));
}

TEST_CASE("restriction to a subsample") {
  const auto xi = Partition::from_blocks(3, {{1, 3}, {2}});
  CHECK(restrict_to(xi, 2) == Partition::singletons(2));
  CHECK(restrict_to(xi, 3) == xi);
  CHECK(restrict_to(Partition::single_block(3), 2) == Partition::single_block(2));
  CHECK_THROWS(restrict_to(xi, 4));
  // Consistency across representations around the 64-element boundary.
  RngStream rng(13, "restrict");
  for (int rep = 0; rep < 50; ++rep) {
    const auto big = testing::random_partition(70, rng);
    const auto small = restrict_to(big, 60);
    CHECK(small.uses_mask_rep());
    int total = 0;
    for (int b = 0; b < small.block_count(); ++b) total += small.block_size(b);
    CHECK(total == 60);
  }
}

TEST_CASE("all_partitions counts Bell numbers") {
  CHECK(all_partitions(1).size() == 1);
  CHECK(all_partitions(3).size() == 5);
  CHECK(all_partitions(5).size() == 52);
  CHECK(all_partitions(6).size() == 203);
}
