#include <doctest.h>

#include <cmath>
#include <map>

#include "pedcoal/quenched.hpp"
#include "pedcoal/stats.hpp"
#include "test_support.hpp"

using namespace pedcoal;

TEST_CASE("initial placement follows the paired-block convention") {
  const auto singles = GroupedPartition::dispersed(Partition::singletons(4));
  const auto ls = init_sample(singles, 10);
  for (int i = 0; i < 4; ++i) {
    CHECK(ls.positions[i].chromosome == 0);
    CHECK(ls.positions[i].individual == static_cast<std::uint32_t>(i + 1));
  }

  const GroupedPartition paired(Partition::singletons(2), {{0, 1}});
  const auto ls2 = init_sample(paired, 10);
  CHECK(ls2.positions[0] == GenePosition{0, 1});
  CHECK(ls2.positions[1] == GenePosition{1, 1});

  const auto empty = init_sample(GroupedPartition::dispersed(Partition::singletons(0)), 5);
  CHECK(empty.positions.empty());

  CHECK_THROWS(init_sample(GroupedPartition::dispersed(Partition::singletons(11)), 10));
}

TEST_CASE("coalesced lineages move together and stay together") {
  const Pedigree ped(WrightFisher{20}, 4242);
  RngStream rng(33, "absorb");
  const auto xi0 = GroupedPartition::dispersed(Partition::singletons(5));
  for (int rep = 0; rep < 50; ++rep) {
    auto ls = init_sample(xi0, 20);
    // Force lineages 0 and 1 together.
    ls.positions[1] = ls.positions[0];
    for (std::uint64_t g = 0; g < 50; ++g) {
      const auto slice = ped.slice_at(g);
      step(ls, slice, rng);
      CHECK(ls.positions[0] == ls.positions[1]);
    }
  }
}

TEST_CASE("one step moves a lineage to the recorded parent") {
  const Pedigree ped(WrightFisher{15}, 7);
  const auto slice = ped.slice_at(0);
  RngStream rng(34, "parent");
  for (int k = 1; k <= 15; ++k) {
    LineageSet ls;
    ls.positions = {{0, static_cast<std::uint32_t>(k)}, {1, static_cast<std::uint32_t>(k)}};
    step(ls, slice, rng);
    CHECK(ls.positions[0].individual == slice.p0[k - 1]);
    CHECK(ls.positions[1].individual == slice.p1[k - 1]);
    // No selfing: a paired state never coalesces in the very next step.
    CHECK(ls.positions[0].individual != ls.positions[1].individual);
  }
}

TEST_CASE("state extraction") {
  const auto xi0 = GroupedPartition::dispersed(Partition::singletons(3));
  LineageSet ls;
  ls.positions = {{0, 3}, {0, 5}, {0, 7}};
  auto st = state_of(ls, xi0);
  CHECK(st.base() == Partition::singletons(3));
  CHECK(st.pair_count() == 0);

  ls.positions = {{0, 3}, {1, 3}, {0, 7}};
  st = state_of(ls, xi0);
  CHECK(st.base() == Partition::singletons(3));
  CHECK(st.pair_count() == 1);
  CHECK(st.pairs()[0] == std::make_pair(0, 1));

  ls.positions = {{1, 4}, {1, 4}, {1, 4}};
  st = state_of(ls, xi0);
  CHECK(st.base() == Partition::single_block(3));

  // Blocks carry their original leaf sets through coalescences.
  const GroupedPartition blocks(Partition::from_blocks(4, {{1, 4}, {2}, {3}}), {});
  LineageSet ls2;
  ls2.positions = {{0, 2}, {0, 2}, {0, 9}};
  const auto st2 = state_of(ls2, blocks);
  CHECK(st2.base() == Partition::from_blocks(4, {{1, 2, 4}, {3}}));
}

TEST_CASE("runs are deterministic in the seed") {
  const Pedigree ped(WrightFisher{50}, 31337);
  const auto xi0 = GroupedPartition::dispersed(Partition::singletons(4));
  QuenchedRunOptions opts;
  opts.horizon_generations = 100000;
  RngStream r1(35, "locus");
  RngStream r2(35, "locus");
  const auto a = run_locus(ped, xi0, opts, r1);
  const auto b = run_locus(ped, xi0, opts, r2);
  REQUIRE(a.tree.events.size() == b.tree.events.size());
  for (std::size_t i = 0; i < a.tree.events.size(); ++i) {
    CHECK(a.tree.events[i].generation == b.tree.events[i].generation);
    CHECK(a.tree.events[i].state == b.tree.events[i].state);
  }
  CHECK(a.tree.final_generation == b.tree.final_generation);
}

TEST_CASE("states only coarsen along a run") {
  const Pedigree ped(WrightFisher{25}, 5150);
  const auto xi0 = GroupedPartition::dispersed(Partition::singletons(6));
  QuenchedRunOptions opts;
  opts.horizon_generations = 100000;
  RngStream rng(36, "coarsen");
  const auto run = run_locus(ped, xi0, opts, rng);
  Partition prev = complete_dispersion(xi0);
  for (const auto& ev : run.tree.events) {
    CHECK(ev.state.block_count() < prev.block_count());
    // every previous block is contained in some current block
    for (int i = 0; i < prev.block_count(); ++i) {
      const auto blk = prev.block(i);
      const int target = ev.state.block_of(blk.front());
      for (int e : blk) CHECK(ev.state.block_of(e) == target);
    }
    prev = ev.state;
  }
  CHECK(prev.block_count() == 1);
}

TEST_CASE("pair MRCA matches the annealed oracle for Wright-Fisher") {
  const int N = 100;
  const double c_N = 1.0 / (2.0 * N);
  const auto xi0 = GroupedPartition::dispersed(Partition::singletons(2));
  RunningStat stat;
  for (int rep = 0; rep < 10000; ++rep) {
    const Pedigree ped(WrightFisher{N}, RngStream(37, "ped", rep).next_u64());
    QuenchedRunOptions opts;
    opts.horizon_generations = 200000;
    RngStream rng(37, "locus", rep);
    const auto run = run_locus(ped, xi0, opts, rng);
    REQUIRE_FALSE(run.tree.censored);
    stat.add(static_cast<double>(run.tree.final_generation));
  }
  // Annealed geometric(c_N) oracle: mean 1/c_N.
  CHECK(std::fabs(stat.mean() - 1.0 / c_N) <= 3.0 * stat.stderror());
}

TEST_CASE("first-coalescence law is invariant under initial relabeling") {
  const int N = 60, n = 4;
  std::vector<double> low, high;
  for (int rep = 0; rep < 10000; ++rep) {
    const Pedigree ped(WrightFisher{N}, RngStream(38, "ped", rep).next_u64());
    for (int variant = 0; variant < 2; ++variant) {
      LineageSet ls;
      for (int j = 0; j < n; ++j)
        ls.positions.push_back(
            {0, static_cast<std::uint32_t>(variant == 0 ? j + 1 : N - j)});
      RngStream rng(38, "coins", rep, variant);
      std::uint64_t g = 0;
      for (;;) {
        const auto slice = ped.slice_at(g);
        step(ls, slice, rng);
        ++g;
        bool merged = false;
        for (int a = 0; a < n && !merged; ++a)
          for (int b = a + 1; b < n && !merged; ++b)
            if (ls.positions[a] == ls.positions[b]) merged = true;
        if (merged) break;
      }
      (variant == 0 ? low : high).push_back(static_cast<double>(g));
    }
  }
  CHECK(ks_two_sample(low, high) < ks_two_sample_critical(low.size(), high.size(), 1e-3));
}

TEST_CASE("one-step distribution of the simulator matches the enumerated law") {
  const auto V = testing::fixed_matrix(4, {{1, 2, 2}, {3, 4, 2}});
  const auto law = testing::one_step_law_reference(V, 2);
  const auto xi0 = GroupedPartition::dispersed(Partition::singletons(2));
  std::map<GroupedPartition, double> observed;
  RngStream rng(39, "onestep");
  const int reps = 200000;
  for (int rep = 0; rep < reps; ++rep) {
    const auto slice = realize_slice(V, rng);
    auto ls = init_sample(xi0, 4);
    step(ls, slice, rng);
    observed[state_of(ls, xi0)] += 1.0;
  }
  std::vector<double> obs, expct;
  for (const auto& [state, p] : law) {
    obs.push_back(observed.count(state) ? observed[state] : 0.0);
    expct.push_back(p * reps);
  }
  const auto test = chi_square_gof(obs, expct);
  CHECK(test.p_value > 1e-3);
}

TEST_CASE("lockstep multi-locus runner agrees with independent runs") {
  const Pedigree ped(WrightFisher{40}, 606);
  const auto xi0 = GroupedPartition::dispersed(Partition::singletons(3));
  const auto trees = run_loci_shared_pedigree(ped, xi0, 5, 777, 100000);
  REQUIRE(trees.size() == 5);
  for (std::uint64_t l = 0; l < 5; ++l) {
    QuenchedRunOptions opts;
    opts.horizon_generations = 100000;
    RngStream rng(777, "locus", l);
    const auto solo = run_locus(ped, xi0, opts, rng);
    CHECK(solo.tree.final_generation == trees[l].final_generation);
    REQUIRE(solo.tree.events.size() == trees[l].events.size());
    for (std::size_t i = 0; i < solo.tree.events.size(); ++i)
      CHECK(solo.tree.events[i].state == trees[l].events[i].state);
  }
}

TEST_CASE("pair coalescence generations from the event list") {
  GenealogyTree tree;
  tree.initial = Partition::singletons(3);
  tree.events.push_back({5, Partition::from_blocks(3, {{1, 3}, {2}})});
  tree.events.push_back({9, Partition::single_block(3)});
  tree.final_generation = 9;
  CHECK(pair_coalescence_generation(tree, 1, 3) == 5);
  CHECK(pair_coalescence_generation(tree, 1, 2) == 9);
  CHECK(pair_coalescence_generation(tree, 2, 3) == 9);
}
