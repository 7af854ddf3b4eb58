#include <doctest.h>

#include <cmath>
#include <map>

#include "pedcoal/limit.hpp"
#include "pedcoal/stats.hpp"
#include "test_support.hpp"

using namespace pedcoal;

TEST_CASE("catalog intensities carry the published rates") {
  // Occasional large family of a couple, gamma = 1.
  for (const double psi : {0.5, 1.0}) {
    const auto pm = model_point_mass_intensity(LargeFamilyCouple{100, psi, 1.0});
    REQUIRE(pm.has_value());
    CHECK(pm->rate == doctest::Approx(4.0 / (psi * psi + 2.0)).epsilon(1e-12));
    CHECK(pm->c_pair == doctest::Approx(2.0 / (psi * psi + 2.0)).epsilon(1e-12));
    CHECK(pm->x.weights().size() == 4);
    // Total pair rate is one on the rescaled clock.
    CHECK(pm->rate * pm->x.l2sq() + pm->c_pair == doctest::Approx(1.0).epsilon(1e-12));
  }
  // gamma < 1: no Kingman part, rate 4/psi^2.
  const auto heavy = model_point_mass_intensity(LargeFamilyCouple{100, 0.5, 0.5});
  CHECK(heavy->rate == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(heavy->c_pair == 0.0);
  // gamma > 1: Kingman.
  const auto light = model_point_mass_intensity(LargeFamilyCouple{100, 0.5, 1.5});
  CHECK(light->rate == 0.0);
  CHECK(light->c_pair == 1.0);
  // Individual variant keeps the unit total rate as well.
  const auto ind = model_point_mass_intensity(LargeFamilyIndividual{100, 0.7, 1.0});
  CHECK(ind->x.weights().size() == 2);
  CHECK(ind->rate * ind->x.l2sq() + ind->c_pair == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sampled point process paths") {
  RngStream rng(41, "psi");
  const auto kingman = sample_psi(KingmanIntensity{}, 10.0, rng);
  CHECK(kingman.atoms.empty());

  PointMassIntensity pm;
  pm.rate = 4.0 / 3.0;
  pm.x = Paintbox::repeated(0.25, 4);
  pm.c_pair = 2.0 / 3.0;
  RunningStat counts;
  for (int rep = 0; rep < 400; ++rep) {
    const auto path = sample_psi(pm, 30.0, rng);
    path.validate();
    counts.add(static_cast<double>(path.atoms.size()));
  }
  CHECK(std::fabs(counts.mean() - 40.0) <= 4.0 * counts.stderror());

  CHECK_THROWS(sample_psi(pm, -1.0, rng));
}

TEST_CASE("epsilon cutoff") {
  PsiPath psi;
  psi.horizon = 5.0;
  psi.atoms.push_back({1.0, Paintbox({0.5, 0.5})});      // l2 = 0.707
  psi.atoms.push_back({2.0, Paintbox({0.05})});          // l2 = 0.05
  psi.atoms.push_back({3.0, Paintbox({0.2, 0.1})});      // l2 = 0.224
  const auto cut = epsilon_cut(psi, 0.1);
  CHECK(cut.atoms.size() == 2);
  CHECK(cut.atoms[0].t == 1.0);
  CHECK(cut.atoms[1].t == 3.0);
  // Idempotence.
  const auto cut2 = epsilon_cut(cut, 0.1);
  CHECK(cut2.atoms.size() == cut.atoms.size());
  // eps above every norm empties the path; tiny eps keeps it.
  CHECK(epsilon_cut(psi, 0.9).atoms.empty());
  CHECK(epsilon_cut(psi, 1e-9).atoms.size() == 3);
}

TEST_CASE("flow runs: degenerate and exact cases") {
  RngStream rng(42, "flow");
  // Pure Kingman pair: MRCA is Exp(1).
  PsiPath empty;
  empty.horizon = 100.0;
  RunningStat pair_time;
  for (int rep = 0; rep < 100000; ++rep) {
    const auto run = run_flow(empty, 1.0, Partition::singletons(2), 100.0, rng);
    pair_time.add(run.mrca_time());
  }
  CHECK(std::fabs(pair_time.mean() - 1.0) <= 3.0 * pair_time.stderror());

  // A single full-mass bucket merges everything exactly at the atom time.
  PsiPath full;
  full.horizon = 2.0;
  full.atoms.push_back({0.75, Paintbox({1.0})});
  for (int rep = 0; rep < 100; ++rep) {
    const auto run = run_flow(full, 0.0, Partition::singletons(3), 2.0, rng);
    REQUIRE(run.events.size() == 1);
    CHECK(run.events[0].first == 0.75);
    CHECK(run.events[0].second == Partition::single_block(3));
    CHECK(run.mrca_time() == 0.75);
  }

  // n = 1 never jumps.
  const auto still = run_flow(empty, 5.0, Partition::singletons(1), 100.0, rng);
  CHECK(still.events.empty());
  CHECK_FALSE(still.censored);
}

TEST_CASE("jump-hold runs: Kingman oracle and single-atom law") {
  RngStream rng(43, "jump");
  PsiPath empty;
  empty.horizon = 100.0;
  RunningStat t3;
  for (int rep = 0; rep < 100000; ++rep) {
    const auto run = run_jump_hold(empty, 1.0, Partition::singletons(3), 100.0, rng);
    t3.add(run.mrca_time());
  }
  // Classical Kingman expectation 2(1 - 1/n).
  CHECK(std::fabs(t3.mean() - 4.0 / 3.0) <= 3.0 * t3.stderror());

  // One far atom, c = 0: the pair jumps exactly there with probability <x,x>.
  PsiPath one;
  one.horizon = 10.0;
  one.atoms.push_back({7.5, Paintbox({0.3, 0.2})});
  const double p_jump = one.atoms[0].x.l2sq();
  std::uint64_t jumps = 0;
  const std::uint64_t reps = 100000;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    const auto run = run_jump_hold(one, 0.0, Partition::singletons(2), 10.0, rng);
    if (!run.censored) {
      CHECK(run.mrca_time() == 7.5);
      ++jumps;
    }
  }
  const double se = std::sqrt(reps * p_jump * (1 - p_jump));
  CHECK(std::fabs(static_cast<double>(jumps) - p_jump * reps) <= 4.0 * se);
}

TEST_CASE("pair-merger bookkeeping has the closed-form survival") {
  PsiPath psi;
  psi.horizon = 1.0;
  psi.atoms.push_back({0.25, Paintbox({0.3, 0.1})});
  psi.atoms.push_back({0.5, Paintbox({0.4})});
  psi.atoms.push_back({0.8, Paintbox({0.2, 0.2})});
  const double c = 0.7;
  double survival = std::exp(-c * 1.0);
  for (const auto& a : psi.atoms) survival *= 1.0 - a.x.l2sq();
  RngStream rng(44, "survival");
  std::uint64_t merged = 0;
  const std::uint64_t reps = 100000;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    const auto run = run_flow(psi, c, Partition::singletons(2), 1.0, rng);
    if (!run.censored) ++merged;
  }
  const double p = 1.0 - survival;
  const double se = std::sqrt(reps * p * (1 - p));
  CHECK(std::fabs(static_cast<double>(merged) - p * reps) <= 3.0 * se);
}

TEST_CASE("restriction consistency of the flow") {
  PsiPath psi;
  psi.horizon = 1.5;
  psi.atoms.push_back({0.4, Paintbox({0.5, 0.3})});
  psi.atoms.push_back({0.9, Paintbox({0.35})});
  const double c = 0.5;
  RngStream rng(45, "restrict");
  std::vector<double> merged3(2, 0.0), merged2(2, 0.0);
  for (int rep = 0; rep < 100000; ++rep) {
    const auto a = run_flow(psi, c, Partition::singletons(3), 1.5, rng);
    const auto restricted = restrict_to(a.state_at(1.2), 2);
    ++merged3[restricted.block_count() == 1 ? 0 : 1];
    const auto b = run_flow(psi, c, Partition::singletons(2), 1.5, rng);
    ++merged2[b.state_at(1.2).block_count() == 1 ? 0 : 1];
  }
  CHECK(chi_square_two_sample(merged3, merged2).p_value > 1e-3);
}

TEST_CASE("naive chain with every atom cut reduces to the geometric grid") {
  // Wright-Fisher norms stay far below 0.9, so no atoms survive the cutoff.
  const Pedigree ped(WrightFisher{100}, 2024);
  const double c_N = 1.0 / 200.0;
  const auto summary = build_psi_summary(ped, 0.9, c_N, 400000);
  CHECK(summary.large_generations.empty());
  RngStream rng(46, "naive");
  RunningStat t;
  for (int rep = 0; rep < 50000; ++rep) {
    const auto run = run_naive(summary, 1.0, Partition::singletons(2), rng);
    REQUIRE_FALSE(run.censored);
    const double time = run.mrca_time();
    // Times live on the grid c_N * {1, 2, ...}.
    const double steps = time / c_N;
    CHECK(std::fabs(steps - std::round(steps)) < 1e-6);
    t.add(time);
  }
  CHECK(std::fabs(t.mean() - 1.0) <= 3.0 * t.stderror());
}

TEST_CASE("empirical path atoms align with the naive summary") {
  const Pedigree ped(LargeFamilyCouple{400, 1.0, 1.0}, 555);
  const double c_N = 6.0 / (8.0 * 400.0);  // coarse scale only used for times
  const auto summary = build_psi_summary(ped, 0.1, c_N, 20000);
  const auto path = empirical_psi_path(summary);
  REQUIRE(path.atoms.size() == summary.large_generations.size());
  CHECK(path.atoms.size() > 0);
  for (std::size_t i = 0; i < path.atoms.size(); ++i) {
    CHECK(path.atoms[i].t ==
          doctest::Approx((summary.large_generations[i] + 1) * c_N).epsilon(1e-12));
    CHECK(path.atoms[i].x.l2() >= 0.1);
    // The dominant couple produces the four-fold paintbox shape.
    CHECK(path.atoms[i].x.weights()[0] == doctest::Approx(0.25).epsilon(1e-9));
  }
}

TEST_CASE("psi path text round-trip") {
  PsiPath psi;
  psi.horizon = 3.5;
  psi.atoms.push_back({0.5, Paintbox({0.25, 0.25})});
  psi.atoms.push_back({1.75, Paintbox({0.125})});
  const auto text = psi_path_to_text(psi);
  const auto back = psi_path_from_text(text);
  CHECK(back.horizon == psi.horizon);
  REQUIRE(back.atoms.size() == 2);
  CHECK(back.atoms[0].t == psi.atoms[0].t);
  CHECK(back.atoms[0].x == psi.atoms[0].x);
  CHECK(back.atoms[1].x == psi.atoms[1].x);
  // Export of the import is byte-identical.
  CHECK(psi_path_to_text(back) == text);
}
