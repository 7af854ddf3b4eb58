#include <doctest.h>

#include <cmath>
#include <map>

#include "pedcoal/paintbox.hpp"
#include "pedcoal/stats.hpp"
#include "test_support.hpp"

using namespace pedcoal;

TEST_CASE("paintbox construction and the doubling map") {
  const Paintbox x({0.5});
  const auto y = phi(x);
  CHECK(y.weights() == std::vector<double>{0.25, 0.25});
  CHECK(phi(Paintbox({1.0})).weights() == std::vector<double>{0.5, 0.5});
  CHECK(phi(Paintbox()).empty());

  RngStream rng(3, "phi");
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> w;
    double sum = 0.0;
    const int k = 1 + static_cast<int>(rng.next_below(6));
    for (int i = 0; i < k; ++i) {
      w.push_back(rng.next_unit_pos());
      sum += w.back();
    }
    for (auto& v : w) v /= sum * (1.0 + rng.next_unit());
    const Paintbox p(w);
    CHECK(phi(p).l2sq() == doctest::Approx(p.l2sq() / 2.0).epsilon(1e-12));
    CHECK(phi(p).l1() == doctest::Approx(p.l1()).epsilon(1e-12));
  }
  CHECK_THROWS(Paintbox({0.9, 0.3}));
  CHECK_THROWS(Paintbox({-0.1}));
}

TEST_CASE("exact paintbox transition probabilities") {
  const Paintbox y({0.25, 0.25});
  const auto xi2 = Partition::singletons(2);
  const auto merged2 = Partition::single_block(2);
  CHECK(paintbox_prob(y, xi2, merged2) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(paintbox_prob(y, xi2, merged2) == doctest::Approx(y.l2sq()).epsilon(1e-12));

  // Empty paintbox: everything lands in the leftover interval.
  CHECK(paintbox_prob(Paintbox(), xi2, xi2) == 1.0);
  CHECK(paintbox_prob(Paintbox(), Partition::singletons(4), Partition::singletons(4)) ==
        1.0);

  // Single bucket of mass 1/2, three blocks all merging.
  const Paintbox half({0.5});
  CHECK(paintbox_prob(half, Partition::singletons(3), Partition::single_block(3)) ==
        doctest::Approx(0.125).epsilon(1e-12));

  // Not a coarsening: probability zero, not an error.
  CHECK(paintbox_prob(y, Partition::from_blocks(3, {{1, 2}, {3}}),
                      Partition::from_blocks(3, {{1, 3}, {2}})) == 0.0);
}

TEST_CASE("kernel normalizes over coarsenings") {
  RngStream rng(5, "norm");
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> w;
    const int k = 1 + static_cast<int>(rng.next_below(5));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      w.push_back(rng.next_unit_pos());
      sum += w.back();
    }
    const double target = 0.3 + 0.7 * rng.next_unit();
    for (auto& v : w) v *= target / sum;
    const Paintbox y(w);
    for (int n = 1; n <= 5; ++n) {
      const auto xi = testing::random_partition(n, rng);
      double total = 0.0;
      for (const auto& eta : all_coarsenings(xi)) total += paintbox_prob(y, xi, eta);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("non-coalescence functional") {
  const Paintbox y({0.25, 0.25});
  CHECK(g_nc(1, y) == 0.0);
  CHECK(g_nc(2, y) == doctest::Approx(-std::log(7.0 / 8.0)).epsilon(1e-12));
  CHECK(g_nc(2, Paintbox()) == 0.0);

  // exp(-g_nc) plus the total merge mass is one.
  RngStream rng(9, "gnc");
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> w = {0.3 * rng.next_unit_pos(), 0.2 * rng.next_unit_pos()};
    const Paintbox x(w);
    for (int n = 2; n <= 5; ++n) {
      const auto xi = Partition::singletons(n);
      double merge_mass = 0.0;
      for (const auto& eta : all_coarsenings(xi))
        if (!(eta == xi)) merge_mass += paintbox_prob(x, xi, eta);
      CHECK(std::exp(-g_nc(n, x)) + merge_mass == doctest::Approx(1.0).epsilon(1e-10));
      // Quadratic bound, asserted in its validity region.
      const double bound = std::pow(2.0, n) * x.l2sq();
      if (bound <= 0.5) CHECK(g_nc(n, x) <= 2.0 * bound + 1e-12);
    }
  }
}

TEST_CASE("merger sampling matches the kernel") {
  RngStream rng(13, "sample");
  // Trivial cases first.
  for (int rep = 0; rep < 100; ++rep) {
    CHECK(sample_merger(Paintbox(), 4, rng) == Partition::singletons(4));
    CHECK(sample_merger(Paintbox({1.0}), 3, rng) == Partition::single_block(3));
  }
  // Pair-merge frequency for y = (1/4, 1/4): probability 1/8.
  const Paintbox y({0.25, 0.25});
  const std::uint64_t draws = 200000;
  std::uint64_t merged = 0;
  for (std::uint64_t d = 0; d < draws; ++d)
    if (sample_merger(y, 2, rng).block_count() == 1) ++merged;
  const double p = 0.125;
  const double se = std::sqrt(draws * p * (1 - p));
  CHECK(std::fabs(static_cast<double>(merged) - p * draws) < 4.0 * se);
}

TEST_CASE("sampling consistency under restriction") {
  // The law of the first two blocks of a b=4 merger equals the b=2 merger law.
  const Paintbox y({0.4, 0.3, 0.2});
  RngStream rng(17, "consistency");
  const std::uint64_t draws = 200000;
  std::vector<double> merged4(2, 0.0), merged2(2, 0.0);
  for (std::uint64_t d = 0; d < draws; ++d) {
    const auto alpha = sample_merger(y, 4, rng);
    ++merged4[restrict_to(alpha, 2).block_count() == 1 ? 0 : 1];
    ++merged2[sample_merger(y, 2, rng).block_count() == 1 ? 0 : 1];
  }
  const auto test = chi_square_two_sample(merged4, merged2);
  CHECK(test.p_value > 1e-3);
}
