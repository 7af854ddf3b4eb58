#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "pedcoal/cannings.hpp"
#include "pedcoal/partition.hpp"
#include "pedcoal/quenched.hpp"
#include "pedcoal/rng.hpp"

namespace pedcoal::testing {

// Independent labels-to-roots reference for the alpha-coagulator: assign each
// xi block index a root through alpha, then rebuild from leaf labels.
inline Partition coagulate_reference(const Partition& xi, const Partition& alpha) {
  const int b = xi.block_count();
  std::vector<int> root(b);
  for (int i = 0; i < b; ++i) root[i] = i;
  for (int a = 0; a < alpha.block_count(); ++a) {
    int first = -1;
    for (int idx : alpha.block(a)) {
      if (idx > b) continue;
      if (first < 0)
        first = idx - 1;
      else
        root[idx - 1] = first;
    }
  }
  std::vector<int> labels(xi.n());
  for (int i = 0; i < b; ++i)
    for (int leaf : xi.block(i)) labels[leaf - 1] = root[i];
  return Partition::from_assignment(labels);
}

inline Partition random_partition(int n, RngStream& rng) {
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = static_cast<int>(rng.next_below(n));
  return Partition::from_assignment(labels);
}

// Exact one-step law of the dispersed quenched chain from walkers (0,1..n),
// conditional on V: enumerates ordered distinct box-index tuples, parental
// role coins and Mendelian coins with double weights. Small cases only.
inline std::map<GroupedPartition, double> one_step_law_reference(const OffspringMatrix& V,
                                                                 int n) {
  std::vector<std::pair<int, int>> boxes;
  for (const auto& f : V.families)
    for (std::uint32_t c = 0; c < f.count; ++c)
      boxes.emplace_back(static_cast<int>(f.i), static_cast<int>(f.j));
  const int N = V.N;
  double denom_tuples = 1;
  for (int t = 0; t < n; ++t) denom_tuples *= N - t;
  const GroupedPartition start = GroupedPartition::dispersed(Partition::singletons(n));
  std::map<GroupedPartition, double> law;
  std::vector<int> tuple(n);
  std::vector<char> used(N, 0);
  const double w = 1.0 / (denom_tuples * (1 << n) * (1 << n));
  const auto rec = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      for (unsigned roles = 0; roles < (1u << n); ++roles)
        for (unsigned coins = 0; coins < (1u << n); ++coins) {
          LineageSet ls;
          ls.positions.resize(n);
          for (int j = 0; j < n; ++j) {
            const auto& box = boxes[tuple[j]];
            const int p0 = ((roles >> j) & 1u) ? box.second : box.first;
            ls.positions[j] = {static_cast<std::uint8_t>((coins >> j) & 1u),
                               static_cast<std::uint32_t>(p0)};
          }
          ls.generation = 1;
          law[state_of(ls, start)] += w;
        }
      return;
    }
    for (int b = 0; b < N; ++b) {
      if (used[b]) continue;
      used[b] = 1;
      tuple[depth] = b;
      self(self, depth + 1);
      used[b] = 0;
    }
  };
  rec(rec, 0);
  return law;
}

inline OffspringMatrix fixed_matrix(int N, std::vector<OffspringMatrix::Family> families) {
  OffspringMatrix V;
  V.N = N;
  V.families = std::move(families);
  V.totals.assign(N, 0);
  for (const auto& f : V.families) {
    V.totals[f.i - 1] += f.count;
    V.totals[f.j - 1] += f.count;
  }
  V.validate();
  return V;
}

}  // namespace pedcoal::testing
