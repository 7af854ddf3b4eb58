#include "pedcoal/quenched.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pedcoal {

LineageSet init_sample(const GroupedPartition& xi0, int N) {
  const int b = xi0.block_count();
  if (b > N)
    throw std::invalid_argument("init_sample: more blocks than individuals in the population");
  LineageSet ls;
  ls.positions.resize(b);
  std::vector<char> placed(b, 0);
  std::uint32_t individual = 0;
  for (const auto& pr : xi0.pairs()) {
    ++individual;
    ls.positions[pr.first] = {0, individual};
    ls.positions[pr.second] = {1, individual};
    placed[pr.first] = placed[pr.second] = 1;
  }
  for (int i = 0; i < b; ++i) {
    if (placed[i]) continue;
    ++individual;
    ls.positions[i] = {0, individual};
  }
  ls.generation = 0;
  return ls;
}

// Returns the number of distinct positions after the move, which equals the
// block count of the dispersed state.
static std::size_t step_count_distinct(LineageSet& lineages, const PedigreeSlice& slice,
                                       RngStream& rng) {
  const std::size_t b = lineages.positions.size();
  thread_local std::vector<GenePosition> seen_from, seen_to;
  seen_from.clear();
  seen_to.clear();
  for (std::size_t i = 0; i < b; ++i) {
    const GenePosition cur = lineages.positions[i];
    bool found = false;
    for (std::size_t s = 0; s < seen_from.size(); ++s) {
      if (seen_from[s] == cur) {
        lineages.positions[i] = seen_to[s];
        found = true;
        break;
      }
    }
    if (found) continue;
    const std::uint32_t child = cur.individual;
    if (child < 1 || child > static_cast<std::uint32_t>(slice.N))
      throw std::out_of_range("step: lineage individual outside population");
    const std::uint32_t parent =
        cur.chromosome == 0 ? slice.p0[child - 1] : slice.p1[child - 1];
    const GenePosition next{static_cast<std::uint8_t>(rng.next_coin() ? 1 : 0), parent};
    seen_from.push_back(cur);
    seen_to.push_back(next);
    lineages.positions[i] = next;
  }
  ++lineages.generation;
  // Distinct targets can still collide with each other, so count afresh.
  std::size_t distinct = 0;
  for (std::size_t s = 0; s < seen_to.size(); ++s) {
    bool repeat = false;
    for (std::size_t t = 0; t < s; ++t)
      if (seen_to[t] == seen_to[s]) {
        repeat = true;
        break;
      }
    if (!repeat) ++distinct;
  }
  return distinct;
}

void step(LineageSet& lineages, const PedigreeSlice& slice, RngStream& rng) {
  step_count_distinct(lineages, slice, rng);
}

GroupedPartition state_of(const LineageSet& lineages, const GroupedPartition& xi0) {
  const int b0 = xi0.block_count();
  if (static_cast<int>(lineages.positions.size()) != b0)
    throw std::invalid_argument("state_of: lineage count mismatch");
  const int n = xi0.n();
  // Class id per original block: index of the first block at the same position.
  std::vector<int> class_of(b0);
  std::vector<GenePosition> reps;
  for (int i = 0; i < b0; ++i) {
    int cls = -1;
    for (std::size_t s = 0; s < reps.size(); ++s)
      if (reps[s] == lineages.positions[i]) {
        cls = static_cast<int>(s);
        break;
      }
    if (cls < 0) {
      cls = static_cast<int>(reps.size());
      reps.push_back(lineages.positions[i]);
    }
    class_of[i] = cls;
  }
  std::vector<int> labels(n);
  for (int i = 0; i < b0; ++i)
    for (int leaf : xi0.base().block(i)) labels[leaf - 1] = class_of[i];
  Partition base = Partition::from_assignment(labels);
  // Distinct classes sharing an individual form pairs; the no-selfing slice
  // invariant guarantees at most two classes per individual.
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t a = 0; a < reps.size(); ++a)
    for (std::size_t c = a + 1; c < reps.size(); ++c)
      if (reps[a].individual == reps[c].individual) {
        const int leaf_a = [&] {
          for (int i = 0; i < b0; ++i)
            if (class_of[i] == static_cast<int>(a)) return xi0.base().block(i).front();
          return 0;
        }();
        const int leaf_c = [&] {
          for (int i = 0; i < b0; ++i)
            if (class_of[i] == static_cast<int>(c)) return xi0.base().block(i).front();
          return 0;
        }();
        pairs.emplace_back(base.block_of(leaf_a), base.block_of(leaf_c));
      }
  return GroupedPartition(std::move(base), std::move(pairs));
}

std::uint64_t default_horizon(double c_N) {
  if (c_N <= 0.0) throw std::invalid_argument("default_horizon: c_N must be > 0");
  return static_cast<std::uint64_t>(std::ceil(50.0 / c_N));
}

namespace {

struct LocusState {
  LineageSet lineages;
  Partition dispersed;  // current cd state
  GenealogyTree tree;
  bool done = false;
  RngStream rng;
};

// Advance one locus by one generation; records a coalescence event when the
// dispersed state coarsens. The partition is rebuilt only when the distinct
// position count actually drops.
void advance_locus(LocusState& st, const GroupedPartition& xi0, const PedigreeSlice& slice) {
  const std::size_t distinct = step_count_distinct(st.lineages, slice, st.rng);
  if (static_cast<int>(distinct) < st.dispersed.block_count()) {
    st.dispersed = complete_dispersion(state_of(st.lineages, xi0));
    st.tree.events.push_back({st.lineages.generation, st.dispersed});
  }
  if (st.dispersed.block_count() <= 1) {
    st.done = true;
    st.tree.final_generation = st.lineages.generation;
  }
}

}  // namespace

QuenchedRun run_locus(const Pedigree& pedigree, const GroupedPartition& xi0,
                      const QuenchedRunOptions& opts, RngStream& locus_rng) {
  std::uint64_t horizon = opts.horizon_generations;
  if (horizon == 0) {
    const auto cn = model_c_N_closed_form(pedigree.model());
    horizon = cn ? default_horizon(*cn) : 1000000;
  }
  QuenchedRun out;
  LocusState st{init_sample(xi0, pedigree.N()), complete_dispersion(xi0), GenealogyTree{},
                false, locus_rng};
  st.tree.initial = st.dispersed;
  if (st.dispersed.block_count() <= 1) {
    st.done = true;
    st.tree.final_generation = 0;
  }
  std::size_t next_sample = 0;
  const auto record_samples = [&](std::uint64_t upto) {
    while (next_sample < opts.sample_generations.size() &&
           opts.sample_generations[next_sample] <= upto) {
      out.sampled_states.push_back(state_of(st.lineages, xi0));
      ++next_sample;
    }
  };
  record_samples(0);
  for (std::uint64_t g = 0; g < horizon && !st.done; ++g) {
    const auto slice = pedigree.slice_at(g);
    advance_locus(st, xi0, slice);
    record_samples(st.lineages.generation);
    if (!opts.run_to_mrca && st.lineages.generation >= horizon) break;
  }
  if (!st.done) {
    st.tree.censored = true;
    st.tree.final_generation = st.lineages.generation;
  }
  locus_rng = st.rng;
  out.tree = std::move(st.tree);
  return out;
}

std::vector<GenealogyTree> run_loci_shared_pedigree(const Pedigree& pedigree,
                                                    const GroupedPartition& xi0,
                                                    std::uint64_t loci,
                                                    std::uint64_t loci_seed,
                                                    std::uint64_t horizon_generations) {
  std::vector<LocusState> states;
  states.reserve(loci);
  for (std::uint64_t l = 0; l < loci; ++l) {
    LocusState st{init_sample(xi0, pedigree.N()), complete_dispersion(xi0), GenealogyTree{},
                  false, RngStream(loci_seed, "locus", l)};
    st.tree.initial = st.dispersed;
    if (st.dispersed.block_count() <= 1) {
      st.done = true;
      st.tree.final_generation = 0;
    }
    states.push_back(std::move(st));
  }
  std::uint64_t active = 0;
  for (const auto& st : states) active += st.done ? 0 : 1;
  for (std::uint64_t g = 0; g < horizon_generations && active > 0; ++g) {
    const auto slice = pedigree.slice_at(g);
    for (auto& st : states) {
      if (st.done) continue;
      advance_locus(st, xi0, slice);
      if (st.done) --active;
    }
  }
  std::vector<GenealogyTree> out;
  out.reserve(loci);
  for (auto& st : states) {
    if (!st.done) {
      st.tree.censored = true;
      st.tree.final_generation = st.lineages.generation;
    }
    out.push_back(std::move(st.tree));
  }
  return out;
}

std::uint64_t pair_coalescence_generation(const GenealogyTree& tree, int leaf_a, int leaf_b) {
  if (tree.initial.block_of(leaf_a) == tree.initial.block_of(leaf_b)) return 0;
  for (const auto& ev : tree.events)
    if (ev.state.block_of(leaf_a) == ev.state.block_of(leaf_b)) return ev.generation;
  return UINT64_MAX;
}

}  // namespace pedcoal
