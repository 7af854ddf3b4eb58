#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "pedcoal/cannings.hpp"
#include "pedcoal/partition.hpp"
#include "pedcoal/rng.hpp"

namespace pedcoal {

// One gene copy: chromosome 0 or 1 within a diploid individual.
struct GenePosition {
  std::uint8_t chromosome = 0;
  std::uint32_t individual = 0;  // 1-based

  bool operator==(const GenePosition& o) const {
    return chromosome == o.chromosome && individual == o.individual;
  }
  bool operator<(const GenePosition& o) const {
    if (individual != o.individual) return individual < o.individual;
    return chromosome < o.chromosome;
  }
};

// Positions of the ancestral lines of the sample blocks; coalesced lines
// share a position and move together from then on.
struct LineageSet {
  std::vector<GenePosition> positions;  // one per block of the initial state
  std::uint64_t generation = 0;
};

// Places paired blocks on the two chromosomes of one individual and unpaired
// blocks on fresh individuals. Throws when the state needs more individuals
// than the population holds.
LineageSet init_sample(const GroupedPartition& xi0, int N);

// One backward generation: each distinct position draws a fair Mendelian coin
// and moves to the recorded parent; identical positions move together.
void step(LineageSet& lineages, const PedigreeSlice& slice, RngStream& rng);

// Current coalescent state: blocks are classes of equal positions, pairs mark
// distinct classes inside one individual.
GroupedPartition state_of(const LineageSet& lineages, const GroupedPartition& xi0);

struct CoalescenceEvent {
  std::uint64_t generation = 0;
  Partition state;  // completely dispersed state after the merge
};

// Jump history of one locus on a pedigree, in pedigree generations.
struct GenealogyTree {
  Partition initial;                    // cd of the initial state
  std::vector<CoalescenceEvent> events; // one entry per coalescence
  std::uint64_t final_generation = 0;   // MRCA generation, or horizon if censored
  bool censored = false;

  int leaf_count() const { return initial.n(); }
};

struct QuenchedRunOptions {
  std::uint64_t horizon_generations = 0;  // 0: derive from c_N via the default rule
  bool run_to_mrca = true;
  std::vector<std::uint64_t> sample_generations;  // record state at these times
};

struct QuenchedRun {
  GenealogyTree tree;
  std::vector<GroupedPartition> sampled_states;  // aligned with sample_generations
};

// Default censoring horizon: 50 / c_N generations.
std::uint64_t default_horizon(double c_N);

QuenchedRun run_locus(const Pedigree& pedigree, const GroupedPartition& xi0,
                      const QuenchedRunOptions& opts, RngStream& locus_rng);

// Many conditionally independent loci on one shared pedigree, advanced in
// lockstep so each generation's slice is realized exactly once. Locus i uses
// the stream (loci_seed, "locus", i); results do not depend on batching.
std::vector<GenealogyTree> run_loci_shared_pedigree(const Pedigree& pedigree,
                                                    const GroupedPartition& xi0,
                                                    std::uint64_t loci,
                                                    std::uint64_t loci_seed,
                                                    std::uint64_t horizon_generations);

// Generation at which the blocks containing leaves a and b coalesce, or
// UINT64_MAX when censored before that.
std::uint64_t pair_coalescence_generation(const GenealogyTree& tree, int leaf_a, int leaf_b);

}  // namespace pedcoal
