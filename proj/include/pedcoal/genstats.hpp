#pragma once

#include <cstdint>
#include <vector>

#include "pedcoal/limit.hpp"
#include "pedcoal/quenched.hpp"
#include "pedcoal/rng.hpp"

namespace pedcoal {

// Branch lengths of one genealogy classified by the number of leaves
// subtended: L[i-1] is the total length carrying exactly i of the n leaves.
struct BranchSpectrum {
  int n = 0;
  std::vector<double> L;  // size n-1
  double t_total = 0.0;
  bool censored = false;
};

BranchSpectrum branch_spectrum(const CoalescentRun& run);
// Quenched tree with times rescaled by c_N.
BranchSpectrum branch_spectrum(const GenealogyTree& tree, double c_N);

// Streaming pooled site-frequency spectrum: (sum_loci L_i) / (sum_loci T_total),
// the infinite-sites expected proportion of polymorphic sites in class i.
class SfsAccumulator {
 public:
  explicit SfsAccumulator(int n)
      : n_(n),
        sum_l_(n > 1 ? n - 1 : 0, 0.0),
        sum_l_sq_(sum_l_.size(), 0.0),
        sum_lt_(sum_l_.size(), 0.0) {}

  void add(const BranchSpectrum& s);
  void merge(const SfsAccumulator& o);

  std::vector<double> sfs() const;  // throws when no uncensored locus was added
  // Delta-method standard errors of the pooled ratio estimator.
  std::vector<double> sfs_stderr() const;
  double mean_t_total() const { return loci_ ? sum_t_ / static_cast<double>(loci_) : 0.0; }
  std::uint64_t loci() const { return loci_; }
  std::uint64_t censored() const { return censored_; }
  const std::vector<double>& summed_lengths() const { return sum_l_; }
  double summed_t_total() const { return sum_t_; }

 private:
  int n_;
  std::vector<double> sum_l_;
  std::vector<double> sum_l_sq_;
  std::vector<double> sum_lt_;
  double sum_t_ = 0.0;
  double sum_t_sq_ = 0.0;
  std::uint64_t loci_ = 0;
  std::uint64_t censored_ = 0;
};

// Infinite-sites mutation placement: S_i ~ Poisson(theta/2 * L_i), independent
// across frequency classes.
std::vector<std::uint64_t> sample_mutation_sfs(const BranchSpectrum& s, double theta,
                                               RngStream& rng);

// ---- The two-parameter large-family model of the experiments ----------------
//
// The pedigree is a list of times of large families: a Poisson process of
// rate lambda per unit of Kingman-pair-rate-1 time. At an event each block
// traces to one of the prolific parent's chromosomes with probability psi/4
// each, or escapes with probability 1 - psi/2; co-traced blocks merge.

class DeltaPedigree {
 public:
  DeltaPedigree(double lambda, std::uint64_t seed)
      : lambda_(lambda), stream_(seed, "delta-events") {}

  double lambda() const { return lambda_; }
  // Index of the first event at time > t, materializing lazily.
  std::size_t first_event_after(double t);
  double event_time(std::size_t idx);

 private:
  double lambda_;
  RngStream stream_;
  std::vector<double> times_;
  double frontier_ = 0.0;
};

// Full run with recorded states.
CoalescentRun delta_model_locus(DeltaPedigree& pedigree, double psi, int n,
                                RngStream& rng, double kingman_rate = 1.0);

// Size-multiset fast path; consumes randomness identically to
// delta_model_locus, so equal seeds give exactly equal spectra.
BranchSpectrum delta_model_spectrum(DeltaPedigree& pedigree, double psi, int n,
                                    RngStream& rng, double kingman_rate = 1.0);

// ---- Law-of-total-variance decomposition (quenched vs annealed) -------------

struct VarianceDecomposition {
  std::uint64_t pedigrees = 0;     // P
  std::uint64_t loci = 0;          // L per pedigree
  std::uint64_t direct_reps = 0;   // fresh-pedigree single-locus replicates
  double within = 0.0;             // estimate of E[Var(T|G)]
  double between = 0.0;            // bias-corrected Var(E[T|G]); clamped at 0
  double between_raw = 0.0;        // uncorrected variance of pedigree means
  double total_panel = 0.0;        // within + between
  double total_direct = 0.0;       // sample variance of the direct replicates
  double frac_within = 0.0;        // within / total_panel
  double frac_between = 0.0;
  double within_se = 0.0;
  double between_se = 0.0;
  double frac_within_se = 0.0;
  bool between_clamped = false;
  double mean_t_total = 0.0;
};

VarianceDecomposition variance_decomposition(double psi, double lambda, int n,
                                             std::uint64_t pedigrees, std::uint64_t loci,
                                             std::uint64_t direct_reps, std::uint64_t seed);

}  // namespace pedcoal
