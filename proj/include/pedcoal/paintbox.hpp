#pragma once

#include <optional>
#include <vector>

#include "pedcoal/partition.hpp"
#include "pedcoal/rng.hpp"

namespace pedcoal {

// A point of the simplex Delta with finite support: nonincreasing positive
// weights w_1 >= w_2 >= ... > 0 with sum <= 1; the implicit leftover interval
// J has mass 1 - |w|_1. Immutable.
class Paintbox {
 public:
  Paintbox() = default;
  explicit Paintbox(std::vector<double> weights);

  // `copies` equal atoms of mass w, e.g. repeated(psi/4, 4).
  static Paintbox repeated(double w, int copies);

  // In-place variant of repeated(); reuses storage in atom-generation loops.
  void assign_repeated(double w, int copies);

  const std::vector<double>& weights() const { return w_; }
  std::size_t support_size() const { return w_.size(); }
  bool empty() const { return w_.empty(); }
  double l1() const { return l1_; }
  double l2sq() const { return l2sq_; }
  double l2() const;
  double leftover() const { return leftover_; }

  // Bucket (0-based) receiving a uniform draw u, or -1 for the leftover J.
  int bucket_of(double u) const;

  bool operator==(const Paintbox& o) const { return w_ == o.w_; }

 private:
  std::vector<double> w_;
  std::vector<double> cum_;  // cumulative weights for bucket lookup
  double l1_ = 0.0;
  double l2sq_ = 0.0;
  double leftover_ = 1.0;
};

// The doubling map: each weight becomes two halved entries. Preserves l1,
// halves l2sq. Reflects the two chromosomes of a diploid parent.
Paintbox phi(const Paintbox& x);

// Probability that a y-merger started from all-singletons with b blocks is
// void (no two blocks share a bucket).
double noncoalescence_prob(int b, const Paintbox& y);

// -log of the non-coalescence probability for a sample of size n.
double g_nc(int n, const Paintbox& x);

// Exact transition probability p(y; xi, eta) of a y-merger. Returns 0 when
// eta is not a coarsening of xi. Exact double-sum evaluation; feasible for
// moderate block counts (throws beyond 14 merged/singleton slots).
double paintbox_prob(const Paintbox& y, const Partition& xi, const Partition& eta);

// Decomposes eta relative to xi: sizes (in xi-blocks) of the groups that
// each eta block gathers. Empty when eta is not a coarsening of xi.
std::optional<std::vector<int>> coarsening_group_sizes(const Partition& xi,
                                                       const Partition& eta);

// One y-merger on b exchangeable blocks: each block lands in a bucket or in
// the leftover interval; co-bucketed blocks form the merger partition of [b].
Partition sample_merger(const Paintbox& y, int b, RngStream& rng);

// Allocation-light core of sample_merger: writes class labels of the b blocks
// into `labels` and returns the number of distinct classes (== b means the
// merger is void).
int sample_merger_labels(const Paintbox& y, int b, RngStream& rng,
                         std::vector<int>& labels);

}  // namespace pedcoal
