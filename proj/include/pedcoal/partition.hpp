#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pedcoal {

// Partition of {1,...,n} in canonical form: blocks ordered by least element,
// elements ascending within a block. Small ground sets (n <= 64) are stored
// as bit masks, larger ones as sorted index vectors; both live behind the
// same interface. Immutable value type.
class Partition {
 public:
  Partition() : n_(0) {}

  static Partition singletons(int n);
  static Partition single_block(int n);
  // `blocks` must cover {1..n} disjointly; canonicalized on construction.
  static Partition from_blocks(int n, const std::vector<std::vector<int>>& blocks);
  // labels[i] is an arbitrary class id for element i+1.
  static Partition from_assignment(const std::vector<int>& labels);

  int n() const { return n_; }
  int block_count() const;
  int block_size(int b) const;            // b is a 0-based block index
  std::vector<int> block(int b) const;    // elements ascending, 1-based
  int block_of(int element) const;        // 0-based index of containing block
  std::vector<int> block_sizes() const;

  bool operator==(const Partition& o) const;
  bool operator<(const Partition& o) const;  // canonical total order

  std::string to_text() const;  // e.g. "{1,3|2}"
  static Partition parse_text(std::string_view text);

  bool uses_mask_rep() const { return std::holds_alternative<MaskRep>(rep_); }

 private:
  friend Partition coagulate(const Partition&, const Partition&);
  friend Partition restrict_to(const Partition&, int);
  friend Partition merge_two_blocks(const Partition&, int, int);

  using MaskRep = std::vector<std::uint64_t>;
  using VecRep = std::vector<std::vector<std::uint16_t>>;

  int n_;
  std::variant<MaskRep, VecRep> rep_;

  void canonicalize();
  static Partition make(int n, MaskRep&& m);
  static Partition make(int n, VecRep&& v);
};

// The alpha-coagulator: for each block A of `alpha`, merges the blocks of
// `xi` whose (1-based) canonical indices lie in A intersected with [b].
// Indices of alpha beyond the block count of xi are ignored.
Partition coagulate(const Partition& xi, const Partition& alpha);

// Partition of [m] induced by intersecting blocks with {1..m}.
Partition restrict_to(const Partition& xi, int m);

// Merge the blocks with 0-based indices i and j.
Partition merge_two_blocks(const Partition& xi, int i, int j);

// True iff eta arises from xi by merging exactly two blocks.
bool is_pair_coalescence(const Partition& xi, const Partition& eta);

// All partitions of [n] via restricted growth strings (n small).
std::vector<Partition> all_partitions(int n);

// All coarsenings of xi, i.e. coagulate(xi, alpha) over alpha in E_{|xi|}.
std::vector<Partition> all_coarsenings(const Partition& xi);

// Element of S_n: a partition plus a pairing of blocks that share a diploid
// individual. Pair entries are 0-based canonical block indices.
class GroupedPartition {
 public:
  GroupedPartition() = default;
  GroupedPartition(Partition base, std::vector<std::pair<int, int>> pairs);

  static GroupedPartition dispersed(Partition base) { return GroupedPartition(std::move(base), {}); }

  const Partition& base() const { return base_; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  int pair_count() const { return static_cast<int>(pairs_.size()); }
  int block_count() const { return base_.block_count(); }
  int n() const { return base_.n(); }

  bool operator==(const GroupedPartition& o) const {
    return base_ == o.base_ && pairs_ == o.pairs_;
  }
  bool operator<(const GroupedPartition& o) const {
    if (base_ < o.base_) return true;
    if (o.base_ < base_) return false;
    return pairs_ < o.pairs_;
  }

  std::string to_text() const;  // e.g. "{1|2|3}[1:2]"

 private:
  Partition base_;
  std::vector<std::pair<int, int>> pairs_;
};

// Forgets the grouping of blocks into individuals (map S_n -> E_n).
inline Partition complete_dispersion(const GroupedPartition& g) { return g.base(); }

}  // namespace pedcoal
