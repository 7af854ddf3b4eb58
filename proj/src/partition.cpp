#include "pedcoal/partition.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace pedcoal {

Partition Partition::make(int n, MaskRep&& m) {
  Partition p;
  p.n_ = n;
  p.rep_ = std::move(m);
  p.canonicalize();
  return p;
}

Partition Partition::make(int n, VecRep&& v) {
  Partition p;
  p.n_ = n;
  p.rep_ = std::move(v);
  p.canonicalize();
  return p;
}

void Partition::canonicalize() {
  if (auto* m = std::get_if<MaskRep>(&rep_)) {
    m->erase(std::remove(m->begin(), m->end(), 0ULL), m->end());
    std::sort(m->begin(), m->end(), [](std::uint64_t a, std::uint64_t b) {
      return std::countr_zero(a) < std::countr_zero(b);
    });
  } else {
    auto& v = std::get<VecRep>(rep_);
    for (auto& blk : v) std::sort(blk.begin(), blk.end());
    v.erase(std::remove_if(v.begin(), v.end(), [](const auto& b) { return b.empty(); }),
            v.end());
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
  }
}

Partition Partition::singletons(int n) {
  if (n < 0) throw std::invalid_argument("Partition: negative n");
  if (n <= 64) {
    MaskRep m(n);
    for (int i = 0; i < n; ++i) m[i] = 1ULL << i;
    return make(n, std::move(m));
  }
  VecRep v(n);
  for (int i = 0; i < n; ++i) v[i] = {static_cast<std::uint16_t>(i + 1)};
  return make(n, std::move(v));
}

Partition Partition::single_block(int n) {
  if (n < 0) throw std::invalid_argument("Partition: negative n");
  if (n == 0) return singletons(0);
  if (n <= 64) {
    MaskRep m{n == 64 ? ~0ULL : ((1ULL << n) - 1)};
    return make(n, std::move(m));
  }
  VecRep v(1);
  for (int i = 0; i < n; ++i) v[0].push_back(static_cast<std::uint16_t>(i + 1));
  return make(n, std::move(v));
}

Partition Partition::from_blocks(int n, const std::vector<std::vector<int>>& blocks) {
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  std::size_t total = 0;
  for (const auto& blk : blocks) {
    if (blk.empty()) throw std::invalid_argument("Partition: empty block");
    for (int e : blk) {
      if (e < 1 || e > n || seen[e]) throw std::invalid_argument("Partition: bad element");
      seen[e] = 1;
      ++total;
    }
  }
  if (total != static_cast<std::size_t>(n))
    throw std::invalid_argument("Partition: blocks do not cover [n]");
  if (n <= 64) {
    MaskRep m;
    m.reserve(blocks.size());
    for (const auto& blk : blocks) {
      std::uint64_t w = 0;
      for (int e : blk) w |= 1ULL << (e - 1);
      m.push_back(w);
    }
    return make(n, std::move(m));
  }
  VecRep v;
  v.reserve(blocks.size());
  for (const auto& blk : blocks) {
    std::vector<std::uint16_t> b;
    b.reserve(blk.size());
    for (int e : blk) b.push_back(static_cast<std::uint16_t>(e));
    v.push_back(std::move(b));
  }
  return make(n, std::move(v));
}

Partition Partition::from_assignment(const std::vector<int>& labels) {
  const int n = static_cast<int>(labels.size());
  std::vector<std::vector<int>> blocks;
  std::vector<std::pair<int, int>> label_to_block;  // (label, block idx)
  for (int i = 0; i < n; ++i) {
    int found = -1;
    for (const auto& [lab, idx] : label_to_block)
      if (lab == labels[i]) {
        found = idx;
        break;
      }
    if (found < 0) {
      found = static_cast<int>(blocks.size());
      blocks.emplace_back();
      label_to_block.emplace_back(labels[i], found);
    }
    blocks[found].push_back(i + 1);
  }
  return from_blocks(n, blocks);
}

int Partition::block_count() const {
  if (auto* m = std::get_if<MaskRep>(&rep_)) return static_cast<int>(m->size());
  return static_cast<int>(std::get<VecRep>(rep_).size());
}

int Partition::block_size(int b) const {
  if (auto* m = std::get_if<MaskRep>(&rep_)) return std::popcount((*m)[b]);
  return static_cast<int>(std::get<VecRep>(rep_)[b].size());
}

std::vector<int> Partition::block(int b) const {
  std::vector<int> out;
  if (auto* m = std::get_if<MaskRep>(&rep_)) {
    std::uint64_t w = (*m)[b];
    while (w) {
      out.push_back(std::countr_zero(w) + 1);
      w &= w - 1;
    }
  } else {
    for (auto e : std::get<VecRep>(rep_)[b]) out.push_back(e);
  }
  return out;
}

int Partition::block_of(int element) const {
  if (element < 1 || element > n_) throw std::out_of_range("Partition::block_of");
  if (auto* m = std::get_if<MaskRep>(&rep_)) {
    const std::uint64_t bit = 1ULL << (element - 1);
    for (std::size_t i = 0; i < m->size(); ++i)
      if ((*m)[i] & bit) return static_cast<int>(i);
  } else {
    const auto& v = std::get<VecRep>(rep_);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (std::binary_search(v[i].begin(), v[i].end(), element)) return static_cast<int>(i);
  }
  throw std::logic_error("Partition::block_of: element not found");
}

std::vector<int> Partition::block_sizes() const {
  std::vector<int> out(block_count());
  for (int b = 0; b < block_count(); ++b) out[b] = block_size(b);
  return out;
}

bool Partition::operator==(const Partition& o) const {
  return n_ == o.n_ && rep_ == o.rep_;
}

bool Partition::operator<(const Partition& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  return rep_ < o.rep_;
}

std::string Partition::to_text() const {
  std::string s = "{";
  for (int b = 0; b < block_count(); ++b) {
    if (b) s += '|';
    const auto blk = block(b);
    for (std::size_t i = 0; i < blk.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(blk[i]);
    }
  }
  s += '}';
  return s;
}

Partition Partition::parse_text(std::string_view text) {
  if (text.size() < 2 || text.front() != '{' || text.back() != '}')
    throw std::invalid_argument("Partition::parse_text: expected {...}");
  std::vector<std::vector<int>> blocks;
  std::vector<int> cur;
  int val = -1;
  int n = 0;
  for (std::size_t i = 1; i + 1 < text.size() + 1; ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      val = (val < 0 ? 0 : val) * 10 + (c - '0');
    } else if (c == ',' || c == '|' || c == '}') {
      if (val >= 0) {
        cur.push_back(val);
        n = std::max(n, val);
        val = -1;
      }
      if (c != ',') {
        if (!cur.empty()) blocks.push_back(std::move(cur));
        cur.clear();
      }
      if (c == '}') break;
    } else {
      throw std::invalid_argument("Partition::parse_text: bad character");
    }
  }
  return from_blocks(n, blocks);
}

Partition coagulate(const Partition& xi, const Partition& alpha) {
  const int b = xi.block_count();
  if (auto* m = std::get_if<Partition::MaskRep>(&xi.rep_)) {
    Partition::MaskRep out;
    std::vector<char> used(b, 0);
    for (int a = 0; a < alpha.block_count(); ++a) {
      std::uint64_t merged = 0;
      for (int idx : alpha.block(a)) {
        if (idx <= b) {
          merged |= (*m)[idx - 1];
          used[idx - 1] = 1;
        }
      }
      if (merged) out.push_back(merged);
    }
    for (int i = 0; i < b; ++i)
      if (!used[i]) out.push_back((*m)[i]);
    return Partition::make(xi.n_, std::move(out));
  }
  const auto& v = std::get<Partition::VecRep>(xi.rep_);
  Partition::VecRep out;
  std::vector<char> used(b, 0);
  for (int a = 0; a < alpha.block_count(); ++a) {
    std::vector<std::uint16_t> merged;
    for (int idx : alpha.block(a)) {
      if (idx <= b) {
        merged.insert(merged.end(), v[idx - 1].begin(), v[idx - 1].end());
        used[idx - 1] = 1;
      }
    }
    if (!merged.empty()) out.push_back(std::move(merged));
  }
  for (int i = 0; i < b; ++i)
    if (!used[i]) out.push_back(v[i]);
  return Partition::make(xi.n_, std::move(out));
}

Partition restrict_to(const Partition& xi, int m) {
  if (m < 0 || m > xi.n()) throw std::out_of_range("restrict_to: m out of range");
  if (auto* mm = std::get_if<Partition::MaskRep>(&xi.rep_)) {
    const std::uint64_t keep = (m == 64) ? ~0ULL : ((1ULL << m) - 1);
    Partition::MaskRep out;
    for (auto w : *mm)
      if (w & keep) out.push_back(w & keep);
    return Partition::make(m, std::move(out));
  }
  const auto& v = std::get<Partition::VecRep>(xi.rep_);
  if (m <= 64) {
    Partition::MaskRep out;
    for (const auto& blk : v) {
      std::uint64_t w = 0;
      for (auto e : blk)
        if (e <= m) w |= 1ULL << (e - 1);
      if (w) out.push_back(w);
    }
    return Partition::make(m, std::move(out));
  }
  Partition::VecRep out;
  for (const auto& blk : v) {
    std::vector<std::uint16_t> nb;
    for (auto e : blk)
      if (e <= m) nb.push_back(e);
    if (!nb.empty()) out.push_back(std::move(nb));
  }
  return Partition::make(m, std::move(out));
}

Partition merge_two_blocks(const Partition& xi, int i, int j) {
  if (i == j) return xi;
  if (auto* m = std::get_if<Partition::MaskRep>(&xi.rep_)) {
    Partition::MaskRep out = *m;
    out[i] |= out[j];
    out[j] = 0;
    return Partition::make(xi.n_, std::move(out));
  }
  Partition::VecRep out = std::get<Partition::VecRep>(xi.rep_);
  out[i].insert(out[i].end(), out[j].begin(), out[j].end());
  out[j].clear();
  return Partition::make(xi.n_, std::move(out));
}

bool is_pair_coalescence(const Partition& xi, const Partition& eta) {
  if (xi.n() != eta.n()) return false;
  const int b = xi.block_count();
  if (eta.block_count() != b - 1) return false;
  // Map each xi block into the eta block holding its least element; a pair
  // coalescence means exactly one eta block receives two xi blocks.
  std::vector<int> hits(eta.block_count(), 0);
  for (int i = 0; i < b; ++i) {
    const auto blk = xi.block(i);
    const int target = eta.block_of(blk.front());
    // every element of the xi block must sit in the same eta block
    for (int e : blk)
      if (eta.block_of(e) != target) return false;
    ++hits[target];
  }
  int doubles = 0;
  for (int h : hits) {
    if (h == 2)
      ++doubles;
    else if (h != 1)
      return false;
  }
  return doubles == 1;
}

std::vector<Partition> all_partitions(int n) {
  std::vector<Partition> out;
  if (n == 0) {
    out.push_back(Partition::singletons(0));
    return out;
  }
  // Restricted growth strings: a[0]=0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(n, 0);
  for (;;) {
    out.push_back(Partition::from_assignment(a));
    int i = n - 1;
    for (; i > 0; --i) {
      int mx = 0;
      for (int j = 0; j < i; ++j) mx = std::max(mx, a[j]);
      if (a[i] <= mx) {
        ++a[i];
        break;
      }
      a[i] = 0;
    }
    if (i == 0) break;
  }
  return out;
}

std::vector<Partition> all_coarsenings(const Partition& xi) {
  std::vector<Partition> out;
  for (const auto& alpha : all_partitions(xi.block_count()))
    out.push_back(coagulate(xi, alpha));
  return out;
}

GroupedPartition::GroupedPartition(Partition base, std::vector<std::pair<int, int>> pairs)
    : base_(std::move(base)), pairs_(std::move(pairs)) {
  const int b = base_.block_count();
  std::vector<char> used(b, 0);
  for (auto& pr : pairs_) {
    if (pr.first > pr.second) std::swap(pr.first, pr.second);
    if (pr.first < 0 || pr.second >= b || pr.first == pr.second)
      throw std::invalid_argument("GroupedPartition: bad pair index");
    if (used[pr.first] || used[pr.second])
      throw std::invalid_argument("GroupedPartition: block in more than one pair");
    used[pr.first] = used[pr.second] = 1;
  }
  std::sort(pairs_.begin(), pairs_.end());
}

std::string GroupedPartition::to_text() const {
  std::string s = base_.to_text();
  if (!pairs_.empty()) {
    s += '[';
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(pairs_[i].first + 1);
      s += ':';
      s += std::to_string(pairs_[i].second + 1);
    }
    s += ']';
  }
  return s;
}

}  // namespace pedcoal
