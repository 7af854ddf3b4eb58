#include "pedcoal/paintbox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pedcoal {

namespace {

constexpr double kSimplexTol = 1e-12;

// Falling factorial (n)_k.
double falling(double n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= n - i;
  return r;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Paintbox::Paintbox(std::vector<double> weights) : w_(std::move(weights)) {
  for (double& w : w_) {
    if (w < 0.0 && w > -kSimplexTol) w = 0.0;
    if (w < 0.0 || w > 1.0 + kSimplexTol)
      throw std::invalid_argument("Paintbox: weight outside [0,1]");
    w = std::min(w, 1.0);
  }
  w_.erase(std::remove(w_.begin(), w_.end(), 0.0), w_.end());
  std::sort(w_.begin(), w_.end(), std::greater<double>());
  cum_.resize(w_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    acc += w_[i];
    cum_[i] = acc;
    l2sq_ += w_[i] * w_[i];
  }
  l1_ = acc;
  if (l1_ > 1.0 + kSimplexTol) throw std::invalid_argument("Paintbox: total mass > 1");
  leftover_ = std::max(0.0, 1.0 - l1_);
}

Paintbox Paintbox::repeated(double w, int copies) {
  return Paintbox(std::vector<double>(static_cast<std::size_t>(copies), w));
}

void Paintbox::assign_repeated(double w, int copies) {
  if (w < 0.0 || w * copies > 1.0 + kSimplexTol)
    throw std::invalid_argument("Paintbox: total mass > 1");
  w_.assign(static_cast<std::size_t>(copies), w);
  cum_.resize(w_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    acc += w;
    cum_[i] = acc;
  }
  l1_ = acc;
  l2sq_ = w * w * copies;
  leftover_ = std::max(0.0, 1.0 - l1_);
}

double Paintbox::l2() const { return std::sqrt(l2sq_); }

int Paintbox::bucket_of(double u) const {
  if (w_.empty() || u >= cum_.back()) return -1;
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  return static_cast<int>(it - cum_.begin());
}

Paintbox phi(const Paintbox& x) {
  std::vector<double> out;
  out.reserve(2 * x.weights().size());
  for (double w : x.weights()) {
    out.push_back(w / 2.0);
    out.push_back(w / 2.0);
  }
  return Paintbox(std::move(out));
}

double noncoalescence_prob(int b, const Paintbox& y) {
  if (b <= 1 || y.empty()) return 1.0;
  const auto& w = y.weights();
  const int q = static_cast<int>(w.size());
  const int lmax = std::min(b, q);
  // Elementary symmetric polynomials e_0..e_lmax of the weights.
  std::vector<double> e(lmax + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < q; ++i)
    for (int j = std::min(i + 1, lmax); j >= 1; --j) e[j] += w[i] * e[j - 1];
  const double rest = y.leftover();
  double p = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    double term = falling(b, l) * e[l];  // C(b,l) * l! = (b)_l
    if (b - l > 0) {
      if (rest == 0.0) continue;
      term *= std::pow(rest, b - l);
    }
    p += term;
  }
  return std::min(1.0, std::max(0.0, p));
}

double g_nc(int n, const Paintbox& x) {
  const double p = noncoalescence_prob(n, x);
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(p);
}

std::optional<std::vector<int>> coarsening_group_sizes(const Partition& xi,
                                                       const Partition& eta) {
  if (xi.n() != eta.n()) return std::nullopt;
  const int b = xi.block_count();
  const int be = eta.block_count();
  std::vector<int> groups(be, 0);
  for (int i = 0; i < b; ++i) {
    const auto blk = xi.block(i);
    const int target = eta.block_of(blk.front());
    for (int e : blk)
      if (eta.block_of(e) != target) return std::nullopt;
    ++groups[target];
  }
  for (int g : groups)
    if (g == 0) return std::nullopt;
  return groups;
}

namespace {

// Sum over ordered tuples of pairwise-distinct bucket indices of
// prod_t y_{i_t}^{e_t}, via Moebius inversion over set partitions of the
// slots: merging slots into one index contributes power sums of summed
// exponents with sign (-1)^{|B|-1}(|B|-1)!.
double distinct_tuple_sum(const std::vector<int>& exponents,
                          const std::vector<double>& power_sums) {
  const int m = static_cast<int>(exponents.size());
  if (m == 0) return 1.0;
  if (m > 14) throw std::invalid_argument("paintbox_prob: too many groups for exact sum");
  // Iterate set partitions of [m] by restricted growth strings.
  std::vector<int> a(m, 0);
  double total = 0.0;
  for (;;) {
    int nblocks = 0;
    for (int i = 0; i < m; ++i) nblocks = std::max(nblocks, a[i] + 1);
    double term = 1.0;
    for (int blk = 0; blk < nblocks; ++blk) {
      int exp_sum = 0, size = 0;
      for (int i = 0; i < m; ++i)
        if (a[i] == blk) {
          exp_sum += exponents[i];
          ++size;
        }
      double coef = power_sums[exp_sum];
      for (int s = 1; s < size; ++s) coef *= -s;  // (-1)^{size-1}(size-1)!
      term *= coef;
    }
    total += term;
    int i = m - 1;
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
  return total;
}

}  // namespace

double paintbox_prob(const Paintbox& y, const Partition& xi, const Partition& eta) {
  const auto groups = coarsening_group_sizes(xi, eta);
  if (!groups) return 0.0;
  // Merged groups of k >= 2 blocks; singleton groups do not participate.
  std::vector<int> merged;
  int s = 0;
  for (int k : *groups) {
    if (k >= 2)
      merged.push_back(k);
    else
      ++s;
  }
  if (merged.empty() && y.empty()) return 1.0;
  if (!merged.empty() && y.empty()) return 0.0;

  int max_exp = 0;
  for (int k : merged) max_exp += k;
  max_exp += s;  // singles contribute exponent-1 slots
  std::vector<double> power_sums(max_exp + 1, 0.0);
  power_sums[0] = static_cast<double>(y.support_size());
  for (double w : y.weights()) {
    double p = 1.0;
    for (int t = 1; t <= max_exp; ++t) {
      p *= w;
      power_sums[t] += p;
    }
  }

  const double rest = y.leftover();
  double total = 0.0;
  std::vector<int> exponents = merged;
  for (int l = 0; l <= s; ++l) {
    if (l > 0) exponents.push_back(1);
    double coef = binom(s, l);
    if (s - l > 0) {
      if (rest == 0.0) continue;
      coef *= std::pow(rest, s - l);
    }
    if (coef == 0.0) continue;
    total += coef * distinct_tuple_sum(exponents, power_sums);
  }
  return std::min(1.0, std::max(0.0, total));
}

int sample_merger_labels(const Paintbox& y, int b, RngStream& rng,
                         std::vector<int>& labels) {
  if (b < 0) throw std::invalid_argument("sample_merger: negative block count");
  labels.resize(b);
  const int support = static_cast<int>(y.support_size());
  int next_free = support;
  int distinct = 0;
  // Buckets hit so far; support sizes stay small enough for a linear scan.
  thread_local std::vector<int> seen;
  seen.clear();
  for (int i = 0; i < b; ++i) {
    const int bucket = y.empty() ? -1 : y.bucket_of(rng.next_unit());
    if (bucket < 0) {
      labels[i] = next_free++;
      ++distinct;
      continue;
    }
    labels[i] = bucket;
    bool repeat = false;
    for (int s : seen)
      if (s == bucket) {
        repeat = true;
        break;
      }
    if (!repeat) {
      seen.push_back(bucket);
      ++distinct;
    }
  }
  return distinct;
}

Partition sample_merger(const Paintbox& y, int b, RngStream& rng) {
  thread_local std::vector<int> labels;
  sample_merger_labels(y, b, rng, labels);
  return Partition::from_assignment(labels);
}

}  // namespace pedcoal
