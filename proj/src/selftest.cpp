#include "pedcoal/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>

#include "pedcoal/cannings.hpp"
#include "pedcoal/genstats.hpp"
#include "pedcoal/io.hpp"
#include "pedcoal/limit.hpp"
#include "pedcoal/paintbox.hpp"
#include "pedcoal/partition.hpp"
#include "pedcoal/quenched.hpp"
#include "pedcoal/rng.hpp"
#include "pedcoal/stats.hpp"

namespace pedcoal {

namespace {

// ---------------------------------------------------------------------------
// Exact rational arithmetic for the transition-probability oracle.
// ---------------------------------------------------------------------------

struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n, long long d = 1) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::logic_error("Rat: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  static Rat from128(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rat: overflow");
    Rat r;
    r.num = static_cast<long long>(n);
    r.den = static_cast<long long>(d);
    return r;
  }

  Rat operator+(const Rat& o) const {
    return from128(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den,
                   static_cast<__int128>(den) * o.den);
  }
  Rat operator*(const Rat& o) const {
    return from128(static_cast<__int128>(num) * o.num, static_cast<__int128>(den) * o.den);
  }
  bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

// Expanded parent-pair boxes of an offspring matrix, canonical order.
std::vector<std::pair<int, int>> expand_boxes(const OffspringMatrix& V) {
  std::vector<std::pair<int, int>> boxes;
  for (const auto& f : V.families)
    for (std::uint32_t c = 0; c < f.count; ++c)
      boxes.emplace_back(static_cast<int>(f.i), static_cast<int>(f.j));
  return boxes;
}

// E[prod_l (Vhat_{i_l})_{k_l down} | V] by exhaustive enumeration of the 2^N
// parental-role coins. Exact rational output.
Rat expected_falling_product(const OffspringMatrix& V,
                             const std::vector<std::pair<int, int>>& parent_and_k) {
  const auto boxes = expand_boxes(V);
  const int N = V.N;
  long long total = 0;
  std::vector<int> vhat(N + 1, 0);
  for (std::uint32_t coins = 0; coins < (1u << N); ++coins) {
    std::fill(vhat.begin(), vhat.end(), 0);
    for (int c = 0; c < N; ++c) {
      const bool pick_second = (coins >> c) & 1u;
      ++vhat[pick_second ? boxes[c].second : boxes[c].first];
    }
    long long prod = 1;
    for (const auto& [parent, k] : parent_and_k) {
      for (int t = 0; t < k; ++t) prod *= vhat[parent] - t;
      if (prod == 0) break;
    }
    if (prod > 0) total += prod;
  }
  return Rat(total, 1LL << N);
}

// Exact one-step law of the coalescent from the dispersed start with walkers
// at (0, 1), ..., (0, n), conditional on V: enumerates ordered box tuples,
// role coins and Mendelian coins. Uses the real state extraction.
std::map<GroupedPartition, Rat> exact_one_step_law(const OffspringMatrix& V, int n) {
  const auto boxes = expand_boxes(V);
  const int N = V.N;
  std::map<GroupedPartition, Rat> law;
  const GroupedPartition start = GroupedPartition::dispersed(Partition::singletons(n));

  // Ordered tuples of distinct box indices for the first n children.
  std::vector<int> tuple(n, -1);
  std::vector<char> used(N, 0);
  long long denom_tuples = 1;
  for (int t = 0; t < n; ++t) denom_tuples *= N - t;

  const auto emit = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      for (std::uint32_t roles = 0; roles < (1u << n); ++roles) {
        for (std::uint32_t coins = 0; coins < (1u << n); ++coins) {
          LineageSet ls;
          ls.positions.resize(n);
          for (int j = 0; j < n; ++j) {
            const auto& box = boxes[tuple[j]];
            const bool flip = (roles >> j) & 1u;
            const int p0 = flip ? box.second : box.first;
            const std::uint8_t m = static_cast<std::uint8_t>((coins >> j) & 1u);
            ls.positions[j] = {m, static_cast<std::uint32_t>(p0)};
          }
          ls.generation = 1;
          const auto state = state_of(ls, start);
          const Rat w(1, denom_tuples);
          const Rat w2 = w * Rat(1, 1LL << n) * Rat(1, 1LL << n);
          auto [it, inserted] = law.emplace(state, w2);
          if (!inserted) it->second = it->second + w2;
        }
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
  emit(emit, 0);
  return law;
}

// Right-hand side of the conditional transition formula for eta in E_n.
Rat transition_formula_dispersed(const OffspringMatrix& V, const Partition& eta, int n) {
  const int N = V.N;
  const int r = eta.block_count();
  const auto group_sizes = eta.block_sizes();  // k_l >= 1, sum = n
  long long denom = 1;
  for (int t = 0; t < n; ++t) denom *= N - t;  // (N)_{b down}, b = n
  // 2^{r - sum k} = 2^{r - n}
  Rat factor(1, 1LL << (n - r));

  Rat sum(0, 1);
  std::vector<int> idx(r, 0);
  std::vector<char> used(N + 1, 0);
  const auto rec = [&](auto&& self, int depth) -> void {
    if (depth == r) {
      std::vector<std::pair<int, int>> pk;
      for (int l = 0; l < r; ++l) pk.emplace_back(idx[l], group_sizes[l]);
      sum = sum + expected_falling_product(V, pk);
      return;
    }
    for (int i = 1; i <= N; ++i) {
      if (used[i]) continue;
      used[i] = 1;
      idx[depth] = i;
      self(self, depth + 1);
      used[i] = 0;
    }
  };
  rec(rec, 0);
  return factor * Rat(1, denom) * sum;
}

// Right-hand side of the aggregated formula: total probability of reaching
// any state whose complete dispersion is eta.
Rat transition_formula_aggregated(const OffspringMatrix& V, const Partition& eta, int n) {
  const int N = V.N;
  const int r = eta.block_count();
  const auto group_sizes = eta.block_sizes();
  long long denom = 1;
  for (int t = 0; t < n; ++t) denom *= N - t;
  Rat factor(1, 1LL << n);  // 2^{-sum k} = 2^{-n}

  Rat sum(0, 1);
  // Genes are (c, i) with c in {0,1}; encode as 2*(i-1)+c.
  std::vector<int> gene(r, 0);
  std::vector<char> used(2 * N, 0);
  const auto rec = [&](auto&& self, int depth) -> void {
    if (depth == r) {
      // Combine falling-factorial orders per parent: the first slot with a
      // given parent carries the summed order, later slots carry zero.
      std::vector<std::pair<int, int>> pk;
      for (int l = 0; l < r; ++l) {
        const int parent = gene[l] / 2 + 1;
        bool first = true;
        for (int s = 0; s < l; ++s)
          if (gene[s] / 2 + 1 == parent) first = false;
        if (!first) continue;
        int combined = 0;
        for (int s = 0; s < r; ++s)
          if (gene[s] / 2 + 1 == parent) combined += group_sizes[s];
        pk.emplace_back(parent, combined);
      }
      sum = sum + expected_falling_product(V, pk);
      return;
    }
    for (int g = 0; g < 2 * N; ++g) {
      if (used[g]) continue;
      used[g] = 1;
      gene[depth] = g;
      self(self, depth + 1);
      used[g] = 0;
    }
  };
  rec(rec, 0);
  return factor * Rat(1, denom) * sum;
}

// ---------------------------------------------------------------------------
// Shared helpers.
// ---------------------------------------------------------------------------

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

double exp1_cdf(double x) { return x <= 0 ? 0.0 : -std::expm1(-x); }

std::string fmt(double v, int prec = 5) {
  std::ostringstream ss;
  ss.precision(prec);
  ss << v;
  return ss.str();
}

constexpr std::uint64_t kSeedBase = 0x5eed0000u;

// ---------------------------------------------------------------------------
// Criterion 1: Wright-Fisher c_N closed form vs Monte Carlo.
// ---------------------------------------------------------------------------

CriterionResult criterion1(int threads) {
  CriterionResult res{1, "wright-fisher c_N closed form vs MC", true, 0, ""};
  Timer timer;
  std::ostringstream detail;
  for (const int N : {50, 100, 500}) {
    const std::uint64_t reps = 1000000;
    const int chunks = 16;
    std::vector<RunningStat> parts(chunks);
    parallel_for(chunks, threads, [&](std::uint64_t c) {
      RngStream rng(kSeedBase + 1, "wf-cn", N, c);
      const CanningsModel model = WrightFisher{N};
      std::vector<std::uint32_t> totals;
      for (std::uint64_t rep = 0; rep < reps / chunks; ++rep) {
        sample_totals(model, rng, totals);
        double x = 0.0;
        for (auto v : totals) x += static_cast<double>(v) * (v - 1.0);
        parts[c].add(x / N);
      }
    });
    RunningStat stat;
    for (const auto& p : parts) stat.merge(p);
    const double scale = 1.0 / (8.0 * (N - 1.0));
    const double est = stat.mean() * scale;
    const double se = stat.stderror() * scale;
    const double closed = 1.0 / (2.0 * N);
    const double dev = std::fabs(est - closed);
    detail << "N=" << N << " est=" << fmt(est, 6) << " closed=" << fmt(closed, 6)
           << " dev/se=" << fmt(se > 0 ? dev / se : 0.0, 3) << "; ";
    if (dev > 3.0 * se) res.passed = false;
  }
  res.seconds = timer.elapsed();
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// Criterion 2: paintbox kernel normalization, sampling agreement, pair mass.
// ---------------------------------------------------------------------------

CriterionResult criterion2(int threads) {
  CriterionResult res{2, "paintbox kernel: normalization, sampler, pair mass", true, 0, ""};
  Timer timer;
  std::ostringstream detail;
  RngStream rng(kSeedBase + 2, "paintboxes");

  std::vector<Paintbox> boxes;
  for (int i = 0; i < 100; ++i) {
    const int k = 1 + static_cast<int>(rng.next_below(8));
    std::vector<double> w(k);
    double sum = 0.0;
    for (auto& x : w) {
      x = rng.next_unit_pos();
      sum += x;
    }
    const double target = (i % 5 == 0) ? 1.0 : 0.2 + 0.8 * rng.next_unit();
    for (auto& x : w) x = x * target / sum;
    boxes.emplace_back(std::move(w));
  }

  // (a) exhaustive normalization over all states with n <= 6.
  std::vector<std::vector<Partition>> states(7);
  for (int n = 1; n <= 6; ++n) states[n] = all_partitions(n);
  double worst = 0.0;
  for (const auto& y : boxes) {
    for (int n = 1; n <= 6; ++n) {
      for (const auto& xi : states[n]) {
        double total = 0.0;
        for (const auto& eta : all_coarsenings(xi)) total += paintbox_prob(y, xi, eta);
        worst = std::max(worst, std::fabs(total - 1.0));
      }
    }
  }
  detail << "norm dev=" << fmt(worst, 3) << "; ";
  if (worst > 1e-10) res.passed = false;

  // (b) sampler frequencies vs exact kernel, 1e6 draws per case, 4 SE.
  struct Case {
    Paintbox y;
    int b;
  };
  const std::vector<Case> cases = {
      {Paintbox({0.25, 0.25}), 2},          {Paintbox({0.25, 0.25}), 3},
      {Paintbox({0.25, 0.25}), 4},          {Paintbox({0.5, 0.2}), 4},
      {Paintbox({0.3, 0.3, 0.2, 0.1}), 5},
  };
  double worst_z = 0.0;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& cs = cases[ci];
    const std::uint64_t draws = 1000000;
    const auto alphas = all_partitions(cs.b);
    std::map<Partition, std::uint64_t> index;
    for (std::size_t a = 0; a < alphas.size(); ++a) index[alphas[a]] = a;
    const int chunks = 16;
    std::vector<std::vector<std::uint64_t>> counts(chunks,
                                                   std::vector<std::uint64_t>(alphas.size(), 0));
    parallel_for(chunks, threads, [&](std::uint64_t c) {
      RngStream r2(kSeedBase + 2, "merge", ci, c);
      for (std::uint64_t d = 0; d < draws / chunks; ++d)
        ++counts[c][index.at(sample_merger(cs.y, cs.b, r2))];
    });
    const Partition start = Partition::singletons(cs.b);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      std::uint64_t obs = 0;
      for (int c = 0; c < chunks; ++c) obs += counts[c][a];
      const double p = paintbox_prob(cs.y, start, alphas[a]);
      const double expct = p * draws;
      if (expct < 5.0) continue;
      const double se = std::sqrt(draws * p * (1.0 - p));
      worst_z = std::max(worst_z, std::fabs(obs - expct) / se);
    }
  }
  detail << "sampler max|z|=" << fmt(worst_z, 3) << "; ";
  if (worst_z > 4.0) res.passed = false;

  // (c) pair-merge mass equals <y,y>.
  const Partition pair_xi = Partition::singletons(2);
  const Partition pair_eta = Partition::single_block(2);
  double worst_pair = 0.0;
  for (const auto& y : boxes)
    worst_pair = std::max(worst_pair,
                          std::fabs(paintbox_prob(y, pair_xi, pair_eta) - y.l2sq()));
  detail << "pair-mass dev=" << fmt(worst_pair, 3);
  if (worst_pair > 1e-12) res.passed = false;

  res.seconds = timer.elapsed();
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// Criterion 3: exact small-N transition oracle in rational arithmetic.
// ---------------------------------------------------------------------------

OffspringMatrix make_matrix(int N, std::vector<OffspringMatrix::Family> families) {
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

CriterionResult criterion3(int) {
  CriterionResult res{3, "small-N quenched transition oracle (exact rationals)", true, 0, ""};
  Timer timer;
  std::ostringstream detail;

  const std::vector<OffspringMatrix> matrices = {
      make_matrix(4, {{1, 2, 2}, {3, 4, 2}}),
      make_matrix(4, {{1, 2, 4}}),
      make_matrix(5, {{1, 2, 3}, {3, 4, 1}, {4, 5, 1}}),
      make_matrix(6, {{1, 2, 1}, {1, 3, 2}, {4, 5, 2}, {2, 6, 1}}),
      make_matrix(6, {{1, 4, 2}, {2, 3, 1}, {2, 5, 1}, {3, 6, 1}, {5, 6, 1}}),
  };

  int checks = 0;
  for (const auto& V : matrices) {
    for (int n = 2; n <= 3; ++n) {
      const auto law = exact_one_step_law(V, n);
      // Total mass must be exactly 1.
      Rat mass(0, 1);
      for (const auto& [state, p] : law) mass = mass + p;
      if (mass != Rat(1, 1)) {
        res.passed = false;
        detail << "law mass " << mass.str() << " != 1; ";
      }
      for (const auto& eta : all_partitions(n)) {
        // Dispersed-target formula.
        Rat lhs(0, 1);
        const auto it = law.find(GroupedPartition::dispersed(eta));
        if (it != law.end()) lhs = it->second;
        const Rat rhs = transition_formula_dispersed(V, eta, n);
        if (lhs != rhs) {
          res.passed = false;
          detail << "N=" << V.N << " n=" << n << " eta=" << eta.to_text() << " law="
                 << lhs.str() << " formula=" << rhs.str() << "; ";
        }
        // Aggregated formula over the complete-dispersion fiber.
        Rat fiber(0, 1);
        for (const auto& [state, p] : law)
          if (complete_dispersion(state) == eta) fiber = fiber + p;
        const Rat rhs_agg = transition_formula_aggregated(V, eta, n);
        if (fiber != rhs_agg) {
          res.passed = false;
          detail << "N=" << V.N << " n=" << n << " cd-fiber(" << eta.to_text() << ")="
                 << fiber.str() << " formula=" << rhs_agg.str() << "; ";
        }
        checks += 2;
      }
    }
  }
  if (res.passed) detail << checks << " exact identities hold";
  res.seconds = timer.elapsed();
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// Criterion 4: run_flow vs run_jump_hold equivalence (chi-square, 1e-3).
// ---------------------------------------------------------------------------

CriterionResult criterion4(int threads) {
  CriterionResult res{4, "flow vs jump-hold sampler equivalence", true, 0, ""};
  Timer timer;
  std::ostringstream detail;

  struct Scenario {
    PsiPath psi;
    double c;
    int n;
    double t_check;
  };
  std::vector<Scenario> scenarios;
  {
    PsiPath empty;
    empty.horizon = 2.0;
    scenarios.push_back({empty, 1.0, 4, 0.7});

    PsiPath one;
    one.horizon = 2.0;
    one.atoms.push_back({0.5, Paintbox({0.4, 0.2})});
    scenarios.push_back({one, 0.5, 4, 0.8});

    PsiPath three;
    three.horizon = 2.0;
    three.atoms.push_back({0.3, Paintbox::repeated(0.25, 4)});
    three.atoms.push_back({0.6, Paintbox({0.5})});
    three.atoms.push_back({0.9, Paintbox({0.3, 0.3})});
    scenarios.push_back({three, 0.2, 4, 1.0});

    RngStream pathrng(kSeedBase + 4, "fixed-path");
    PointMassIntensity pm;
    pm.rate = 4.0 / 3.0;
    pm.x = Paintbox::repeated(0.25, 4);
    pm.c_pair = 2.0 / 3.0;
    scenarios.push_back({sample_psi(pm, 2.0, pathrng), pm.c_pair, 3, 1.5});

    PsiPath small;
    small.horizon = 1.0;
    small.atoms.push_back({0.2, Paintbox({0.1, 0.1})});
    small.atoms.push_back({0.4, Paintbox({0.15})});
    small.atoms.push_back({0.5, Paintbox({0.2, 0.05})});
    scenarios.push_back({small, 1.0, 2, 0.6});
  }

  for (std::size_t si = 0; si < scenarios.size(); ++si) {
    const auto& sc = scenarios[si];
    const std::uint64_t runs = 100000;
    const auto state_space = all_partitions(sc.n);
    std::map<Partition, std::size_t> index;
    for (std::size_t i = 0; i < state_space.size(); ++i) index[state_space[i]] = i;
    const int chunks = 16;
    std::vector<std::vector<double>> counts_a(chunks,
                                              std::vector<double>(state_space.size(), 0.0));
    std::vector<std::vector<double>> counts_b(chunks,
                                              std::vector<double>(state_space.size(), 0.0));
    const Partition xi0 = Partition::singletons(sc.n);
    parallel_for(chunks, threads, [&](std::uint64_t c) {
      RngStream ra(kSeedBase + 4, "flow", si, c);
      RngStream rb(kSeedBase + 4, "jump", si, c);
      for (std::uint64_t rep = 0; rep < runs / chunks; ++rep) {
        const auto a = run_flow(sc.psi, sc.c, xi0, sc.psi.horizon, ra);
        const auto b = run_jump_hold(sc.psi, sc.c, xi0, sc.psi.horizon, rb);
        ++counts_a[c][index.at(a.state_at(sc.t_check))];
        ++counts_b[c][index.at(b.state_at(sc.t_check))];
      }
    });
    std::vector<double> ca(state_space.size(), 0.0), cb(state_space.size(), 0.0);
    for (int c = 0; c < chunks; ++c)
      for (std::size_t i = 0; i < state_space.size(); ++i) {
        ca[i] += counts_a[c][i];
        cb[i] += counts_b[c][i];
      }
    const auto test = chi_square_two_sample(ca, cb);
    detail << "s" << si + 1 << " p=" << fmt(test.p_value, 3) << "; ";
    if (test.p_value < 1e-3) res.passed = false;
  }
  res.seconds = timer.elapsed();
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// Criterion 5: occasional-large-family rate identities and pair MRCA mean.
// ---------------------------------------------------------------------------

CriterionResult criterion5(int threads) {
  CriterionResult res{5, "large-family couple rate identities, pair MRCA mean 1", true, 0,
                      ""};
  Timer timer;
  std::ostringstream detail;
  for (const double psi : {0.5, 1.0}) {
    const CanningsModel model = LargeFamilyCouple{1000, psi, 1.0};
    const auto pm = model_point_mass_intensity(model);
    if (!pm) {
      res.passed = false;
      detail << "no closed-form intensity; ";
      continue;
    }
    const double rate_expected = 4.0 / (psi * psi + 2.0);
    const double cpair_expected = 2.0 / (psi * psi + 2.0);
    if (std::fabs(pm->rate - rate_expected) > 1e-12 ||
        std::fabs(pm->c_pair - cpair_expected) > 1e-12 ||
        std::fabs(model_c_pair(model).value_or(-1.0) - cpair_expected) > 1e-12) {
      res.passed = false;
      detail << "psi=" << psi << " rate/c_pair mismatch; ";
    }
    const std::uint64_t runs = 100000;
    const int chunks = 16;
    std::vector<RunningStat> parts(chunks);
    const Partition xi0 = Partition::singletons(2);
    parallel_for(chunks, threads, [&](std::uint64_t c) {
      const XiIntensity intensity = *pm;
      for (std::uint64_t rep = 0; rep < runs / chunks; ++rep) {
        IntensityAtomStream atoms(intensity,
                                  RngStream(kSeedBase + 5, "atoms", c * 100000 + rep,
                                            static_cast<std::uint64_t>(psi * 2)));
        RngStream rng(kSeedBase + 5, "run", c * 100000 + rep,
                      static_cast<std::uint64_t>(psi * 2));
        const auto run = run_flow(atoms, pm->c_pair, xi0, 60.0, rng);
        if (!run.censored) parts[c].add(run.mrca_time());
      }
    });
    RunningStat stat;
    for (const auto& p : parts) stat.merge(p);
    const double dev = std::fabs(stat.mean() - 1.0);
    detail << "psi=" << psi << " mean=" << fmt(stat.mean(), 5)
           << " dev/se=" << fmt(dev / stat.stderror(), 3) << "; ";
    if (dev > 3.0 * stat.stderror()) res.passed = false;
  }
  res.seconds = timer.elapsed();
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// Criterion 6: quenched Wright-Fisher Kingman fallback.
// ---------------------------------------------------------------------------

CriterionResult criterion6(int threads) {
  CriterionResult res{6, "quenched WF: Exp(1) pair times and 1/i spectrum", true, 0, ""};
  Timer timer;
  std::ostringstream detail;
  const int N = 500, n = 10;
  const std::uint64_t pedigrees = 200, loci = 50;
  const double c_N = 1.0 / (2.0 * N);
  const std::uint64_t horizon = static_cast<std::uint64_t>(30.0 / c_N);

  std::vector<std::vector<double>> pair_times(pedigrees);
  std::vector<SfsAccumulator> accums(pedigrees, SfsAccumulator(n));
  std::uint64_t censored = 0;
  parallel_for(pedigrees, threads, [&](std::uint64_t p) {
    const Pedigree ped(WrightFisher{N}, RngStream(kSeedBase + 6, "ped", p).next_u64());
    const auto xi0 = GroupedPartition::dispersed(Partition::singletons(n));
    const auto trees = run_loci_shared_pedigree(
        ped, xi0, loci, RngStream(kSeedBase + 6, "loci", p).next_u64(), horizon);
    for (const auto& tree : trees) {
      if (tree.censored) continue;
      accums[p].add(branch_spectrum(tree, c_N));
      for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
          pair_times[p].push_back(static_cast<double>(pair_coalescence_generation(tree, a, b)) *
                                  c_N);
    }
  });
  std::vector<double> pooled_times;
  SfsAccumulator pooled(n);
  for (std::uint64_t p = 0; p < pedigrees; ++p) {
    pooled_times.insert(pooled_times.end(), pair_times[p].begin(), pair_times[p].end());
    censored += accums[p].censored();
    pooled.merge(accums[p]);
  }
  const double ks = ks_vs_cdf(pooled_times, exp1_cdf);
  detail << "KS=" << fmt(ks, 4) << " (limit 0.02), censored=" << censored << "; ";
  if (ks > 0.02) res.passed = false;

  const auto sfs = pooled.sfs();
  double h = 0.0;
  for (int i = 1; i < n; ++i) h += 1.0 / i;
  double worst_rel = 0.0;
  for (int i = 1; i <= 5; ++i) {
    const double oracle = (1.0 / i) / h;
    worst_rel = std::max(worst_rel, std::fabs(sfs[i - 1] - oracle) / oracle);
  }
  detail << "sfs max rel dev (i<=5)=" << fmt(worst_rel, 4) << " (limit 0.05)";
  if (worst_rel > 0.05) res.passed = false;

  res.seconds = timer.elapsed();
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// Criterion 7: epsilon-naive coalescent vs limit flow on the empirical path.
// ---------------------------------------------------------------------------

CriterionResult criterion7(int threads) {
  CriterionResult res{7, "prelimit naive vs empirical-path flow (pair MRCA KS)", true, 0,
                      ""};
  Timer timer;
  std::ostringstream detail;
  const int N = 2000;
  const CanningsModel model = LargeFamilyCouple{N, 1.0, 1.0};
  const double c_pair = model_c_pair(model).value();

  // One fixed pedigree; c_N estimated once by Monte Carlo.
  RngStream cn_rng(kSeedBase + 7, "cn");
  const auto cn = pair_coalescence_prob(model, 150000, cn_rng);
  const double c_N = cn.value;
  const double T = 25.0;
  const auto horizon_gens = static_cast<std::uint64_t>(T / c_N);
  const Pedigree ped(model, RngStream(kSeedBase + 7, "ped").next_u64());
  const auto summary = build_psi_summary(ped, 0.1, c_N, horizon_gens);
  const auto psi = empirical_psi_path(summary);
  detail << "c_N=" << fmt(c_N, 4) << " (se " << fmt(cn.stderr_, 2) << "), atoms="
         << psi.atoms.size() << "; ";

  const std::uint64_t runs = 10000;
  const Partition xi0 = Partition::singletons(2);
  std::vector<double> naive_times(runs, -1.0), flow_times(runs, -1.0);
  parallel_for(runs, threads, [&](std::uint64_t rep) {
    RngStream rn(kSeedBase + 7, "naive", rep);
    const auto a = run_naive(summary, c_pair, xi0, rn);
    if (!a.censored) naive_times[rep] = a.mrca_time();
    RngStream rf(kSeedBase + 7, "flow", rep);
    const auto b = run_flow(psi, c_pair, xi0, psi.horizon, rf);
    if (!b.censored) flow_times[rep] = b.mrca_time();
  });
  std::vector<double> a, b;
  for (double t : naive_times)
    if (t >= 0) a.push_back(t);
  for (double t : flow_times)
    if (t >= 0) b.push_back(t);
  const double ks = ks_two_sample(a, b);
  const double crit = ks_two_sample_critical(a.size(), b.size(), 1e-3);
  detail << "KS=" << fmt(ks, 4) << " critical=" << fmt(crit, 4) << " (n=" << a.size() << ","
         << b.size() << ")";
  if (ks >= crit) res.passed = false;
  res.seconds = timer.elapsed();
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// Criterion 8: variance decomposition at desk scale.
// ---------------------------------------------------------------------------

CriterionResult criterion8(int) {
  CriterionResult res{8, "variance decomposition: psi=1 fractions and psi-monotonicity",
                      true, 0, ""};
  Timer timer;
  std::ostringstream detail;
  const int n = 100;
  const double lambda = 1e6;

  const auto main_vd = variance_decomposition(1.0, lambda, n, 500, 2000, 2000,
                                              kSeedBase + 8);
  detail << "psi=1 frac_within=" << fmt(main_vd.frac_within, 3) << "+-"
         << fmt(main_vd.frac_within_se, 2) << " frac_between=" << fmt(main_vd.frac_between, 3)
         << " total(direct)=" << fmt(main_vd.total_direct, 4) << " total(panel)="
         << fmt(main_vd.total_panel, 4) << "; ";
  if (!(main_vd.frac_between >= 0.90 && main_vd.frac_between <= 0.98)) res.passed = false;
  if (!(main_vd.frac_within >= 0.03 && main_vd.frac_within <= 0.07)) res.passed = false;

  const std::vector<double> grid = {0.1, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> fracs, ses;
  for (const double psi : grid) {
    const auto vd = variance_decomposition(psi, lambda, n, 300, 600, 0, kSeedBase + 80);
    fracs.push_back(vd.frac_between);
    ses.push_back(vd.frac_within_se);
    detail << "f(" << psi << ")=" << fmt(vd.frac_between, 3) << " ";
  }
  for (std::size_t i = 1; i < fracs.size(); ++i) {
    const double slack = 3.0 * (ses[i] + ses[i - 1]);
    if (fracs[i] < fracs[i - 1] - slack) {
      res.passed = false;
      detail << "non-monotone at psi=" << grid[i] << "; ";
    }
  }
  res.seconds = timer.elapsed();
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// Criterion 9: SFS pedigree-dispersion contrast.
// ---------------------------------------------------------------------------

CriterionResult criterion9(int threads) {
  CriterionResult res{9, "SFS: pedigree dispersion psi=0.9 vs 0.1, lambda=1 uniformity",
                      true, 0, ""};
  Timer timer;
  std::ostringstream detail;
  const int n = 100;
  const std::uint64_t pedigrees = 5, loci = 100000;

  const auto pedigree_sfs = [&](double psi, double lambda, std::uint64_t tag)
      -> std::vector<std::vector<double>> {
    std::vector<std::vector<double>> out(pedigrees);
    std::vector<SfsAccumulator> acc(pedigrees, SfsAccumulator(n));
    parallel_for(pedigrees, threads, [&](std::uint64_t p) {
      DeltaPedigree ped(lambda, RngStream(kSeedBase + 9, "ped", tag, p).next_u64());
      for (std::uint64_t l = 0; l < loci; ++l) {
        RngStream rng(kSeedBase + 9, "locus", tag * 10 + p, l);
        acc[p].add(delta_model_spectrum(ped, psi, n, rng));
      }
    });
    for (std::uint64_t p = 0; p < pedigrees; ++p) out[p] = acc[p].sfs();
    return out;
  };
  const auto max_pairwise_tv = [](const std::vector<std::vector<double>>& sfs) {
    double worst = 0.0;
    for (std::size_t a = 0; a < sfs.size(); ++a)
      for (std::size_t b = a + 1; b < sfs.size(); ++b)
        worst = std::max(worst, total_variation(sfs[a], sfs[b]));
    return worst;
  };

  const auto hi = pedigree_sfs(0.9, 1e6, 1);
  const auto lo = pedigree_sfs(0.1, 1e6, 2);
  const double disp_hi = max_pairwise_tv(hi);
  const double disp_lo = max_pairwise_tv(lo);
  detail << "disp(0.9)=" << fmt(disp_hi, 4) << " disp(0.1)=" << fmt(disp_lo, 4)
         << " ratio=" << fmt(disp_lo > 0 ? disp_hi / disp_lo : 1e9, 3) << "; ";
  if (!(disp_hi >= 3.0 * disp_lo)) res.passed = false;

  const auto flat = pedigree_sfs(0.1, 1.0, 3);
  std::vector<double> pooled(n - 1, 0.0);
  for (const auto& s : flat)
    for (int i = 0; i < n - 1; ++i) pooled[i] += s[i] / pedigrees;
  double worst_tv = 0.0;
  for (const auto& s : flat) worst_tv = std::max(worst_tv, total_variation(s, pooled));
  detail << "lambda=1 max TV from pooled=" << fmt(worst_tv, 4) << " (limit 0.03)";
  if (worst_tv > 0.03) res.passed = false;

  res.seconds = timer.elapsed();
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// Criterion 10: Beta-truncation stability with compensating pair rates.
// ---------------------------------------------------------------------------

CriterionResult criterion10(int threads) {
  CriterionResult res{10, "truncated-Beta stability across cutoffs", true, 0, ""};
  Timer timer;
  std::ostringstream detail;
  const double eps_default = 0.02;
  const std::uint64_t runs = 100000;
  const Partition xi0 = Partition::singletons(2);

  std::vector<std::vector<double>> samples(2);
  for (int variant = 0; variant < 2; ++variant) {
    const TruncatedBetaIntensity intensity{2, 1.5, variant == 0 ? eps_default
                                                                : eps_default / 2.0};
    const auto info = describe_intensity(intensity);
    detail << "eps=" << fmt(intensity.eps, 3) << " atoms/t=" << fmt(info.atom_rate, 4)
           << " comp=" << fmt(info.compensating_rate, 4) << "; ";
    std::vector<double> times(runs, -1.0);
    parallel_for(runs, threads, [&](std::uint64_t rep) {
      IntensityAtomStream atoms(XiIntensity(intensity),
                                RngStream(kSeedBase + 10, "atoms", variant, rep));
      RngStream rng(kSeedBase + 10, "run", variant, rep);
      const auto run = run_flow(atoms, info.compensating_rate, xi0, 30.0, rng);
      if (!run.censored) times[rep] = run.mrca_time();
    });
    for (double t : times)
      if (t >= 0) samples[variant].push_back(t);
  }
  const double ks = ks_two_sample(samples[0], samples[1]);
  detail << "KS=" << fmt(ks, 4) << " (limit 0.01)";
  if (ks > 0.01) res.passed = false;
  res.seconds = timer.elapsed();
  res.detail = detail.str();
  return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& log, int threads, int only) {
  using Fn = CriterionResult (*)(int);
  const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                         criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<CriterionResult> results;
  for (int i = 0; i < 10; ++i) {
    if (only != 0 && only != i + 1) continue;
    auto r = criteria[i](threads);
    log << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": "
        << r.detail << " (" << fmt(r.seconds, 3) << " s)" << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace pedcoal
