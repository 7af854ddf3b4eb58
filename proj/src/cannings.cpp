#include "pedcoal/cannings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/zeta.hpp>

namespace pedcoal {

namespace {

struct Validator {
  void operator()(const WrightFisher& m) const {
    if (m.N < 2) throw std::invalid_argument("WrightFisher: N must be >= 2");
  }
  void operator()(const RandomFitness& m) const {
    if (m.N < 2) throw std::invalid_argument("RandomFitness: N must be >= 2");
    if (m.law == RandomFitness::Law::ParetoTail &&
        (m.alpha <= 1.0 || m.alpha >= 2.0 || m.c_w <= 0.0))
      throw std::invalid_argument("RandomFitness: need alpha in (1,2), c_w > 0");
  }
  void operator()(const GWCouples& m) const {
    if (m.N < 2) throw std::invalid_argument("GWCouples: N must be >= 2");
    if (m.c <= 0.0) throw std::invalid_argument("GWCouples: c must be > 0");
    double mean_x = 0.0;
    if (m.law == GWCouples::Law::PoissonPositive) {
      if (m.mu <= 0.0) throw std::invalid_argument("GWCouples: mu must be > 0");
      mean_x = m.mu / (1.0 - std::exp(-m.mu));
    } else {
      if (m.alpha <= 1.0 || m.alpha >= 2.0)
        throw std::invalid_argument("GWCouples: need alpha in (1,2)");
      mean_x = 1.0 + boost::math::zeta(m.alpha);
    }
    if (mean_x <= 2.0 / m.c)
      throw std::invalid_argument("GWCouples: mean potential offspring must exceed 2/c");
  }
  void operator()(const LargeFamilyCouple& m) const {
    if (m.N < 4) throw std::invalid_argument("LargeFamilyCouple: N must be >= 4");
    if (m.psi <= 0.0 || m.psi > 1.0)
      throw std::invalid_argument("LargeFamilyCouple: psi must be in (0,1]");
    if (m.gamma <= 0.0) throw std::invalid_argument("LargeFamilyCouple: gamma must be > 0");
  }
  void operator()(const LargeFamilyIndividual& m) const {
    if (m.N < 4) throw std::invalid_argument("LargeFamilyIndividual: N must be >= 4");
    if (m.psi <= 0.0 || m.psi > 1.0)
      throw std::invalid_argument("LargeFamilyIndividual: psi must be in (0,1]");
    if (m.gamma <= 0.0)
      throw std::invalid_argument("LargeFamilyIndividual: gamma must be > 0");
  }
  void operator()(const TwoSex& m) const {
    if (m.N < 2) throw std::invalid_argument("TwoSex: N must be >= 2");
    if (m.r <= 0.0 || m.r >= 1.0) throw std::invalid_argument("TwoSex: r must be in (0,1)");
    const int n1 = static_cast<int>(std::floor(m.r * m.N));
    if (n1 < 1 || m.N - n1 < 1)
      throw std::invalid_argument("TwoSex: both sexes need at least one member");
    if (m.lambda < 0.0 || m.lambda > m.N)
      throw std::invalid_argument("TwoSex: lambda must be in [0, N]");
    if (m.lambda > 0.0 && (m.beta <= 0.0 || m.beta > 1.0))
      throw std::invalid_argument("TwoSex: beta must be in (0,1]");
  }
};

// Uniform ordered pair of distinct elements of {1..N}.
inline std::pair<std::uint32_t, std::uint32_t> uniform_distinct_pair(int N, RngStream& rng) {
  const std::uint32_t a = 1 + static_cast<std::uint32_t>(rng.next_below(N));
  std::uint32_t b = 1 + static_cast<std::uint32_t>(rng.next_below(N - 1));
  if (b >= a) ++b;
  return {a, b};
}

inline std::pair<std::uint32_t, std::uint32_t> unordered(std::uint32_t a, std::uint32_t b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// Uniform element of {1..N} \ {excl...}, exclusions sorted ascending.
inline std::uint32_t uniform_excluding(int N, std::initializer_list<std::uint32_t> excl,
                                       RngStream& rng) {
  std::uint32_t v = 1 + static_cast<std::uint32_t>(rng.next_below(N - excl.size()));
  for (std::uint32_t e : excl)
    if (v >= e) ++v;
  return v;
}

// Wright-Fisher pairs over the subset {1..N} minus sorted exclusions.
inline std::pair<std::uint32_t, std::uint32_t> wf_pair_excluding(
    int N, std::initializer_list<std::uint32_t> excl, RngStream& rng) {
  const int M = N - static_cast<int>(excl.size());
  std::uint32_t a = 1 + static_cast<std::uint32_t>(rng.next_below(M));
  std::uint32_t b = 1 + static_cast<std::uint32_t>(rng.next_below(M - 1));
  if (b >= a) ++b;
  for (std::uint32_t e : excl) {
    if (a >= e) ++a;
    if (b >= e) ++b;
  }
  return unordered(a, b);
}

// Hypergeometric(ngood, nbad, ndraws) by inverse-CDF walk on the pmf
// recurrence; exact and fast when the mean is small.
std::uint64_t hypergeometric(std::uint64_t ngood, std::uint64_t nbad, std::uint64_t ndraws,
                             RngStream& rng) {
  if (ndraws == 0 || ngood == 0) return 0;
  if (ndraws >= ngood + nbad) return ngood;
  const auto lchoose = [](double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  };
  const std::uint64_t kmin = (ndraws > nbad) ? ndraws - nbad : 0;
  double logp = lchoose(static_cast<double>(ngood), static_cast<double>(kmin)) +
                lchoose(static_cast<double>(nbad), static_cast<double>(ndraws - kmin)) -
                lchoose(static_cast<double>(ngood + nbad), static_cast<double>(ndraws));
  double p = std::exp(logp);
  double u = rng.next_unit();
  std::uint64_t k = kmin;
  const std::uint64_t kmax = std::min(ngood, ndraws);
  while (u > p && k < kmax) {
    u -= p;
    // pmf ratio P(k+1)/P(k)
    const double num = static_cast<double>(ngood - k) * static_cast<double>(ndraws - k);
    const double den = static_cast<double>(k + 1) *
                       static_cast<double>(nbad - ndraws + k + 1);
    p *= num / den;
    ++k;
  }
  return k;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_wright_fisher(int N,
                                                                          RngStream& rng) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(N);
  for (int k = 0; k < N; ++k) {
    auto [a, b] = uniform_distinct_pair(N, rng);
    pairs.push_back(unordered(a, b));
  }
  return pairs;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_random_fitness(
    const RandomFitness& m, RngStream& rng, SampleDiagnostics* diag) {
  const int N = m.N;
  std::vector<double> cum(N);
  for (;;) {
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
      double w;
      if (m.law == RandomFitness::Law::FiniteVariance) {
        w = -std::log(rng.next_unit_pos());  // Exponential(1)
      } else {
        // P(W >= z) = c_w z^-alpha for z >= c_w^{1/alpha}
        const double scale = std::pow(m.c_w, 1.0 / m.alpha);
        w = scale * std::pow(rng.next_unit_pos(), -1.0 / m.alpha);
      }
      acc += w;
      cum[i] = acc;
    }
    // Z_N > 0 requires at least two individuals with positive fitness; with
    // the laws above this holds a.s. but the guard keeps the contract.
    if (!(acc > 0.0) || cum[0] == acc) {
      if (diag) ++diag->fitness_redraws;
      continue;
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(N);
    const auto draw = [&]() -> std::uint32_t {
      const double u = rng.next_unit() * acc;
      return 1 + static_cast<std::uint32_t>(
                     std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    };
    for (int k = 0; k < N; ++k) {
      std::uint32_t a = draw(), b = draw();
      while (b == a) b = draw();
      pairs.push_back(unordered(a, b));
    }
    return pairs;
  }
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_gw_couples(
    const GWCouples& m, RngStream& rng, SampleDiagnostics* diag) {
  const int N = m.N;
  const double p_active = std::min(1.0, m.c / N);
  for (;;) {
    // Active couples and their potential offspring counts.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> couples;
    std::vector<std::uint64_t> potential;
    std::uint64_t total = 0;
    for (std::uint32_t i = 1; i <= static_cast<std::uint32_t>(N); ++i) {
      for (std::uint32_t j = i + 1; j <= static_cast<std::uint32_t>(N); ++j) {
        if (rng.next_unit() >= p_active) continue;
        std::uint64_t x;
        if (m.law == GWCouples::Law::PoissonPositive) {
          do {
            x = rng.poisson(m.mu);
          } while (x == 0);
        } else {
          x = static_cast<std::uint64_t>(
              std::ceil(std::pow(rng.next_unit_pos(), -1.0 / m.alpha)));
        }
        couples.emplace_back(i, j);
        potential.push_back(x);
        total += x;
      }
    }
    if (total < static_cast<std::uint64_t>(N)) {
      if (diag) ++diag->gw_rejections;
      continue;  // condition of the model: redraw the whole generation
    }
    // Sample N children without replacement across families.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(N);
    std::uint64_t pool = total;
    std::uint64_t need = N;
    for (std::size_t f = 0; f < couples.size() && need > 0; ++f) {
      const std::uint64_t take = hypergeometric(potential[f], pool - potential[f], need, rng);
      for (std::uint64_t t = 0; t < take; ++t) pairs.push_back(couples[f]);
      pool -= potential[f];
      need -= take;
    }
    return pairs;
  }
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_large_family_couple(
    const LargeFamilyCouple& m, RngStream& rng) {
  const int N = m.N;
  const bool large = rng.next_unit() < std::pow(N, -m.gamma);
  const std::uint64_t family = large ? static_cast<std::uint64_t>(std::floor(m.psi * N)) : 1;
  auto [i1, i2] = uniform_distinct_pair(N, rng);
  const auto couple = unordered(i1, i2);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(N);
  for (std::uint64_t k = 0; k < family; ++k) pairs.push_back(couple);
  for (std::uint64_t k = family; k < static_cast<std::uint64_t>(N); ++k)
    pairs.push_back(wf_pair_excluding(N, {couple.first, couple.second}, rng));
  return pairs;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_large_family_individual(
    const LargeFamilyIndividual& m, RngStream& rng) {
  const int N = m.N;
  const bool large = rng.next_unit() < std::pow(N, -m.gamma);
  const std::uint64_t family = large ? static_cast<std::uint64_t>(std::floor(m.psi * N)) : 1;
  const std::uint32_t star = 1 + static_cast<std::uint32_t>(rng.next_below(N));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(N);
  for (std::uint64_t k = 0; k < family; ++k)
    pairs.push_back(unordered(star, uniform_excluding(N, {star}, rng)));
  for (std::uint64_t k = family; k < static_cast<std::uint64_t>(N); ++k)
    pairs.push_back(wf_pair_excluding(N, {star}, rng));
  return pairs;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_two_sex(const TwoSex& m,
                                                                    RngStream& rng) {
  const int N = m.N;
  const int n1 = static_cast<int>(std::floor(m.r * N));
  // Uniform subset of size n1 for sex 1 via partial Fisher-Yates.
  std::vector<std::uint32_t> ids(N);
  for (int i = 0; i < N; ++i) ids[i] = i + 1;
  for (int i = 0; i < n1; ++i) {
    const auto j = i + static_cast<int>(rng.next_below(N - i));
    std::swap(ids[i], ids[j]);
  }
  std::vector<std::uint32_t> sex1(ids.begin(), ids.begin() + n1);
  std::vector<std::uint32_t> sex2(ids.begin() + n1, ids.end());
  std::sort(sex1.begin(), sex1.end());
  std::sort(sex2.begin(), sex2.end());

  const bool star_gen = m.lambda > 0.0 && rng.next_unit() < m.lambda / N;
  const std::uint64_t star_family =
      star_gen ? static_cast<std::uint64_t>(std::floor(m.beta * N)) : 0;
  const std::uint32_t star =
      star_gen ? sex1[rng.next_below(sex1.size())] : 0;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(N);
  for (std::uint64_t k = 0; k < star_family; ++k)
    pairs.push_back(unordered(star, sex2[rng.next_below(sex2.size())]));
  for (std::uint64_t k = star_family; k < static_cast<std::uint64_t>(N); ++k)
    pairs.push_back(unordered(sex1[rng.next_below(sex1.size())],
                              sex2[rng.next_below(sex2.size())]));
  return pairs;
}

}  // namespace

int model_population_size(const CanningsModel& model) {
  return std::visit([](const auto& m) { return m.N; }, model);
}

std::string model_name(const CanningsModel& model) {
  struct Namer {
    std::string operator()(const WrightFisher&) const { return "wright-fisher"; }
    std::string operator()(const RandomFitness& m) const {
      return m.law == RandomFitness::Law::FiniteVariance ? "random-fitness"
                                                         : "random-fitness-pareto";
    }
    std::string operator()(const GWCouples&) const { return "gw-couples"; }
    std::string operator()(const LargeFamilyCouple&) const { return "large-family-couple"; }
    std::string operator()(const LargeFamilyIndividual&) const {
      return "large-family-individual";
    }
    std::string operator()(const TwoSex&) const { return "two-sex"; }
  };
  return std::visit(Namer{}, model);
}

void validate_model(const CanningsModel& model) { std::visit(Validator{}, model); }

std::optional<double> model_c_pair(const CanningsModel& model) {
  struct CPair {
    std::optional<double> operator()(const WrightFisher&) const { return 1.0; }
    std::optional<double> operator()(const RandomFitness& m) const {
      return m.law == RandomFitness::Law::FiniteVariance ? std::optional<double>(1.0)
                                                         : std::optional<double>(0.0);
    }
    std::optional<double> operator()(const GWCouples& m) const {
      return m.law == GWCouples::Law::PoissonPositive ? std::optional<double>(1.0)
                                                      : std::optional<double>(0.0);
    }
    std::optional<double> operator()(const LargeFamilyCouple& m) const {
      if (m.gamma > 1.0) return 1.0;
      if (m.gamma < 1.0) return 0.0;
      return 2.0 / (m.psi * m.psi + 2.0);
    }
    std::optional<double> operator()(const LargeFamilyIndividual& m) const {
      if (m.gamma > 1.0) return 1.0;
      if (m.gamma < 1.0) return 0.0;
      return 4.0 / (m.psi * m.psi + 4.0);
    }
    std::optional<double> operator()(const TwoSex& m) const {
      if (m.lambda == 0.0) return 1.0;
      const double q = m.lambda * m.beta * m.beta * m.r * (1.0 - m.r);
      return 1.0 / (1.0 + q);
    }
  };
  return std::visit(CPair{}, model);
}

std::optional<double> model_c_N_closed_form(const CanningsModel& model) {
  if (const auto* wf = std::get_if<WrightFisher>(&model)) return 1.0 / (2.0 * wf->N);
  return std::nullopt;
}

std::uint32_t OffspringMatrix::entry(int i, int j) const {
  if (i == j) return 0;
  if (i > j) std::swap(i, j);
  const auto it = std::lower_bound(
      families.begin(), families.end(), std::make_pair(i, j), [](const Family& f, const auto& key) {
        return std::make_pair(static_cast<int>(f.i), static_cast<int>(f.j)) < key;
      });
  if (it != families.end() && static_cast<int>(it->i) == i && static_cast<int>(it->j) == j)
    return it->count;
  return 0;
}

void OffspringMatrix::validate() const {
  std::uint64_t child_sum = 0;
  for (const auto& f : families) {
    if (f.i >= f.j || f.j > static_cast<std::uint32_t>(N) || f.i < 1)
      throw std::logic_error("OffspringMatrix: bad family indices");
    child_sum += f.count;
  }
  if (child_sum != static_cast<std::uint64_t>(N))
    throw std::logic_error("OffspringMatrix: total children != N");
  std::uint64_t total_sum = 0;
  for (auto v : totals) total_sum += v;
  if (total_sum != 2ULL * static_cast<std::uint64_t>(N))
    throw std::logic_error("OffspringMatrix: total offspring != 2N");
}

std::uint64_t OffspringMatrix::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(N));
  for (const auto& f : families) {
    feed(f.i);
    feed(f.j);
    feed(f.count);
  }
  return h;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_child_pairs(
    const CanningsModel& model, RngStream& rng, SampleDiagnostics* diag) {
  struct Sampler {
    RngStream& rng;
    SampleDiagnostics* diag;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> operator()(const WrightFisher& m) {
      return sample_wright_fisher(m.N, rng);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> operator()(const RandomFitness& m) {
      return sample_random_fitness(m, rng, diag);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> operator()(const GWCouples& m) {
      return sample_gw_couples(m, rng, diag);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> operator()(
        const LargeFamilyCouple& m) {
      return sample_large_family_couple(m, rng);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> operator()(
        const LargeFamilyIndividual& m) {
      return sample_large_family_individual(m, rng);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> operator()(const TwoSex& m) {
      return sample_two_sex(m, rng);
    }
  };
  return std::visit(Sampler{rng, diag}, model);
}

OffspringMatrix sample_offspring_matrix(const CanningsModel& model, RngStream& rng,
                                        SampleDiagnostics* diag) {
  const int N = model_population_size(model);
  auto pairs = sample_child_pairs(model, rng, diag);
  std::sort(pairs.begin(), pairs.end());
  OffspringMatrix V;
  V.N = N;
  V.totals.assign(N, 0);
  for (std::size_t k = 0; k < pairs.size();) {
    std::size_t j = k;
    while (j < pairs.size() && pairs[j] == pairs[k]) ++j;
    V.families.push_back({pairs[k].first, pairs[k].second,
                          static_cast<std::uint32_t>(j - k)});
    V.totals[pairs[k].first - 1] += static_cast<std::uint32_t>(j - k);
    V.totals[pairs[k].second - 1] += static_cast<std::uint32_t>(j - k);
    k = j;
  }
  return V;
}

void sample_totals(const CanningsModel& model, RngStream& rng,
                   std::vector<std::uint32_t>& totals, SampleDiagnostics* diag) {
  const int N = model_population_size(model);
  totals.assign(N, 0);
  for (const auto& [a, b] : sample_child_pairs(model, rng, diag)) {
    ++totals[a - 1];
    ++totals[b - 1];
  }
}

OffspringMatrix two_sex_wrap(int N, double r,
                             const std::vector<std::vector<std::uint32_t>>& inner,
                             RngStream& rng) {
  const int n1 = static_cast<int>(std::floor(r * N));
  const int n2 = N - n1;
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("two_sex_wrap: bad r");
  if (static_cast<int>(inner.size()) != n1)
    throw std::invalid_argument("two_sex_wrap: inner row count != floor(rN)");
  std::uint64_t total = 0;
  for (const auto& row : inner) {
    if (static_cast<int>(row.size()) != n2)
      throw std::invalid_argument("two_sex_wrap: inner column count != N - floor(rN)");
    for (auto v : row) total += v;
  }
  if (total != static_cast<std::uint64_t>(N))
    throw std::invalid_argument("two_sex_wrap: inner totals must sum to N");

  std::vector<std::uint32_t> ids(N);
  for (int i = 0; i < N; ++i) ids[i] = i + 1;
  for (int i = 0; i < n1; ++i) {
    const auto j = i + static_cast<int>(rng.next_below(N - i));
    std::swap(ids[i], ids[j]);
  }
  std::vector<std::uint32_t> sex1(ids.begin(), ids.begin() + n1);
  std::vector<std::uint32_t> sex2(ids.begin() + n1, ids.end());
  std::sort(sex1.begin(), sex1.end());
  std::sort(sex2.begin(), sex2.end());

  OffspringMatrix V;
  V.N = N;
  V.totals.assign(N, 0);
  for (int k = 0; k < n1; ++k) {
    for (int l = 0; l < n2; ++l) {
      const auto count = inner[k][l];
      if (count == 0) continue;
      const auto pr = unordered(sex1[k], sex2[l]);
      V.families.push_back({pr.first, pr.second, count});
      V.totals[pr.first - 1] += count;
      V.totals[pr.second - 1] += count;
    }
  }
  std::sort(V.families.begin(), V.families.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.i, a.j) < std::make_pair(b.i, b.j);
  });
  return V;
}

PedigreeSlice realize_slice(const OffspringMatrix& V, RngStream& rng) {
  const int N = V.N;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> boxes;
  boxes.reserve(N);
  for (const auto& f : V.families)
    for (std::uint32_t c = 0; c < f.count; ++c) boxes.emplace_back(f.i, f.j);
  // Uniform matching of children to boxes.
  for (int i = N - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.next_below(i + 1));
    std::swap(boxes[i], boxes[j]);
  }
  PedigreeSlice s;
  s.N = N;
  s.p0.resize(N);
  s.p1.resize(N);
  for (int k = 0; k < N; ++k) {
    const bool flip = rng.next_coin();
    s.p0[k] = flip ? boxes[k].second : boxes[k].first;
    s.p1[k] = flip ? boxes[k].first : boxes[k].second;
  }
  s.source_digest = V.digest();
  return s;
}

OffspringMatrix Pedigree::matrix_at(std::uint64_t g) const {
  RngStream rng(seed_, "V", g);
  return sample_offspring_matrix(model_, rng);
}

PedigreeSlice Pedigree::slice_at(std::uint64_t g) const {
  const auto V = matrix_at(g);
  RngStream rng(seed_, "slice", g);
  return realize_slice(V, rng);
}

Paintbox generation_paintbox(int N, const std::vector<std::uint32_t>& totals) {
  std::vector<double> w;
  w.reserve(2 * totals.size());
  const double denom = 4.0 * N;
  for (auto v : totals) {
    if (v == 0) continue;
    w.push_back(v / denom);
    w.push_back(v / denom);
  }
  return Paintbox(std::move(w));
}

Paintbox generation_paintbox(const OffspringMatrix& V) {
  return generation_paintbox(V.N, V.totals);
}

EstimateWithError pair_coalescence_prob(const CanningsModel& model, std::uint64_t mc_reps,
                                        RngStream& rng) {
  if (mc_reps < 1) throw std::invalid_argument("pair_coalescence_prob: mc_reps >= 1");
  const int N = model_population_size(model);
  std::vector<std::uint32_t> totals;
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t rep = 0; rep < mc_reps; ++rep) {
    sample_totals(model, rng, totals);
    double x = 0.0;
    for (auto v : totals) x += static_cast<double>(v) * (static_cast<double>(v) - 1.0);
    x /= static_cast<double>(N);
    sum += x;
    sum_sq += x * x;
  }
  const double reps = static_cast<double>(mc_reps);
  const double mean = sum / reps;
  const double var = mc_reps > 1 ? std::max(0.0, (sum_sq - sum * sum / reps) / (reps - 1.0))
                                 : 0.0;
  const double scale = 1.0 / (8.0 * (N - 1.0));
  EstimateWithError e;
  e.value = mean * scale;
  e.stderr_ = std::sqrt(var / reps) * scale;
  e.closed_form = model_c_N_closed_form(model);
  return e;
}

}  // namespace pedcoal
