#include "pedcoal/limit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace pedcoal {

namespace {

double pair_count(int b) { return 0.5 * static_cast<double>(b) * (b - 1); }

// Decode a uniform index into the (i, j) pair, i < j < b, row-major over i.
std::pair<int, int> decode_pair(int b, std::uint64_t idx) {
  int i = 0;
  std::uint64_t row = static_cast<std::uint64_t>(b) - 1;
  while (idx >= row) {
    idx -= row;
    --row;
    ++i;
  }
  return {i, i + 1 + static_cast<int>(idx)};
}

struct BetaLaw {
  double alpha;
  double eps;
  int fold;
  double norm;       // 1 / B(2-alpha, alpha)
  double atom_rate;  // total intensity of atoms with z >= eps

  explicit BetaLaw(const TruncatedBetaIntensity& in)
      : alpha(in.alpha), eps(in.eps), fold(in.fold) {
    if (in.fold != 2 && in.fold != 4)
      throw std::invalid_argument("TruncatedBetaIntensity: fold must be 2 or 4");
    if (alpha <= 1.0 || alpha >= 2.0)
      throw std::invalid_argument("TruncatedBetaIntensity: alpha must be in (1,2)");
    if (eps <= 0.0 || eps >= 1.0)
      throw std::invalid_argument("TruncatedBetaIntensity: eps must be in (0,1)");
    norm = std::exp(std::lgamma(2.0) - std::lgamma(2.0 - alpha) - std::lgamma(alpha));
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double a = alpha;
    const double integral = integrator.integrate(
        [a](double z) { return std::pow(z, -1.0 - a) * std::pow(1.0 - z, a - 1.0); }, eps,
        1.0);
    atom_rate = (16.0 / fold) * norm * integral;
  }

  double compensating_rate() const { return boost::math::ibeta(2.0 - alpha, alpha, eps); }

  // Atom size z >= eps from the normalized intensity, by rejection from the
  // z^{-1-alpha} proposal with acceptance weight (1-z)^{alpha-1}.
  double sample_z(RngStream& rng) const {
    const double ea = std::pow(eps, -alpha);
    for (;;) {
      const double u = rng.next_unit();
      const double z = std::pow(ea - u * (ea - 1.0), -1.0 / alpha);
      if (rng.next_unit() < std::pow(1.0 - z, alpha - 1.0)) return z;
    }
  }
};

}  // namespace

void PsiPath::validate() const {
  double prev = 0.0;
  for (const auto& a : atoms) {
    if (!(a.t > prev)) throw std::invalid_argument("PsiPath: atom times must strictly increase");
    if (a.t > horizon) throw std::invalid_argument("PsiPath: atom beyond horizon");
    prev = a.t;
  }
}

IntensityInfo describe_intensity(const XiIntensity& intensity) {
  IntensityInfo info;
  if (std::holds_alternative<KingmanIntensity>(intensity)) {
    info.c_pair = 1.0;
    return info;
  }
  if (const auto* pm = std::get_if<PointMassIntensity>(&intensity)) {
    info.atom_rate = pm->rate;
    info.c_pair = pm->c_pair;
    info.atom_pair_rate = pm->rate * pm->x.l2sq();
    return info;
  }
  const BetaLaw law(std::get<TruncatedBetaIntensity>(intensity));
  info.atom_rate = law.atom_rate;
  info.c_pair = 0.0;
  info.compensating_rate = law.compensating_rate();
  info.atom_pair_rate = 1.0 - info.compensating_rate;
  return info;
}

std::optional<PointMassIntensity> model_point_mass_intensity(const CanningsModel& model) {
  const auto kingman = []() {
    PointMassIntensity pm;
    pm.rate = 0.0;
    pm.c_pair = 1.0;
    return pm;
  };
  if (std::holds_alternative<WrightFisher>(model)) return kingman();
  if (const auto* rf = std::get_if<RandomFitness>(&model)) {
    if (rf->law == RandomFitness::Law::FiniteVariance) return kingman();
    return std::nullopt;  // Beta-type limit
  }
  if (const auto* gw = std::get_if<GWCouples>(&model)) {
    if (gw->law == GWCouples::Law::PoissonPositive) return kingman();
    return std::nullopt;
  }
  if (const auto* lfc = std::get_if<LargeFamilyCouple>(&model)) {
    if (lfc->gamma > 1.0) return kingman();
    PointMassIntensity pm;
    pm.x = Paintbox::repeated(lfc->psi / 4.0, 4);
    if (lfc->gamma < 1.0) {
      pm.rate = 4.0 / (lfc->psi * lfc->psi);
      pm.c_pair = 0.0;
    } else {
      pm.rate = 4.0 / (lfc->psi * lfc->psi + 2.0);
      pm.c_pair = 2.0 / (lfc->psi * lfc->psi + 2.0);
    }
    return pm;
  }
  if (const auto* lfi = std::get_if<LargeFamilyIndividual>(&model)) {
    if (lfi->gamma > 1.0) return kingman();
    PointMassIntensity pm;
    pm.x = Paintbox::repeated(lfi->psi / 4.0, 2);
    if (lfi->gamma < 1.0) {
      pm.rate = 8.0 / (lfi->psi * lfi->psi);
      pm.c_pair = 0.0;
    } else {
      pm.rate = 8.0 / (lfi->psi * lfi->psi + 4.0);
      pm.c_pair = 4.0 / (lfi->psi * lfi->psi + 4.0);
    }
    return pm;
  }
  if (const auto* ts = std::get_if<TwoSex>(&model)) {
    if (ts->lambda == 0.0) return kingman();
    const double q = ts->lambda * ts->beta * ts->beta * ts->r * (1.0 - ts->r);
    PointMassIntensity pm;
    pm.x = Paintbox::repeated(ts->beta / 4.0, 2);
    pm.rate = 8.0 * ts->lambda * ts->r * (1.0 - ts->r) / (1.0 + q);
    pm.c_pair = 1.0 / (1.0 + q);
    return pm;
  }
  return std::nullopt;
}

PsiPath sample_psi(const XiIntensity& intensity, double horizon, RngStream& rng) {
  if (!(horizon > 0.0)) throw std::invalid_argument("sample_psi: horizon must be > 0");
  PsiPath path;
  path.horizon = horizon;
  if (std::holds_alternative<KingmanIntensity>(intensity)) {
    path.descriptor = "kingman";
    return path;
  }
  double rate = 0.0;
  if (const auto* pm = std::get_if<PointMassIntensity>(&intensity)) {
    rate = pm->rate;
    path.descriptor = "point-mass";
  } else {
    path.descriptor = "truncated-beta";
  }
  std::vector<double> times;
  if (const auto* tb = std::get_if<TruncatedBetaIntensity>(&intensity)) {
    const BetaLaw law(*tb);
    const auto k = rng.poisson(law.atom_rate * horizon);
    times.resize(k);
    for (auto& t : times) t = rng.next_unit() * horizon;
    std::sort(times.begin(), times.end());
    for (std::size_t i = 1; i < times.size(); ++i)
      if (times[i] <= times[i - 1]) times[i] = std::nextafter(times[i - 1], horizon + 1.0);
    for (double t : times)
      path.atoms.push_back({t, Paintbox::repeated(law.sample_z(rng) / 4.0, law.fold)});
  } else {
    const auto& pm = std::get<PointMassIntensity>(intensity);
    const auto k = rng.poisson(rate * horizon);
    times.resize(k);
    for (auto& t : times) t = rng.next_unit() * horizon;
    std::sort(times.begin(), times.end());
    for (std::size_t i = 1; i < times.size(); ++i)
      if (times[i] <= times[i - 1]) times[i] = std::nextafter(times[i - 1], horizon + 1.0);
    for (double t : times) path.atoms.push_back({t, pm.x});
  }
  path.validate();
  return path;
}

PsiPath epsilon_cut(const PsiPath& psi, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon_cut: eps must be > 0");
  PsiPath out;
  out.horizon = psi.horizon;
  out.descriptor = psi.descriptor;
  for (const auto& a : psi.atoms)
    if (a.x.l2() >= eps) out.atoms.push_back(a);
  return out;
}

PedigreePsiSummary build_psi_summary(const Pedigree& pedigree, double eps, double c_N,
                                     std::uint64_t horizon_generations) {
  if (!(eps > 0.0) || !(c_N > 0.0))
    throw std::invalid_argument("build_psi_summary: eps and c_N must be > 0");
  PedigreePsiSummary s;
  s.c_N = c_N;
  s.eps = eps;
  s.horizon_generations = horizon_generations;
  const int N = pedigree.N();
  const double denom = 8.0 * static_cast<double>(N) * static_cast<double>(N);
  std::vector<std::uint32_t> totals;
  for (std::uint64_t k = 0; k < horizon_generations; ++k) {
    RngStream rng(pedigree.seed(), "V", k);
    sample_totals(pedigree.model(), rng, totals);
    double sq = 0.0;
    for (auto v : totals) sq += static_cast<double>(v) * static_cast<double>(v);
    if (sq / denom >= eps * eps) {
      s.large_generations.push_back(k);
      s.large_paintboxes.push_back(generation_paintbox(N, totals));
    }
  }
  return s;
}

PsiPath empirical_psi_path(const PedigreePsiSummary& summary) {
  PsiPath path;
  path.horizon = static_cast<double>(summary.horizon_generations) * summary.c_N;
  path.descriptor = "empirical";
  for (std::size_t i = 0; i < summary.large_generations.size(); ++i)
    path.atoms.push_back({static_cast<double>(summary.large_generations[i] + 1) * summary.c_N,
                          summary.large_paintboxes[i]});
  path.validate();
  return path;
}

const Partition& CoalescentRun::state_at(double t) const {
  const Partition* cur = &initial;
  for (const auto& [et, state] : events) {
    if (et > t) break;
    cur = &state;
  }
  return *cur;
}

const PsiAtom* PathAtomStream::next(double up_to) {
  if (idx_ >= path_->atoms.size() || path_->atoms[idx_].t > up_to) return nullptr;
  return &path_->atoms[idx_++];
}

IntensityAtomStream::IntensityAtomStream(const XiIntensity& intensity, RngStream rng)
    : rng_(rng) {
  rate_ = describe_intensity(intensity).atom_rate;
  if (const auto* pm = std::get_if<PointMassIntensity>(&intensity)) {
    scratch_.x = pm->x;
  } else if (const auto* tb = std::get_if<TruncatedBetaIntensity>(&intensity)) {
    is_beta_ = true;
    fold_ = tb->fold;
    alpha_ = tb->alpha;
    eps_pow_ = std::pow(tb->eps, -tb->alpha);
  }
  scratch_.t = 0.0;
}

const PsiAtom* IntensityAtomStream::next(double up_to) {
  if (rate_ <= 0.0) return nullptr;
  if (!pending_) {
    scratch_.t += rng_.exponential(rate_);
    if (is_beta_) {
      // Atom size by rejection from the z^{-1-alpha} proposal with acceptance
      // weight (1-z)^{alpha-1}, restricted to z >= eps.
      double z;
      for (;;) {
        const double u = rng_.next_unit();
        z = std::pow(eps_pow_ - u * (eps_pow_ - 1.0), -1.0 / alpha_);
        if (rng_.next_unit() < std::pow(1.0 - z, alpha_ - 1.0)) break;
      }
      scratch_.x.assign_repeated(z / 4.0, fold_);
    }
    pending_ = true;
  }
  if (scratch_.t > up_to) return nullptr;
  pending_ = false;
  return &scratch_;
}

CoalescentRun run_flow(AtomStream& atoms, double c, const Partition& xi0, double horizon,
                       RngStream& rng) {
  CoalescentRun run;
  run.initial = xi0;
  Partition state = xi0;
  double t = 0.0;
  for (;;) {
    const int b = state.block_count();
    if (b <= 1) {
      run.end_time = t;
      return run;
    }
    const double rate = c * pair_count(b);
    const double t_pair = rate > 0.0 ? t + rng.exponential(rate)
                                     : std::numeric_limits<double>::infinity();
    const double bound = std::min(t_pair, horizon);
    if (const PsiAtom* atom = atoms.next(bound)) {
      t = atom->t;
      thread_local std::vector<int> labels;
      if (sample_merger_labels(atom->x, b, rng, labels) < b) {
        state = coagulate(state, Partition::from_assignment(labels));
        run.events.emplace_back(t, state);
      }
      continue;
    }
    if (t_pair <= horizon) {
      t = t_pair;
      const auto [i, j] = decode_pair(b, rng.next_below(static_cast<std::uint64_t>(pair_count(b))));
      state = merge_two_blocks(state, i, j);
      run.events.emplace_back(t, state);
      continue;
    }
    run.censored = true;
    run.end_time = horizon;
    return run;
  }
}

CoalescentRun run_flow(const PsiPath& psi, double c, const Partition& xi0, double horizon,
                       RngStream& rng) {
  PathAtomStream stream(psi);
  return run_flow(stream, c, xi0, horizon, rng);
}

CoalescentRun run_jump_hold(AtomStream& atoms, double c, const Partition& xi0,
                            double horizon, RngStream& rng) {
  CoalescentRun run;
  run.initial = xi0;
  Partition state = xi0;
  double t = 0.0;
  for (;;) {
    const int b = state.block_count();
    if (b <= 1) {
      run.end_time = t;
      return run;
    }
    const double rate = c * pair_count(b);
    bool jumped = false;
    while (!jumped) {
      const double t_pair = rate > 0.0 ? t + rng.exponential(rate)
                                       : std::numeric_limits<double>::infinity();
      const double bound = std::min(t_pair, horizon);
      if (const PsiAtom* atom = atoms.next(bound)) {
        t = atom->t;
        // Effective-jump probability of this atom given the current blocks.
        const double q = 1.0 - noncoalescence_prob(b, atom->x);
        if (q > 0.0 && rng.next_unit() < q) {
          if (b == 2) {
            // The only effective outcome of two blocks is their merger.
            state = merge_two_blocks(state, 0, 1);
          } else {
            thread_local std::vector<int> labels;
            while (sample_merger_labels(atom->x, b, rng, labels) == b) {
            }
            state = coagulate(state, Partition::from_assignment(labels));
          }
          run.events.emplace_back(t, state);
          jumped = true;
        }
        continue;
      }
      if (t_pair <= horizon) {
        t = t_pair;
        const auto [i, j] =
            decode_pair(b, rng.next_below(static_cast<std::uint64_t>(pair_count(b))));
        state = merge_two_blocks(state, i, j);
        run.events.emplace_back(t, state);
        jumped = true;
        continue;
      }
      run.censored = true;
      run.end_time = horizon;
      return run;
    }
  }
}

CoalescentRun run_jump_hold(const PsiPath& psi, double c, const Partition& xi0,
                            double horizon, RngStream& rng) {
  PathAtomStream stream(psi);
  return run_jump_hold(stream, c, xi0, horizon, rng);
}

CoalescentRun run_naive(const PedigreePsiSummary& summary, double c_pair,
                        const Partition& xi0, RngStream& rng) {
  CoalescentRun run;
  run.initial = xi0;
  Partition state = xi0;
  const double p = std::min(1.0, summary.c_N * c_pair);
  std::uint64_t g = 0;  // next step index; step k lands at time (k+1) c_N
  std::size_t li = 0;
  const std::uint64_t horizon = summary.horizon_generations;
  for (;;) {
    const int b = state.block_count();
    if (b <= 1) {
      run.end_time = run.events.empty() ? 0.0 : run.events.back().first;
      return run;
    }
    const std::uint64_t next_large = li < summary.large_generations.size()
                                         ? summary.large_generations[li]
                                         : UINT64_MAX;
    const double m = pair_count(b);
    // P(at least one pair merges) in one small generation.
    const double q = p > 0.0 ? -std::expm1(m * std::log1p(-p)) : 0.0;
    const std::uint64_t skip = q > 0.0 ? rng.geometric(q) : UINT64_MAX / 2;
    const std::uint64_t small_steps_avail = next_large > g ? next_large - g : 0;
    if (skip <= small_steps_avail) {
      const std::uint64_t k = g + skip - 1;
      if (k >= horizon) {
        run.censored = true;
        run.end_time = static_cast<double>(horizon) * summary.c_N;
        return run;
      }
      const auto [i, j] = decode_pair(b, rng.next_below(static_cast<std::uint64_t>(m)));
      state = merge_two_blocks(state, i, j);
      run.events.emplace_back(static_cast<double>(k + 1) * summary.c_N, state);
      g = k + 1;
      continue;
    }
    if (next_large == UINT64_MAX || next_large >= horizon) {
      run.censored = true;
      run.end_time = static_cast<double>(horizon) * summary.c_N;
      return run;
    }
    // Paintbox generation: the memoryless geometric restarts afterwards.
    const Partition alpha = sample_merger(summary.large_paintboxes[li], b, rng);
    if (alpha.block_count() < b) {
      state = coagulate(state, alpha);
      run.events.emplace_back(static_cast<double>(next_large + 1) * summary.c_N, state);
    }
    g = next_large + 1;
    ++li;
  }
}

std::string psi_path_to_text(const PsiPath& path) {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "# horizon %.17g\n", path.horizon);
  out += buf;
  for (const auto& a : path.atoms) {
    std::snprintf(buf, sizeof(buf), "%.17g", a.t);
    out += buf;
    for (double w : a.x.weights()) {
      std::snprintf(buf, sizeof(buf), " %.17g", w);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

PsiPath psi_path_from_text(const std::string& text) {
  PsiPath path;
  std::istringstream in(text);
  std::string line;
  bool have_horizon = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string word;
      if (ls >> word && word == "horizon" && (ls >> path.horizon)) have_horizon = true;
      continue;
    }
    std::istringstream ls(line);
    double t;
    if (!(ls >> t)) throw std::invalid_argument("psi_path_from_text: bad atom line");
    std::vector<double> w;
    double x;
    while (ls >> x) w.push_back(x);
    path.atoms.push_back({t, Paintbox(std::move(w))});
  }
  std::sort(path.atoms.begin(), path.atoms.end(),
            [](const PsiAtom& a, const PsiAtom& b) { return a.t < b.t; });
  if (!have_horizon)
    path.horizon = path.atoms.empty() ? 0.0 : path.atoms.back().t;
  path.descriptor = "imported";
  path.validate();
  return path;
}

}  // namespace pedcoal
