#include "pedcoal/genstats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pedcoal/stats.hpp"

namespace pedcoal {

namespace {

void accumulate_interval(std::vector<double>& L, const std::vector<int>& sizes, double dt,
                         int n) {
  if (dt <= 0.0) return;
  for (int s : sizes)
    if (s < n) L[s - 1] += dt;
}

}  // namespace

BranchSpectrum branch_spectrum(const CoalescentRun& run) {
  const int n = run.initial.n();
  BranchSpectrum spec;
  spec.n = n;
  spec.L.assign(n > 1 ? n - 1 : 0, 0.0);
  spec.censored = run.censored;
  double t = 0.0;
  std::vector<int> sizes = run.initial.block_sizes();
  for (const auto& [et, state] : run.events) {
    accumulate_interval(spec.L, sizes, et - t, n);
    t = et;
    sizes = state.block_sizes();
  }
  if (run.censored) accumulate_interval(spec.L, sizes, run.end_time - t, n);
  for (double l : spec.L) spec.t_total += l;
  return spec;
}

BranchSpectrum branch_spectrum(const GenealogyTree& tree, double c_N) {
  CoalescentRun run;
  run.initial = tree.initial;
  for (const auto& ev : tree.events)
    run.events.emplace_back(static_cast<double>(ev.generation) * c_N, ev.state);
  run.censored = tree.censored;
  run.end_time = static_cast<double>(tree.final_generation) * c_N;
  return branch_spectrum(run);
}

void SfsAccumulator::add(const BranchSpectrum& s) {
  if (s.n != n_) throw std::invalid_argument("SfsAccumulator: sample size mismatch");
  if (s.censored) {
    ++censored_;
    return;
  }
  for (std::size_t i = 0; i < sum_l_.size(); ++i) {
    sum_l_[i] += s.L[i];
    sum_l_sq_[i] += s.L[i] * s.L[i];
    sum_lt_[i] += s.L[i] * s.t_total;
  }
  sum_t_ += s.t_total;
  sum_t_sq_ += s.t_total * s.t_total;
  ++loci_;
}

void SfsAccumulator::merge(const SfsAccumulator& o) {
  if (o.n_ != n_) throw std::invalid_argument("SfsAccumulator: sample size mismatch");
  for (std::size_t i = 0; i < sum_l_.size(); ++i) {
    sum_l_[i] += o.sum_l_[i];
    sum_l_sq_[i] += o.sum_l_sq_[i];
    sum_lt_[i] += o.sum_lt_[i];
  }
  sum_t_ += o.sum_t_;
  sum_t_sq_ += o.sum_t_sq_;
  loci_ += o.loci_;
  censored_ += o.censored_;
}

std::vector<double> SfsAccumulator::sfs() const {
  if (loci_ == 0 || sum_t_ <= 0.0)
    throw std::runtime_error("SfsAccumulator: no uncensored loci");
  std::vector<double> out(sum_l_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sum_l_[i] / sum_t_;
  return out;
}

std::vector<double> SfsAccumulator::sfs_stderr() const {
  const auto r = sfs();
  const double ll = static_cast<double>(loci_);
  const double mean_t = sum_t_ / ll;
  std::vector<double> out(sum_l_.size(), 0.0);
  if (loci_ < 2) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mean_l = sum_l_[i] / ll;
    const double var_l = std::max(0.0, sum_l_sq_[i] / ll - mean_l * mean_l);
    const double var_t = std::max(0.0, sum_t_sq_ / ll - mean_t * mean_t);
    const double cov = sum_lt_[i] / ll - mean_l * mean_t;
    const double var_ratio =
        (var_l - 2.0 * r[i] * cov + r[i] * r[i] * var_t) / (mean_t * mean_t);
    out[i] = var_ratio > 0.0 ? std::sqrt(var_ratio / ll) : 0.0;
  }
  return out;
}

std::vector<std::uint64_t> sample_mutation_sfs(const BranchSpectrum& s, double theta,
                                               RngStream& rng) {
  std::vector<std::uint64_t> out(s.L.size(), 0);
  for (std::size_t i = 0; i < s.L.size(); ++i) out[i] = rng.poisson(0.5 * theta * s.L[i]);
  return out;
}

std::size_t DeltaPedigree::first_event_after(double t) {
  while (frontier_ <= t) {
    frontier_ += stream_.exponential(lambda_);
    times_.push_back(frontier_);
  }
  return static_cast<std::size_t>(
      std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
}

double DeltaPedigree::event_time(std::size_t idx) {
  while (times_.size() <= idx) {
    frontier_ += stream_.exponential(lambda_);
    times_.push_back(frontier_);
  }
  return times_[idx];
}

namespace {

// Shared stepping core of the two delta-model paths. The `Merge` callbacks
// keep the Partition path and the sizes-only path in randomness lockstep.
template <typename KingmanMerge, typename EventMerge>
void delta_model_core(DeltaPedigree& pedigree, double psi, int n, RngStream& rng,
                      double kingman_rate, std::vector<int>& sizes,
                      KingmanMerge&& kingman_merge, EventMerge&& event_merge) {
  if (psi <= 0.0 || psi > 1.0)
    throw std::invalid_argument("delta model: psi must be in (0,1]");
  if (n < 1) throw std::invalid_argument("delta model: n must be >= 1");
  double t = 0.0;
  std::size_t next_event = pedigree.lambda() > 0.0 ? pedigree.first_event_after(0.0)
                                                   : SIZE_MAX;
  const double quarter = 0.25 * psi;
  thread_local std::vector<int> group_a, group_b;
  while (sizes.size() > 1) {
    const int b = static_cast<int>(sizes.size());
    const double rate = kingman_rate * 0.5 * b * (b - 1);
    const double t_kingman =
        rate > 0.0 ? t + rng.exponential(rate) : std::numeric_limits<double>::infinity();
    const double t_event = next_event == SIZE_MAX
                               ? std::numeric_limits<double>::infinity()
                               : pedigree.event_time(next_event);
    if (t_kingman <= t_event) {
      t = t_kingman;
      const std::uint64_t m = static_cast<std::uint64_t>(b) * (b - 1) / 2;
      std::uint64_t idx = rng.next_below(m);
      int i = 0;
      std::uint64_t row = static_cast<std::uint64_t>(b) - 1;
      while (idx >= row) {
        idx -= row;
        --row;
        ++i;
      }
      const int j = i + 1 + static_cast<int>(idx);
      kingman_merge(t, i, j);
      sizes[i] += sizes[j];
      sizes.erase(sizes.begin() + j);
    } else {
      t = t_event;
      ++next_event;
      group_a.clear();
      group_b.clear();
      for (int i = 0; i < b; ++i) {
        const double u = rng.next_unit();
        if (u < quarter)
          group_a.push_back(i);
        else if (u < 2.0 * quarter)
          group_b.push_back(i);
      }
      if (group_a.size() < 2 && group_b.size() < 2) continue;
      event_merge(t, group_a, group_b);
      // Merge each group into its first member, erasing later slots; the
      // least-element canonical order of the partition path is preserved.
      thread_local std::vector<char> dead;
      dead.assign(b, 0);
      for (const auto* grp : {&group_a, &group_b}) {
        if (grp->size() < 2) continue;
        const int head = (*grp)[0];
        for (std::size_t k = 1; k < grp->size(); ++k) {
          sizes[head] += sizes[(*grp)[k]];
          dead[(*grp)[k]] = 1;
        }
      }
      int w = 0;
      for (int i = 0; i < b; ++i)
        if (!dead[i]) sizes[w++] = sizes[i];
      sizes.resize(w);
    }
  }
}

}  // namespace

CoalescentRun delta_model_locus(DeltaPedigree& pedigree, double psi, int n, RngStream& rng,
                                double kingman_rate) {
  CoalescentRun run;
  run.initial = Partition::singletons(n);
  Partition state = run.initial;
  std::vector<int> sizes(n, 1);
  delta_model_core(
      pedigree, psi, n, rng, kingman_rate, sizes,
      [&](double t, int i, int j) {
        state = merge_two_blocks(state, i, j);
        run.events.emplace_back(t, state);
      },
      [&](double t, const std::vector<int>& ga, const std::vector<int>& gb) {
        const int b = state.block_count();
        std::vector<int> labels(b);
        for (int i = 0; i < b; ++i) labels[i] = 2 + i;
        for (int i : ga) labels[i] = 0;
        for (int i : gb) labels[i] = 1;
        state = coagulate(state, Partition::from_assignment(labels));
        run.events.emplace_back(t, state);
      });
  run.end_time = run.events.empty() ? 0.0 : run.events.back().first;
  return run;
}

BranchSpectrum delta_model_spectrum(DeltaPedigree& pedigree, double psi, int n,
                                    RngStream& rng, double kingman_rate) {
  BranchSpectrum spec;
  spec.n = n;
  spec.L.assign(n > 1 ? n - 1 : 0, 0.0);
  std::vector<int> sizes(n, 1);
  double last_t = 0.0;
  const auto credit = [&](double t) {
    accumulate_interval(spec.L, sizes, t - last_t, n);
    last_t = t;
  };
  delta_model_core(
      pedigree, psi, n, rng, kingman_rate, sizes,
      [&](double t, int, int) { credit(t); },
      [&](double t, const std::vector<int>&, const std::vector<int>&) { credit(t); });
  for (double l : spec.L) spec.t_total += l;
  return spec;
}

VarianceDecomposition variance_decomposition(double psi, double lambda, int n,
                                             std::uint64_t pedigrees, std::uint64_t loci,
                                             std::uint64_t direct_reps, std::uint64_t seed) {
  if (pedigrees < 2 || loci < 2)
    throw std::invalid_argument("variance_decomposition: need P >= 2 and L >= 2");
  VarianceDecomposition out;
  out.pedigrees = pedigrees;
  out.loci = loci;
  out.direct_reps = direct_reps;

  RunningStat means, vars, grand;
  for (std::uint64_t p = 0; p < pedigrees; ++p) {
    DeltaPedigree ped(lambda, RngStream(seed, "ped-seed", p).next_u64());
    RunningStat per_ped;
    for (std::uint64_t l = 0; l < loci; ++l) {
      RngStream rng(seed, "locus", p, l);
      const auto spec = delta_model_spectrum(ped, psi, n, rng);
      per_ped.add(spec.t_total);
      grand.add(spec.t_total);
    }
    means.add(per_ped.mean());
    vars.add(per_ped.variance());
  }
  out.within = vars.mean();
  out.between_raw = means.variance();
  out.between = out.between_raw - out.within / static_cast<double>(loci);
  if (out.between < 0.0) {
    out.between = 0.0;
    out.between_clamped = true;
  }
  out.total_panel = out.within + out.between;
  out.frac_within = out.total_panel > 0.0 ? out.within / out.total_panel : 0.0;
  out.frac_between = out.total_panel > 0.0 ? out.between / out.total_panel : 0.0;
  out.mean_t_total = grand.mean();

  out.within_se = vars.stderror();
  // Normal-theory scale error of the variance of pedigree means plus the
  // bias-correction uncertainty.
  const double se_raw =
      out.between_raw * std::sqrt(2.0 / std::max<double>(1.0, pedigrees - 1));
  out.between_se = std::sqrt(se_raw * se_raw +
                             (out.within_se / static_cast<double>(loci)) *
                                 (out.within_se / static_cast<double>(loci)));
  if (out.total_panel > 0.0) {
    const double fw = out.frac_within;
    out.frac_within_se =
        fw * (1.0 - fw) > 0.0
            ? std::sqrt(std::pow(out.within_se * (1.0 - fw) / out.total_panel, 2) +
                        std::pow(out.between_se * fw / out.total_panel, 2))
            : 0.0;
  }

  if (direct_reps >= 2) {
    RunningStat direct;
    for (std::uint64_t r = 0; r < direct_reps; ++r) {
      DeltaPedigree ped(lambda, RngStream(seed, "direct-ped", r).next_u64());
      RngStream rng(seed, "direct-locus", r);
      direct.add(delta_model_spectrum(ped, psi, n, rng).t_total);
    }
    out.total_direct = direct.variance();
  }
  return out;
}

}  // namespace pedcoal
