// Command-line front end: pedigree simulation, quenched genealogies, limit
// coalescents, the delta-model experiments and the acceptance selftest.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pedcoal/cannings.hpp"
#include "pedcoal/genstats.hpp"
#include "pedcoal/io.hpp"
#include "pedcoal/limit.hpp"
#include "pedcoal/quenched.hpp"
#include "pedcoal/selftest.hpp"
#include "pedcoal/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pedcoal;

namespace {

struct CommonOpts {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out = ".";
  int threads = 1;
};

struct ModelOpts {
  std::string model = "wright-fisher";
  int bigN = 100;
  double psi = 0.5;
  double gamma = 1.0;
  double alpha = 1.5;
  double c = 4.0;
  double mu = 8.0;
  double r = 0.5;
  double lambda = 0.0;
  double beta = 0.5;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->configurable();  // options may come from a config-file section
  cmd->fallthrough();   // app-level flags like --config may follow the name
  cmd->add_option("--seed", o.seed, "master seed (required; no wall-clock default)")
      ->required();
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  o.seed_set = true;
}

void add_model(CLI::App* cmd, ModelOpts& m) {
  cmd->add_option("--model", m.model,
                  "wright-fisher | random-fitness | random-fitness-pareto | gw-couples | "
                  "gw-couples-pareto | large-family-couple | large-family-individual | "
                  "two-sex");
  cmd->add_option("--bigN", m.bigN, "population size N");
  cmd->add_option("--psi", m.psi, "large family fraction");
  cmd->add_option("--gamma", m.gamma, "large family rarity exponent");
  cmd->add_option("--alpha", m.alpha, "heavy-tail exponent in (1,2)");
  cmd->add_option("--couple-rate", m.c, "gw-couples activity constant c");
  cmd->add_option("--mu", m.mu, "gw-couples Poisson mean");
  cmd->add_option("--sex-ratio", m.r, "two-sex fraction of sex 1");
  cmd->add_option("--star-lambda", m.lambda, "two-sex star probability scale");
  cmd->add_option("--beta", m.beta, "two-sex star family fraction");
}

CanningsModel make_model(const ModelOpts& m) {
  if (m.model == "wright-fisher") return WrightFisher{m.bigN};
  if (m.model == "random-fitness")
    return RandomFitness{m.bigN, RandomFitness::Law::FiniteVariance, m.alpha, 1.0};
  if (m.model == "random-fitness-pareto")
    return RandomFitness{m.bigN, RandomFitness::Law::ParetoTail, m.alpha, 1.0};
  if (m.model == "gw-couples")
    return GWCouples{m.bigN, m.c, GWCouples::Law::PoissonPositive, m.mu, m.alpha};
  if (m.model == "gw-couples-pareto")
    return GWCouples{m.bigN, m.c, GWCouples::Law::ParetoInt, m.mu, m.alpha};
  if (m.model == "large-family-couple") return LargeFamilyCouple{m.bigN, m.psi, m.gamma};
  if (m.model == "large-family-individual")
    return LargeFamilyIndividual{m.bigN, m.psi, m.gamma};
  if (m.model == "two-sex") return TwoSex{m.bigN, m.r, m.lambda, m.beta};
  throw std::invalid_argument("unknown model: " + m.model);
}

json model_json(const ModelOpts& m) {
  return json{{"model", m.model},   {"N", m.bigN},     {"psi", m.psi},
              {"gamma", m.gamma},   {"alpha", m.alpha}, {"couple_rate", m.c},
              {"mu", m.mu},         {"r", m.r},         {"star_lambda", m.lambda},
              {"beta", m.beta}};
}

void write_manifest(const std::string& out_dir, const std::string& command, json config,
                    json extra) {
  config["command"] = command;
  config["version"] = kVersion;
  const std::string canon = config.dump();
  json manifest;
  manifest["config"] = config;
  manifest["config_digest"] = hex64(fnv1a64(canon));
  manifest["version"] = kVersion;
  manifest["results"] = std::move(extra);
  std::ofstream f(fs::path(out_dir) / "manifest.json");
  f << manifest.dump(2) << "\n";
}

void ensure_outdir(const std::string& dir) {
  if (!dir.empty() && dir != ".") fs::create_directories(dir);
}

std::string opath(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// ---- pedigree ---------------------------------------------------------------

int cmd_pedigree(const CommonOpts& common, const ModelOpts& mopts, std::uint64_t gens,
                 std::uint64_t cn_reps) {
  const CanningsModel model = make_model(mopts);
  validate_model(model);
  ensure_outdir(common.out);
  const Pedigree ped(model, common.seed);

  CsvWriter table(opath(common.out, "pedigree.csv"),
                  {"generation", "child", "p0", "p1"});
  for (std::uint64_t g = 0; g < gens; ++g) {
    const auto slice = ped.slice_at(g);
    for (int k = 0; k < slice.N; ++k)
      table.row({CsvWriter::num(g), CsvWriter::num(k + 1), CsvWriter::num(slice.p0[k]),
                 CsvWriter::num(slice.p1[k])});
  }

  RngStream cn_rng(common.seed, "cn-estimate");
  const auto cn = pair_coalescence_prob(model, cn_reps, cn_rng);
  json results;
  results["c_N_estimate"] = cn.value;
  results["c_N_stderr"] = cn.stderr_;
  if (cn.closed_form) results["c_N_closed_form"] = *cn.closed_form;
  if (const auto cp = model_c_pair(model)) results["c_pair"] = *cp;
  results["generations"] = gens;
  json config = model_json(mopts);
  config["seed"] = common.seed;
  config["generations"] = gens;
  config["cn_reps"] = cn_reps;
  write_manifest(common.out, "pedigree", config, results);
  std::cout << "pedigree.csv written; c_N = " << cn.value << " (se " << cn.stderr_ << ")\n";
  return 0;
}

// ---- quenched ----------------------------------------------------------------

int cmd_quenched(const CommonOpts& common, const ModelOpts& mopts, int n,
                 std::uint64_t loci, double horizon_rescaled, std::uint64_t cn_reps,
                 bool dump_trees, const std::vector<double>& state_times) {
  const CanningsModel model = make_model(mopts);
  validate_model(model);
  ensure_outdir(common.out);

  double c_N;
  double c_N_se = 0.0;
  if (const auto closed = model_c_N_closed_form(model)) {
    c_N = *closed;
  } else {
    RngStream cn_rng(common.seed, "cn-estimate");
    const auto cn = pair_coalescence_prob(model, cn_reps, cn_rng);
    c_N = cn.value;
    c_N_se = cn.stderr_;
  }
  const auto horizon = static_cast<std::uint64_t>(horizon_rescaled / c_N);
  const Pedigree ped(model, common.seed);
  const auto xi0 = GroupedPartition::dispersed(Partition::singletons(n));
  const auto trees = run_loci_shared_pedigree(ped, xi0, loci,
                                              RngStream(common.seed, "loci").next_u64(),
                                              horizon);

  SfsAccumulator acc(n);
  CsvWriter ttotal(opath(common.out, "ttotal.csv"),
                   {"pedigree_id", "locus_id", "t_total", "censored"});
  std::uint64_t censored = 0;
  for (std::uint64_t l = 0; l < loci; ++l) {
    const auto spec = branch_spectrum(trees[l], c_N);
    acc.add(spec);
    censored += spec.censored ? 1 : 0;
    ttotal.row({"0", CsvWriter::num(l), CsvWriter::num(spec.t_total),
                spec.censored ? "1" : "0"});
  }
  CsvWriter sfs_csv(opath(common.out, "sfs.csv"),
                    {"i", "proportion", "stderr", "pedigree_id"});
  if (acc.loci() > 0) {
    const auto sfs = acc.sfs();
    const auto se = acc.sfs_stderr();
    for (int i = 1; i < n; ++i)
      sfs_csv.row({CsvWriter::num(i), CsvWriter::num(sfs[i - 1]), CsvWriter::num(se[i - 1]),
                   "0"});
  }
  if (dump_trees) {
    CsvWriter events(opath(common.out, "trees.csv"),
                     {"locus_id", "generation", "time", "state"});
    for (std::uint64_t l = 0; l < loci; ++l)
      for (const auto& ev : trees[l].events)
        events.row({CsvWriter::num(l), CsvWriter::num(ev.generation),
                    CsvWriter::num(static_cast<double>(ev.generation) * c_N),
                    ev.state.to_text()});
  }
  if (!state_times.empty()) {
    // Trajectory snapshots with the block pairing, replayed per locus with
    // the same streams the lockstep runner used.
    std::vector<std::uint64_t> gens;
    for (double t : state_times)
      gens.push_back(static_cast<std::uint64_t>(std::max(0.0, t / c_N)));
    std::sort(gens.begin(), gens.end());
    QuenchedRunOptions opts;
    opts.horizon_generations = horizon;
    opts.sample_generations = gens;
    const auto loci_seed = RngStream(common.seed, "loci").next_u64();
    CsvWriter states(opath(common.out, "states.csv"),
                     {"locus_id", "generation", "time", "state"});
    for (std::uint64_t l = 0; l < loci; ++l) {
      RngStream rng(loci_seed, "locus", l);
      const auto run = run_locus(ped, xi0, opts, rng);
      for (std::size_t s = 0; s < run.sampled_states.size(); ++s)
        states.row({CsvWriter::num(l), CsvWriter::num(gens[s]),
                    CsvWriter::num(static_cast<double>(gens[s]) * c_N),
                    run.sampled_states[s].to_text()});
    }
  }
  json results;
  results["c_N"] = c_N;
  results["c_N_stderr"] = c_N_se;
  results["censored_loci"] = censored;
  results["horizon_generations"] = horizon;
  json config = model_json(mopts);
  config["seed"] = common.seed;
  config["n"] = n;
  config["loci"] = loci;
  config["horizon_rescaled"] = horizon_rescaled;
  write_manifest(common.out, "quenched", config, results);
  std::cout << "quenched run: " << loci << " loci, " << censored << " censored\n";
  return 0;
}

// ---- limit -------------------------------------------------------------------

int cmd_limit(const CommonOpts& common, const ModelOpts& mopts, const std::string& kind,
              int n, std::uint64_t reps, double horizon, double rate,
              std::vector<double> weights, std::optional<double> c_pair_opt, double alpha,
              double eps, const std::string& import_psi, const std::string& export_psi,
              std::uint64_t cn_reps, bool dump_events) {
  ensure_outdir(common.out);
  XiIntensity intensity = KingmanIntensity{};
  std::optional<PsiPath> fixed_path;
  double c_pair = 1.0;
  json results;

  if (!import_psi.empty()) {
    fixed_path = psi_path_from_text(read_text_file(import_psi));
    if (!c_pair_opt) throw std::invalid_argument("imported psi path requires --c-pair");
    c_pair = *c_pair_opt;
  } else if (kind == "kingman") {
    intensity = KingmanIntensity{};
    c_pair = c_pair_opt.value_or(1.0);
  } else if (kind == "point-mass") {
    PointMassIntensity pm;
    pm.rate = rate;
    pm.x = Paintbox(weights);
    if (!c_pair_opt) throw std::invalid_argument("point-mass intensity requires --c-pair");
    pm.c_pair = *c_pair_opt;
    c_pair = pm.c_pair;
    intensity = pm;
  } else if (kind == "beta2" || kind == "beta4") {
    TruncatedBetaIntensity tb{kind == "beta2" ? 2 : 4, alpha, eps};
    intensity = tb;
    const auto info = describe_intensity(intensity);
    c_pair = info.c_pair + info.compensating_rate;
    results["compensating_rate"] = info.compensating_rate;
    results["atom_rate"] = info.atom_rate;
  } else if (kind == "model") {
    const CanningsModel model = make_model(mopts);
    validate_model(model);
    const auto pm = model_point_mass_intensity(model);
    if (!pm)
      throw std::invalid_argument(
          "model has no point-mass limit; use beta2/beta4 or empirical");
    intensity = *pm;
    c_pair = pm->c_pair;
  } else if (kind == "empirical") {
    const CanningsModel model = make_model(mopts);
    validate_model(model);
    double c_N;
    if (const auto closed = model_c_N_closed_form(model)) {
      c_N = *closed;
    } else {
      RngStream cn_rng(common.seed, "cn-estimate");
      const auto cn = pair_coalescence_prob(model, cn_reps, cn_rng);
      c_N = cn.value;
      results["c_N_stderr"] = cn.stderr_;
    }
    results["c_N"] = c_N;
    // The limiting pair rate is a property of the N -> infinity family, not
    // of one finite matrix, so empirical runs must state it explicitly.
    if (!c_pair_opt) {
      std::string hint;
      if (const auto cp = model_c_pair(model))
        hint = " (catalog closed form: " + std::to_string(*cp) + ")";
      throw std::invalid_argument("empirical path requires --c-pair" + hint);
    }
    c_pair = *c_pair_opt;
    const Pedigree ped(model, common.seed);
    const auto gens = static_cast<std::uint64_t>(horizon / c_N);
    fixed_path = empirical_psi_path(build_psi_summary(ped, eps, c_N, gens));
  } else {
    throw std::invalid_argument("unknown intensity kind: " + kind);
  }
  results["c_pair"] = c_pair;

  if (!fixed_path && (export_psi.size() || dump_events)) {
    RngStream psi_rng(common.seed, "psi");
    fixed_path = sample_psi(intensity, horizon, psi_rng);
  }
  if (!export_psi.empty()) write_text_file(export_psi, psi_path_to_text(*fixed_path));

  const Partition xi0 = Partition::singletons(n);
  CsvWriter mrca(opath(common.out, "mrca.csv"), {"replicate", "mrca_time", "censored"});
  std::unique_ptr<CsvWriter> events;
  if (dump_events)
    events = std::make_unique<CsvWriter>(
        opath(common.out, "events.csv"),
        std::vector<std::string>{"replicate", "time", "state"});
  RunningStat mrca_stat;
  std::vector<double> mrca_times(reps, -1.0);
  std::vector<CoalescentRun> runs_out;
  if (dump_events) runs_out.resize(reps);
  parallel_for(reps, common.threads, [&](std::uint64_t rep) {
    RngStream rng(common.seed, "replicate", rep);
    CoalescentRun run;
    if (fixed_path) {
      run = run_flow(*fixed_path, c_pair, xi0, fixed_path->horizon, rng);
    } else {
      IntensityAtomStream atoms(intensity, RngStream(common.seed, "atoms", rep));
      run = run_flow(atoms, c_pair, xi0, horizon, rng);
    }
    if (!run.censored) mrca_times[rep] = run.mrca_time();
    if (dump_events) runs_out[rep] = std::move(run);
  });
  std::uint64_t censored = 0;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    const bool was_censored = mrca_times[rep] < 0;
    censored += was_censored ? 1 : 0;
    if (!was_censored) mrca_stat.add(mrca_times[rep]);
    mrca.row({CsvWriter::num(rep),
              CsvWriter::num(was_censored ? -1.0 : mrca_times[rep]),
              was_censored ? "1" : "0"});
    if (dump_events)
      for (const auto& [t, state] : runs_out[rep].events)
        events->row({CsvWriter::num(rep), CsvWriter::num(t), state.to_text()});
  }
  results["mean_mrca"] = mrca_stat.mean();
  results["mean_mrca_se"] = mrca_stat.stderror();
  results["censored"] = censored;
  json config = model_json(mopts);
  config["seed"] = common.seed;
  config["kind"] = kind;
  config["n"] = n;
  config["replicates"] = reps;
  config["horizon"] = horizon;
  config["alpha"] = alpha;
  config["eps"] = eps;
  write_manifest(common.out, "limit", config, results);
  std::cout << "limit runs: mean MRCA " << mrca_stat.mean() << " (se "
            << mrca_stat.stderror() << "), censored " << censored << "\n";
  return 0;
}

// ---- naive -------------------------------------------------------------------

int cmd_naive(const CommonOpts& common, const ModelOpts& mopts, int n, std::uint64_t reps,
              double horizon, double eps, std::optional<double> c_pair_opt,
              std::uint64_t cn_reps) {
  const CanningsModel model = make_model(mopts);
  validate_model(model);
  ensure_outdir(common.out);
  double c_N;
  double c_N_se = 0.0;
  if (const auto closed = model_c_N_closed_form(model)) {
    c_N = *closed;
  } else {
    RngStream cn_rng(common.seed, "cn-estimate");
    const auto cn = pair_coalescence_prob(model, cn_reps, cn_rng);
    c_N = cn.value;
    c_N_se = cn.stderr_;
  }
  double c_pair;
  if (c_pair_opt) {
    c_pair = *c_pair_opt;
  } else if (const auto cp = model_c_pair(model)) {
    c_pair = *cp;
  } else {
    throw std::invalid_argument("naive coalescent needs --c-pair for this model");
  }
  const Pedigree ped(model, common.seed);
  const auto gens = static_cast<std::uint64_t>(horizon / c_N);
  const auto summary = build_psi_summary(ped, eps, c_N, gens);

  const Partition xi0 = Partition::singletons(n);
  CsvWriter mrca(opath(common.out, "mrca.csv"), {"replicate", "mrca_time", "censored"});
  std::vector<double> times(reps, -1.0);
  parallel_for(reps, common.threads, [&](std::uint64_t rep) {
    RngStream rng(common.seed, "replicate", rep);
    const auto run = run_naive(summary, c_pair, xi0, rng);
    if (!run.censored) times[rep] = run.mrca_time();
  });
  RunningStat stat;
  std::uint64_t censored = 0;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    const bool was_censored = times[rep] < 0;
    censored += was_censored ? 1 : 0;
    if (!was_censored) stat.add(times[rep]);
    mrca.row({CsvWriter::num(rep), CsvWriter::num(was_censored ? -1.0 : times[rep]),
              was_censored ? "1" : "0"});
  }
  json results;
  results["c_N"] = c_N;
  results["c_N_stderr"] = c_N_se;
  results["c_pair"] = c_pair;
  results["large_generations"] = summary.large_generations.size();
  results["mean_mrca"] = stat.mean();
  results["censored"] = censored;
  json config = model_json(mopts);
  config["seed"] = common.seed;
  config["n"] = n;
  config["replicates"] = reps;
  config["horizon"] = horizon;
  config["eps"] = eps;
  write_manifest(common.out, "naive", config, results);
  std::cout << "naive runs: mean MRCA " << stat.mean() << ", censored " << censored << "\n";
  return 0;
}

// ---- sfs experiment ----------------------------------------------------------

int cmd_sfs(const CommonOpts& common, std::vector<double> psis, double lambda, int n,
            std::uint64_t pedigrees, std::uint64_t loci, double theta) {
  ensure_outdir(common.out);
  CsvWriter sfs_csv(opath(common.out, "sfs.csv"),
                    {"psi", "pedigree_id", "i", "proportion", "stderr"});
  CsvWriter ttotal(opath(common.out, "ttotal.csv"),
                   {"psi", "pedigree_id", "mean_t_total", "loci"});
  std::unique_ptr<CsvWriter> mut;
  if (theta > 0)
    mut = std::make_unique<CsvWriter>(
        opath(common.out, "mutation_sfs.csv"),
        std::vector<std::string>{"psi", "pedigree_id", "i", "count"});
  json dispersions = json::array();
  for (const double psi : psis) {
    std::vector<SfsAccumulator> acc(pedigrees, SfsAccumulator(n));
    std::vector<std::vector<std::uint64_t>> mut_counts(
        pedigrees, std::vector<std::uint64_t>(n > 1 ? n - 1 : 0, 0));
    parallel_for(pedigrees, common.threads, [&](std::uint64_t p) {
      DeltaPedigree ped(lambda,
                        RngStream(common.seed, "ped", static_cast<std::uint64_t>(psi * 1e6), p)
                            .next_u64());
      for (std::uint64_t l = 0; l < loci; ++l) {
        RngStream rng(common.seed, "locus", static_cast<std::uint64_t>(psi * 1e6) + p, l);
        const auto spec = delta_model_spectrum(ped, psi, n, rng);
        acc[p].add(spec);
        if (theta > 0) {
          RngStream mrng(common.seed, "mut", static_cast<std::uint64_t>(psi * 1e6) + p, l);
          const auto s = sample_mutation_sfs(spec, theta, mrng);
          for (std::size_t i = 0; i < s.size(); ++i) mut_counts[p][i] += s[i];
        }
      }
    });
    std::vector<std::vector<double>> sfs(pedigrees);
    for (std::uint64_t p = 0; p < pedigrees; ++p) {
      sfs[p] = acc[p].sfs();
      const auto se = acc[p].sfs_stderr();
      for (int i = 1; i < n; ++i)
        sfs_csv.row({CsvWriter::num(psi), CsvWriter::num(p), CsvWriter::num(i),
                     CsvWriter::num(sfs[p][i - 1]), CsvWriter::num(se[i - 1])});
      ttotal.row({CsvWriter::num(psi), CsvWriter::num(p),
                  CsvWriter::num(acc[p].mean_t_total()), CsvWriter::num(acc[p].loci())});
      if (mut)
        for (int i = 1; i < n; ++i)
          mut->row({CsvWriter::num(psi), CsvWriter::num(p), CsvWriter::num(i),
                    CsvWriter::num(mut_counts[p][i - 1])});
    }
    double disp = 0.0;
    for (std::uint64_t a = 0; a < pedigrees; ++a)
      for (std::uint64_t b = a + 1; b < pedigrees; ++b)
        disp = std::max(disp, total_variation(sfs[a], sfs[b]));
    dispersions.push_back({{"psi", psi}, {"max_pairwise_tv", disp}});
  }
  json results;
  results["dispersion"] = dispersions;
  results["sfs_mode"] = theta > 0 ? "branch-lengths+poisson-mutations" : "branch-lengths";
  json config;
  config["seed"] = common.seed;
  config["psi"] = psis;
  config["lambda"] = lambda;
  config["n"] = n;
  config["pedigrees"] = pedigrees;
  config["loci"] = loci;
  config["theta"] = theta;
  write_manifest(common.out, "sfs", config, results);
  std::cout << "sfs experiment written to " << common.out << "\n";
  return 0;
}

// ---- vardecomp experiment ------------------------------------------------------

int cmd_vardecomp(const CommonOpts& common, std::vector<double> psis, double lambda, int n,
                  std::uint64_t pedigrees, std::uint64_t loci, std::uint64_t direct_reps) {
  ensure_outdir(common.out);
  CsvWriter out(opath(common.out, "vardecomp.csv"),
                {"psi", "total_panel", "total_direct", "within", "between", "frac_within",
                 "frac_between", "within_se", "between_se", "frac_within_se",
                 "between_clamped", "mean_t_total"});
  json rows = json::array();
  for (const double psi : psis) {
    const auto vd = variance_decomposition(psi, lambda, n, pedigrees, loci, direct_reps,
                                           common.seed);
    out.row({CsvWriter::num(psi), CsvWriter::num(vd.total_panel),
             CsvWriter::num(vd.total_direct), CsvWriter::num(vd.within),
             CsvWriter::num(vd.between), CsvWriter::num(vd.frac_within),
             CsvWriter::num(vd.frac_between), CsvWriter::num(vd.within_se),
             CsvWriter::num(vd.between_se), CsvWriter::num(vd.frac_within_se),
             vd.between_clamped ? "1" : "0", CsvWriter::num(vd.mean_t_total)});
    rows.push_back({{"psi", psi},
                    {"frac_within", vd.frac_within},
                    {"frac_between", vd.frac_between}});
    std::cout << "psi=" << psi << " frac_within=" << vd.frac_within
              << " frac_between=" << vd.frac_between << "\n";
  }
  json config;
  config["seed"] = common.seed;
  config["psi"] = psis;
  config["lambda"] = lambda;
  config["n"] = n;
  config["pedigrees"] = pedigrees;
  config["loci"] = loci;
  config["direct_reps"] = direct_reps;
  write_manifest(common.out, "vardecomp", config, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pedcoal: diploid Cannings pedigrees, quenched gene genealogies and "
               "inhomogeneous multiple-merger coalescents"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file (flags win)");
  app.failure_message(CLI::FailureMessage::help);

  CommonOpts common;
  ModelOpts mopts;

  // pedigree
  auto* pedigree = app.add_subcommand("pedigree", "sample offspring matrices and slices");
  std::uint64_t gens = 10, cn_reps = 100000;
  add_common(pedigree, common);
  add_model(pedigree, mopts);
  pedigree->add_option("--gens", gens, "generations to export");
  pedigree->add_option("--cn-reps", cn_reps, "Monte Carlo draws for the c_N estimate");

  // quenched
  auto* quenched = app.add_subcommand("quenched", "exact genealogies on one pedigree");
  int n = 10;
  std::uint64_t loci = 100;
  double horizon_rescaled = 30.0;
  bool dump_trees = false;
  add_common(quenched, common);
  add_model(quenched, mopts);
  quenched->add_option("--n", n, "sample size");
  quenched->add_option("--loci", loci, "loci on the shared pedigree");
  quenched->add_option("--horizon", horizon_rescaled, "censoring horizon in rescaled time");
  quenched->add_option("--cn-reps", cn_reps, "Monte Carlo draws for the c_N estimate");
  quenched->add_flag("--dump-trees", dump_trees, "write per-locus coalescence events");

  // limit
  auto* limit = app.add_subcommand("limit", "inhomogeneous (Psi,c)-coalescent runs");
  std::string kind = "kingman";
  std::uint64_t reps = 1000;
  double horizon = 30.0, rate = 1.0, alpha = 1.5, eps = 0.02;
  std::vector<double> weights;
  double c_pair_flag = -1.0;
  std::string import_psi, export_psi;
  bool dump_events = false;
  add_common(limit, common);
  add_model(limit, mopts);
  limit->add_option("--intensity", kind,
                    "kingman | point-mass | beta2 | beta4 | model | empirical");
  limit->add_option("--n", n, "sample size");
  limit->add_option("--reps", reps, "replicates");
  limit->add_option("--horizon", horizon, "time horizon");
  limit->add_option("--rate", rate, "point-mass atom rate");
  limit->add_option("--weights", weights, "point-mass paintbox weights");
  limit->add_option("--c-pair", c_pair_flag, "Kingman pair rate");
  limit->add_option("--int-alpha", alpha, "Beta intensity exponent");
  limit->add_option("--eps", eps, "truncation / empirical cutoff");
  limit->add_option("--import-psi", import_psi, "read a psi path from file");
  limit->add_option("--export-psi", export_psi, "write the psi path to file");
  limit->add_option("--cn-reps", cn_reps, "Monte Carlo draws for the c_N estimate");
  limit->add_flag("--dump-events", dump_events, "write per-replicate event lists");

  // naive
  auto* naive = app.add_subcommand("naive", "epsilon-naive prelimit coalescent");
  add_common(naive, common);
  add_model(naive, mopts);
  naive->add_option("--n", n, "sample size");
  naive->add_option("--reps", reps, "replicates");
  naive->add_option("--horizon", horizon, "rescaled-time horizon");
  naive->add_option("--eps", eps, "paintbox norm cutoff");
  naive->add_option("--c-pair", c_pair_flag, "limiting Kingman pair rate");
  naive->add_option("--cn-reps", cn_reps, "Monte Carlo draws for the c_N estimate");

  // sfs
  auto* sfs = app.add_subcommand("sfs", "delta-model site-frequency spectra per pedigree");
  std::vector<double> psis = {0.1, 0.5, 0.9};
  double lambda = 1e6, theta = 0.0;
  std::uint64_t pedigrees = 5;
  add_common(sfs, common);
  sfs->add_option("--psi", psis, "large-family fractions");
  sfs->add_option("--lambda", lambda, "large-family rate relative to Kingman");
  sfs->add_option("--n", n, "sample size");
  sfs->add_option("--pedigrees", pedigrees, "independent pedigrees");
  sfs->add_option("--loci", loci, "loci per pedigree");
  sfs->add_option("--theta", theta, "optional mutation rate for integer SFS");

  // vardecomp
  auto* vardecomp = app.add_subcommand("vardecomp", "law-of-total-variance decomposition");
  std::uint64_t direct_reps = 2000;
  add_common(vardecomp, common);
  vardecomp->add_option("--psi", psis, "large-family fractions");
  vardecomp->add_option("--lambda", lambda, "large-family rate relative to Kingman");
  vardecomp->add_option("--n", n, "sample size");
  vardecomp->add_option("--pedigrees", pedigrees, "pedigrees P");
  vardecomp->add_option("--loci", loci, "loci per pedigree L");
  vardecomp->add_option("--direct-reps", direct_reps,
                        "fresh-pedigree single-locus replicates");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  int only = 0;
  int st_threads = 1;
  selftest->add_option("--only", only, "run a single criterion (1..10)");
  selftest->add_option("--threads", st_threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (pedigree->parsed()) return cmd_pedigree(common, mopts, gens, cn_reps);
    if (quenched->parsed())
      return cmd_quenched(common, mopts, n, loci, horizon_rescaled, cn_reps, dump_trees);
    if (limit->parsed()) {
      std::optional<double> cp;
      if (c_pair_flag >= 0) cp = c_pair_flag;
      return cmd_limit(common, mopts, kind, n, reps, horizon, rate, weights, cp, alpha, eps,
                       import_psi, export_psi, cn_reps, dump_events);
    }
    if (naive->parsed()) {
      std::optional<double> cp;
      if (c_pair_flag >= 0) cp = c_pair_flag;
      return cmd_naive(common, mopts, n, reps, horizon, eps, cp, cn_reps);
    }
    if (sfs->parsed()) return cmd_sfs(common, psis, lambda, n, pedigrees, loci, theta);
    if (vardecomp->parsed())
      return cmd_vardecomp(common, psis, lambda, n, pedigrees, loci, direct_reps);
    if (selftest->parsed()) {
      const auto results = run_acceptance(std::cout, st_threads, only);
      return all_passed(results) ? 0 : 3;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
