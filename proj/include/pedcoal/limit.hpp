#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pedcoal/cannings.hpp"
#include "pedcoal/paintbox.hpp"
#include "pedcoal/partition.hpp"
#include "pedcoal/rng.hpp"

namespace pedcoal {

struct PsiAtom {
  double t = 0.0;
  Paintbox x;
};

// Time-ordered atoms (t, x) driving the inhomogeneous coalescent, with a
// finite horizon up to which the path is materialized.
struct PsiPath {
  std::vector<PsiAtom> atoms;  // strictly increasing times in (0, horizon]
  double horizon = 0.0;
  std::string descriptor;

  void validate() const;  // strictly increasing times, finite l2 mass
};

// ---- Intensity catalog ------------------------------------------------------

struct KingmanIntensity {};  // no atoms, c_pair = 1

struct PointMassIntensity {
  double rate = 0.0;  // atoms per unit rescaled time
  Paintbox x;
  double c_pair = 0.0;
};

// Xi(dz) = Beta(2-alpha, alpha)(dz) carried on atoms (z/4,...,z/4) with
// `fold` entries; truncated to z >= eps. Discarded small-z atoms are exactly
// compensated by an additional pair-merger rate equal to their Xi mass.
struct TruncatedBetaIntensity {
  int fold = 2;  // 2: single prolific parent, 4: prolific couple
  double alpha = 1.5;
  double eps = 0.01;
};

using XiIntensity = std::variant<KingmanIntensity, PointMassIntensity, TruncatedBetaIntensity>;

struct IntensityInfo {
  double atom_rate = 0.0;          // Poisson rate of materialized atoms
  double c_pair = 0.0;             // intrinsic Kingman rate of the intensity
  double compensating_rate = 0.0;  // extra pair rate replacing truncated atoms
  double pair_rate_total() const { return c_pair + compensating_rate + atom_pair_rate; }
  double atom_pair_rate = 0.0;     // atom_rate * E<x,x> over the atom law
};

IntensityInfo describe_intensity(const XiIntensity& intensity);

// Point-mass parameters of the limiting intensity for catalog models with a
// known closed form (large-family models and the two-sex star model);
// nullopt for the heavy-tailed models, whose limits are Beta intensities.
std::optional<PointMassIntensity> model_point_mass_intensity(const CanningsModel& model);

PsiPath sample_psi(const XiIntensity& intensity, double horizon, RngStream& rng);

// Retains atoms with l2 norm >= eps.
PsiPath epsilon_cut(const PsiPath& psi, double eps);

// ---- Empirical paths from a pedigree ---------------------------------------

// Per-generation paintbox summary of a pedigree: which generations carry an
// l2 norm >= eps and their paintboxes. Generation k of the scan produces an
// atom at rescaled time (k+1) c_N.
struct PedigreePsiSummary {
  double c_N = 0.0;
  double eps = 0.0;
  std::uint64_t horizon_generations = 0;
  std::vector<std::uint64_t> large_generations;  // scan indices k
  std::vector<Paintbox> large_paintboxes;
};

PedigreePsiSummary build_psi_summary(const Pedigree& pedigree, double eps, double c_N,
                                     std::uint64_t horizon_generations);

PsiPath empirical_psi_path(const PedigreePsiSummary& summary);

// ---- Runs -------------------------------------------------------------------

struct CoalescentRun {
  Partition initial;
  std::vector<std::pair<double, Partition>> events;  // strictly coarsening
  double end_time = 0.0;  // MRCA time, or the horizon when censored
  bool censored = false;

  double mrca_time() const {
    return censored ? std::numeric_limits<double>::infinity() : end_time;
  }
  const Partition& state_at(double t) const;
  int final_block_count() const {
    return events.empty() ? initial.block_count() : events.back().second.block_count();
  }
};

// Sequential source of atoms, increasing in time. next(up_to) yields the next
// atom with t <= up_to, or nullptr when none remains below that bound; the
// pointer stays valid until the following call.
class AtomStream {
 public:
  virtual ~AtomStream() = default;
  virtual const PsiAtom* next(double up_to) = 0;
};

class PathAtomStream : public AtomStream {
 public:
  explicit PathAtomStream(const PsiPath& path) : path_(&path) {}
  const PsiAtom* next(double up_to) override;

 private:
  const PsiPath* path_;
  std::size_t idx_ = 0;
};

// Lazily generated atoms of a catalog intensity; for heavy-tailed intensities
// this avoids materializing paths with very many atoms.
class IntensityAtomStream : public AtomStream {
 public:
  IntensityAtomStream(const XiIntensity& intensity, RngStream rng);
  const PsiAtom* next(double up_to) override;

 private:
  RngStream rng_;
  double rate_ = 0.0;
  bool is_beta_ = false;
  int fold_ = 2;
  double alpha_ = 1.5;
  double eps_pow_ = 0.0;  // eps^-alpha, cached for inverse-CDF proposals
  PsiAtom scratch_;
  bool pending_ = false;
};

// Chronological coagulator composition: at each atom draw a merger on the
// current block count, between atoms merge uniform pairs at rate c per pair.
CoalescentRun run_flow(AtomStream& atoms, double c, const Partition& xi0, double horizon,
                       RngStream& rng);
CoalescentRun run_flow(const PsiPath& psi, double c, const Partition& xi0, double horizon,
                       RngStream& rng);

// Jump-hold sampler: effective jumps are drawn from the first-jump law built
// on the non-coalescence weights; distributionally identical to run_flow.
CoalescentRun run_jump_hold(AtomStream& atoms, double c, const Partition& xi0,
                            double horizon, RngStream& rng);
CoalescentRun run_jump_hold(const PsiPath& psi, double c, const Partition& xi0,
                            double horizon, RngStream& rng);

// Discrete prelimit chain on the grid c_N * {1,2,...}: paintbox mergers in
// generations whose norm clears the cutoff, independent pair coalescences
// with probability c_N * c_pair per pair elsewhere.
CoalescentRun run_naive(const PedigreePsiSummary& summary, double c_pair,
                        const Partition& xi0, RngStream& rng);

// ---- Serialization ----------------------------------------------------------

std::string psi_path_to_text(const PsiPath& path);
PsiPath psi_path_from_text(const std::string& text);

}  // namespace pedcoal
