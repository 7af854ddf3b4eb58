#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pedcoal/paintbox.hpp"
#include "pedcoal/rng.hpp"

namespace pedcoal {

// ---- Model catalog ---------------------------------------------------------

struct WrightFisher {
  int N = 0;
};

// Multinomial offspring with weights W_i W_j / Z; W i.i.d. fitness values.
struct RandomFitness {
  enum class Law { FiniteVariance, ParetoTail };
  int N = 0;
  Law law = Law::FiniteVariance;
  double alpha = 1.5;  // tail exponent, Pareto only; in (1,2) for heavy tails
  double c_w = 1.0;    // tail constant, P(W >= z) = c_w z^-alpha
};

// Potential offspring X_{i,j} per couple, i.i.d., P(X>0) ~ c/N; the next
// generation samples N of the potential children without replacement.
struct GWCouples {
  enum class Law { PoissonPositive, ParetoInt };
  int N = 0;
  double c = 1.0;       // couple activity constant
  Law law = Law::PoissonPositive;
  double mu = 8.0;      // Poisson mean (conditioned positive)
  double alpha = 1.5;   // integer Pareto tail exponent
};

// One uniformly chosen couple has floor(psi N) children with probability
// N^-gamma, else a single child; the rest reproduce Wright-Fisher style.
struct LargeFamilyCouple {
  int N = 0;
  double psi = 0.5;
  double gamma = 1.0;
};

// One uniformly chosen individual has floor(psi N) children with independent
// uniform partners with probability N^-gamma, else a single child.
struct LargeFamilyIndividual {
  int N = 0;
  double psi = 0.5;
  double gamma = 1.0;
};

// Two-sex wrapper: sexes assigned uniformly each generation, offspring from a
// separately exchangeable inner array. The inner model is a two-sex
// Wright-Fisher with an occasional highly reproductive sex-1 individual.
struct TwoSex {
  int N = 0;
  double r = 0.5;       // fraction of sex-1 individuals
  double lambda = 0.0;  // star-individual probability is lambda / N
  double beta = 0.5;    // star family fraction of the population
};

using CanningsModel = std::variant<WrightFisher, RandomFitness, GWCouples,
                                   LargeFamilyCouple, LargeFamilyIndividual, TwoSex>;

int model_population_size(const CanningsModel& model);
std::string model_name(const CanningsModel& model);
// Throws std::invalid_argument on out-of-domain parameters.
void validate_model(const CanningsModel& model);

// Limiting Kingman pair rate 1 - Xi(Delta \ {0}) where the catalog provides a
// closed form; nullopt otherwise.
std::optional<double> model_c_pair(const CanningsModel& model);
// Closed-form annealed pair coalescence probability where known (WF: 1/(2N)).
std::optional<double> model_c_N_closed_form(const CanningsModel& model);

// ---- Offspring matrices and pedigrees --------------------------------------

// Symmetric offspring counts V_{i,j} with zero diagonal, stored sparsely.
struct OffspringMatrix {
  struct Family {
    std::uint32_t i, j;  // 1-based parents, i < j
    std::uint32_t count;
  };
  int N = 0;
  std::vector<Family> families;  // sorted by (i, j)
  std::vector<std::uint32_t> totals;  // V_i, index i-1; sums to 2N

  std::uint32_t entry(int i, int j) const;
  void validate() const;  // integer identities of the model
  std::uint64_t digest() const;
};

struct SampleDiagnostics {
  std::uint64_t gw_rejections = 0;       // redraws with too few potential children
  std::uint64_t fitness_redraws = 0;     // Z_N == 0 redraws
};

// One generation of unordered parent pairs, one entry per child; the raw form
// underlying the matrix (order carries no meaning).
std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_child_pairs(
    const CanningsModel& model, RngStream& rng, SampleDiagnostics* diag = nullptr);

OffspringMatrix sample_offspring_matrix(const CanningsModel& model, RngStream& rng,
                                        SampleDiagnostics* diag = nullptr);

// Fills totals[i-1] = V_i without building the sorted matrix.
void sample_totals(const CanningsModel& model, RngStream& rng,
                   std::vector<std::uint32_t>& totals, SampleDiagnostics* diag = nullptr);

// Two-sex embedding exposed directly: wraps a caller-supplied inner array of
// per-(sex1, sex2) offspring counts into a valid symmetric V.
OffspringMatrix two_sex_wrap(int N, double r,
                             const std::vector<std::vector<std::uint32_t>>& inner,
                             RngStream& rng);

// Realized parental roles of one generation.
struct PedigreeSlice {
  int N = 0;
  std::vector<std::uint32_t> p0;  // 0-parent of child k (1-based), index k-1
  std::vector<std::uint32_t> p1;
  std::uint64_t source_digest = 0;
};

// Uniform balls-in-boxes matching of children to parent-pair boxes followed
// by independent fair role coins.
PedigreeSlice realize_slice(const OffspringMatrix& V, RngStream& rng);

// Lazily generated pedigree: slice g is a pure function of (seed, g), so
// shared use across loci and threads never stores more than one generation.
class Pedigree {
 public:
  Pedigree(CanningsModel model, std::uint64_t seed)
      : model_(std::move(model)), seed_(seed) {
    validate_model(model_);
  }

  int N() const { return model_population_size(model_); }
  const CanningsModel& model() const { return model_; }
  std::uint64_t seed() const { return seed_; }

  OffspringMatrix matrix_at(std::uint64_t g) const;
  PedigreeSlice slice_at(std::uint64_t g) const;

 private:
  CanningsModel model_;
  std::uint64_t seed_;
};

// Ranked total-offspring frequencies pushed through the doubling map:
// (V_(1)/4N, V_(1)/4N, V_(2)/4N, ...). Total mass is exactly 1.
Paintbox generation_paintbox(const OffspringMatrix& V);
Paintbox generation_paintbox(int N, const std::vector<std::uint32_t>& totals);

struct EstimateWithError {
  double value = 0.0;
  double stderr_ = 0.0;
  std::optional<double> closed_form;
};

// Monte Carlo estimate of the annealed pair coalescence probability
// E[(V_1)_{2 down}] / (8(N-1)); attaches the closed form when the catalog
// has one.
EstimateWithError pair_coalescence_prob(const CanningsModel& model,
                                        std::uint64_t mc_reps, RngStream& rng);

}  // namespace pedcoal
