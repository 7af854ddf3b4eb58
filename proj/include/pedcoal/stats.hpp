#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace pedcoal {

// Kahan-compensated accumulator for mean/variance merges across work items.
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    add_comp(sum_, comp_sum_, x);
    add_comp(sum_sq_, comp_sq_, x * x);
  }

  void merge(const RunningStat& o) {
    n_ += o.n_;
    add_comp(sum_, comp_sum_, o.sum_);
    add_comp(sum_sq_, comp_sq_, o.sum_sq_);
  }

  std::uint64_t count() const { return n_; }
  double sum() const { return sum_; }
  double mean() const { return n_ ? sum_ / static_cast<double>(n_) : 0.0; }

  // Unbiased sample variance.
  double variance() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    const double v = (sum_sq_ - sum_ * sum_ / n) / (n - 1.0);
    return v > 0.0 ? v : 0.0;
  }

  double stderror() const {
    return n_ ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  static void add_comp(double& acc, double& comp, double x) {
    const double y = x - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }

  std::uint64_t n_ = 0;
  double sum_ = 0.0, comp_sum_ = 0.0;
  double sum_sq_ = 0.0, comp_sq_ = 0.0;
};

// Pearson chi-square statistic for observed vs expected counts; bins with
// expected count below `min_expected` are pooled into the last kept bin.
// Returns the statistic and the resulting degrees of freedom (bins - 1).
struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected,
                               double min_expected = 5.0);

// Two-sample chi-square homogeneity test over categorical counts.
ChiSquareResult chi_square_two_sample(const std::vector<double>& a,
                                      const std::vector<double>& b,
                                      double min_expected = 5.0);

double chi_square_sf(double x, int dof);  // P(X >= x)

// Two-sample Kolmogorov-Smirnov distance; inputs need not be sorted.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Kolmogorov-Smirnov distance between a sample and a CDF.
double ks_vs_cdf(std::vector<double> a, double (*cdf)(double));

// Asymptotic two-sample KS critical value at significance level alpha.
double ks_two_sample_critical(std::size_t m, std::size_t n, double alpha);

// Total variation distance between two probability vectors of equal length.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace pedcoal
