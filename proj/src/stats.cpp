#include "pedcoal/stats.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace pedcoal {

double chi_square_sf(double x, int dof) {
  if (dof <= 0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected,
                               double min_expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  // Pool small-expectation bins together.
  std::vector<double> obs, exp;
  double pool_o = 0.0, pool_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] < min_expected) {
      pool_o += observed[i];
      pool_e += expected[i];
    } else {
      obs.push_back(observed[i]);
      exp.push_back(expected[i]);
    }
  }
  if (pool_e > 0.0) {
    if (pool_e >= min_expected || obs.empty()) {
      obs.push_back(pool_o);
      exp.push_back(pool_e);
    } else {
      obs.back() += pool_o;
      exp.back() += pool_e;
    }
  }
  ChiSquareResult r;
  r.dof = static_cast<int>(obs.size()) - 1;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d = obs[i] - exp[i];
    if (exp[i] > 0) r.statistic += d * d / exp[i];
  }
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_two_sample(const std::vector<double>& a,
                                      const std::vector<double>& b,
                                      double min_expected) {
  if (a.size() != b.size())
    throw std::invalid_argument("chi_square_two_sample: size mismatch");
  double na = 0, nb = 0;
  for (double x : a) na += x;
  for (double x : b) nb += x;
  if (na == 0 || nb == 0) throw std::invalid_argument("chi_square_two_sample: empty sample");

  // Pool categories whose pooled expectation under homogeneity is small.
  std::vector<double> ca, cb;
  double pa = 0, pb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double tot = a[i] + b[i];
    const double min_exp = std::min(na, nb) / (na + nb) * tot;
    if (min_exp < min_expected) {
      pa += a[i];
      pb += b[i];
    } else {
      ca.push_back(a[i]);
      cb.push_back(b[i]);
    }
  }
  if (pa + pb > 0) {
    ca.push_back(pa);
    cb.push_back(pb);
  }
  ChiSquareResult r;
  r.dof = static_cast<int>(ca.size()) - 1;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double tot = ca[i] + cb[i];
    if (tot <= 0) {
      --r.dof;
      continue;
    }
    const double ea = tot * na / (na + nb);
    const double eb = tot * nb / (na + nb);
    r.statistic += (ca[i] - ea) * (ca[i] - ea) / ea + (cb[i] - eb) * (cb[i] - eb) / eb;
  }
  if (r.dof < 1) r.dof = 1;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::fabs(ia / na - ib / nb));
  }
  return d;
}

double ks_vs_cdf(std::vector<double> a, double (*cdf)(double)) {
  if (a.empty()) throw std::invalid_argument("ks_vs_cdf: empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max(d, std::fabs((i + 1) / n - f));
    d = std::max(d, std::fabs(f - i / n));
  }
  return d;
}

double ks_two_sample_critical(std::size_t m, std::size_t n, double alpha) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c * std::sqrt((static_cast<double>(m) + static_cast<double>(n)) /
                       (static_cast<double>(m) * static_cast<double>(n)));
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace pedcoal
