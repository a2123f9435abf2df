#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlqc/result.hpp"
#include "mlqc/sample.hpp"
#include "mlqc/special.hpp"

// Two-sample drift measures on numeric features. Each test returns a
// TestResult; Wasserstein is a bare distance (no decision rule of its own).

namespace mlqc {

namespace detail {

inline std::vector<double> sorted_copy(const Sample& s) {
  std::vector<double> v = s.values();
  std::sort(v.begin(), v.end());
  return v;
}

// Fraction of sorted values <= x.
inline double ecdf_at(const std::vector<double>& sorted, double x) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) /
         static_cast<double>(sorted.size());
}

// Midranks of the pooled vector (ties share the average rank).
inline std::vector<double> midranks(const std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return pooled[i] < pooled[j];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

// Kolmogorov-Smirnov: D = sup |F_a - F_b| over the pooled points, asymptotic
// p-value from the Kolmogorov distribution at sqrt(na*nb/(na+nb)) * D.
inline TestResult ks_two_sample(const Sample& a, const Sample& b,
                                double alpha = 0.05) {
  const std::vector<double> sa = detail::sorted_copy(a);
  const std::vector<double> sb = detail::sorted_copy(b);
  double d = 0.0;
  for (const auto* side : {&sa, &sb}) {
    for (double x : *side)
      d = std::max(d, std::fabs(detail::ecdf_at(sa, x) - detail::ecdf_at(sb, x)));
  }
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  const double lambda = std::sqrt(na * nb / (na + nb)) * d;
  TestResult r;
  r.test_name = "ks_two_sample";
  r.statistic = d;
  r.p_value = PValue{kolmogorov_sf(lambda), PValueSource::analytic, {}};
  r.alpha_or_threshold = alpha;
  r.decision = detail::decide_by_p(r.p_value->value, alpha);
  return r;
}

// Welch's t-test with Welch-Satterthwaite degrees of freedom, two-sided.
inline TestResult welch_t(const Sample& a, const Sample& b,
                          double alpha = 0.05) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("welch_t: needs n >= 2 per side");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = a.variance();
  const double vb = b.variance();
  if (va == 0.0 && vb == 0.0)
    throw std::domain_error("welch_t: zero variance in both samples");
  const double se2 = va / na + vb / nb;
  const double t = (a.mean() - b.mean()) / std::sqrt(se2);
  const double df =
      se2 * se2 /
      (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
  TestResult r;
  r.test_name = "welch_t";
  r.statistic = t;
  r.p_value = PValue{student_t_two_sided(t, df), PValueSource::analytic, {}};
  r.alpha_or_threshold = alpha;
  r.decision = detail::decide_by_p(r.p_value->value, alpha);
  return r;
}

// Mann-Whitney U with midrank ties, tie-corrected normal approximation and
// continuity correction, two-sided. All pooled values identical means the
// variance collapses and no decision is possible.
inline TestResult mann_whitney(const Sample& a, const Sample& b,
                               double alpha = 0.05) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  std::vector<double> pooled = a.values();
  pooled.insert(pooled.end(), b.values().begin(), b.values().end());
  const std::vector<double> ranks = detail::midranks(pooled);

  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];
  const double u =
      rank_sum_a - 0.5 * static_cast<double>(na) * (static_cast<double>(na) + 1.0);

  const double dn = static_cast<double>(na) + static_cast<double>(nb);
  double tie_sum = 0.0;
  {
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_sum += t * t * t - t;
      i = j + 1;
    }
  }
  const double variance = static_cast<double>(na) * static_cast<double>(nb) /
                          12.0 *
                          ((dn + 1.0) - tie_sum / (dn * (dn - 1.0)));

  TestResult r;
  r.test_name = "mann_whitney";
  r.statistic = u;
  r.alpha_or_threshold = alpha;
  if (variance <= 0.0) {
    r.decision = Decision::not_applicable;
    return r;
  }
  const double mu = 0.5 * static_cast<double>(na) * static_cast<double>(nb);
  const double z = std::max(0.0, std::fabs(u - mu) - 0.5) / std::sqrt(variance);
  r.p_value = PValue{std::min(1.0, 2.0 * normal_sf(z)), PValueSource::analytic, {}};
  r.decision = detail::decide_by_p(r.p_value->value, alpha);
  return r;
}

// Exact 1-d Wasserstein distance: integral of |F_a - F_b| between
// consecutive pooled points. For equal sizes this equals the mean absolute
// difference of the paired order statistics.
inline double wasserstein_1d(const Sample& a, const Sample& b) {
  const std::vector<double> sa = detail::sorted_copy(a);
  const std::vector<double> sb = detail::sorted_copy(b);
  std::vector<double> grid;
  grid.reserve(sa.size() + sb.size());
  grid.insert(grid.end(), sa.begin(), sa.end());
  grid.insert(grid.end(), sb.begin(), sb.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double gap = grid[i + 1] - grid[i];
    total += std::fabs(detail::ecdf_at(sa, grid[i]) -
                       detail::ecdf_at(sb, grid[i])) *
             gap;
  }
  return total;
}

// Cohen's d with the pooled standard deviation (divisor na+nb-2), labeled by
// the 0.2/0.5/0.8 thresholds on |d|.
inline TestResult cohens_d(const Sample& a, const Sample& b,
                           double threshold = 0.5) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("cohens_d: needs n >= 2 per side");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double pooled_var =
      ((na - 1.0) * a.variance() + (nb - 1.0) * b.variance()) /
      (na + nb - 2.0);
  if (pooled_var == 0.0)
    throw std::domain_error("cohens_d: zero pooled standard deviation");
  const double d = (a.mean() - b.mean()) / std::sqrt(pooled_var);
  TestResult r;
  r.test_name = "cohens_d";
  r.statistic = d;
  r.effect_size = d;
  r.effect_label = effect_label_dh(d);
  r.alpha_or_threshold = threshold;
  r.decision = detail::decide_by_effect(d, threshold);
  return r;
}

}  // namespace mlqc
