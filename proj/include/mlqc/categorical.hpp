#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlqc/result.hpp"
#include "mlqc/special.hpp"

// Drift measures on categorical label distributions (multinomial counts).

namespace mlqc {

// Label -> count vector with a fixed label order and total N.
class CategoricalCounts {
 public:
  CategoricalCounts(std::vector<std::string> labels,
                    std::vector<std::uint64_t> counts)
      : labels_(std::move(labels)), counts_(std::move(counts)) {
    if (labels_.size() != counts_.size())
      throw std::invalid_argument("CategoricalCounts: size mismatch");
    if (labels_.empty())
      throw std::invalid_argument("CategoricalCounts: empty");
    for (std::size_t i = 0; i < labels_.size(); ++i)
      for (std::size_t j = i + 1; j < labels_.size(); ++j)
        if (labels_[i] == labels_[j])
          throw std::invalid_argument("CategoricalCounts: duplicate label '" +
                                      labels_[i] + "'");
    for (std::uint64_t c : counts_) total_ += c;
    if (total_ == 0)
      throw std::invalid_argument("CategoricalCounts: total count is zero");
  }

  static CategoricalCounts from_values(const std::vector<std::string>& values) {
    std::map<std::string, std::uint64_t> tally;
    for (const auto& v : values) ++tally[v];
    std::vector<std::string> labels;
    std::vector<std::uint64_t> counts;
    for (const auto& [label, count] : tally) {
      labels.push_back(label);
      counts.push_back(count);
    }
    return CategoricalCounts(std::move(labels), std::move(counts));
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }

  std::vector<double> proportions() const {
    std::vector<double> p(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i)
      p[i] = static_cast<double>(counts_[i]) / static_cast<double>(total_);
    return p;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct ProportionPair {
  std::uint64_t successes_a = 0;
  std::uint64_t trials_a = 0;
  std::uint64_t successes_b = 0;
  std::uint64_t trials_b = 0;

  ProportionPair(std::uint64_t sa, std::uint64_t ta, std::uint64_t sb,
                 std::uint64_t tb)
      : successes_a(sa), trials_a(ta), successes_b(sb), trials_b(tb) {
    if (ta == 0 || tb == 0)
      throw std::invalid_argument("ProportionPair: trials must be >= 1");
    if (sa > ta || sb > tb)
      throw std::invalid_argument("ProportionPair: successes > trials");
  }

  double proportion_a() const {
    return static_cast<double>(successes_a) / static_cast<double>(trials_a);
  }
  double proportion_b() const {
    return static_cast<double>(successes_b) / static_cast<double>(trials_b);
  }
};

namespace detail {

// Align two count vectors on the union label set: a's label order first,
// then b's unseen labels in their own order. Missing labels count 0.
struct UnifiedCounts {
  std::vector<std::string> labels;
  std::vector<double> count_a;
  std::vector<double> count_b;
  std::vector<double> p;  // proportions of a
  std::vector<double> q;  // proportions of b
};

inline UnifiedCounts unify(const CategoricalCounts& a,
                           const CategoricalCounts& b) {
  UnifiedCounts u;
  u.labels = a.labels();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < u.labels.size(); ++i) index[u.labels[i]] = i;
  for (const auto& label : b.labels())
    if (index.find(label) == index.end()) {
      index[label] = u.labels.size();
      u.labels.push_back(label);
    }
  u.count_a.assign(u.labels.size(), 0.0);
  u.count_b.assign(u.labels.size(), 0.0);
  u.p.assign(u.labels.size(), 0.0);
  u.q.assign(u.labels.size(), 0.0);
  for (std::size_t i = 0; i < a.labels().size(); ++i) {
    const std::size_t at = index[a.labels()[i]];
    u.count_a[at] = static_cast<double>(a.counts()[i]);
    u.p[at] =
        static_cast<double>(a.counts()[i]) / static_cast<double>(a.total());
  }
  for (std::size_t i = 0; i < b.labels().size(); ++i) {
    const std::size_t at = index[b.labels()[i]];
    u.count_b[at] = static_cast<double>(b.counts()[i]);
    u.q[at] =
        static_cast<double>(b.counts()[i]) / static_cast<double>(b.total());
  }
  return u;
}

}  // namespace detail

// One-way chi-square goodness of fit of observed against expected counts.
// The test is asymmetric and requires equal totals; unequal N yields a
// not-applicable result rather than a silently rescaled statistic.
inline TestResult chi_square_gof(const CategoricalCounts& expected,
                                 const CategoricalCounts& observed,
                                 double alpha = 0.05) {
  TestResult r;
  r.test_name = "chi_square_gof";
  r.alpha_or_threshold = alpha;
  if (expected.total() != observed.total()) {
    r.decision = Decision::not_applicable;
    return r;
  }
  const auto u = detail::unify(expected, observed);
  double stat = 0.0;
  for (std::size_t i = 0; i < u.labels.size(); ++i) {
    const double exp_count = u.count_a[i];
    const double obs_count = u.count_b[i];
    if (exp_count == 0.0)
      throw std::domain_error("chi_square_gof: zero expected count for '" +
                              u.labels[i] + "'");
    stat += (obs_count - exp_count) * (obs_count - exp_count) / exp_count;
  }
  const double df = static_cast<double>(u.labels.size()) - 1.0;
  r.statistic = stat;
  r.p_value = PValue{df > 0.0 ? chi_square_sf(df, stat) : 1.0,
                     PValueSource::analytic,
                     {}};
  r.decision = detail::decide_by_p(r.p_value->value, alpha);
  return r;
}

// Cohen's w = sqrt(sum (q_i - p_i)^2 / p_i) over the expected-side
// proportions p_i. Undefined whenever a label present anywhere has zero
// expected proportion. Totals may differ; only proportions enter.
inline TestResult cohens_w(const CategoricalCounts& expected,
                           const CategoricalCounts& observed,
                           double threshold = 0.5) {
  const auto u = detail::unify(expected, observed);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.labels.size(); ++i) {
    if (u.p[i] == 0.0)
      throw std::domain_error("cohens_w: undefined, zero expected proportion for '" +
                              u.labels[i] + "'");
    sum += (u.q[i] - u.p[i]) * (u.q[i] - u.p[i]) / u.p[i];
  }
  const double w = std::sqrt(sum);
  TestResult r;
  r.test_name = "cohens_w";
  r.statistic = w;
  r.effect_size = w;
  r.effect_label = effect_label_w(w);
  r.alpha_or_threshold = threshold;
  r.decision = detail::decide_by_effect(w, threshold);
  return r;
}

// Cohen's h = arcsin(sqrt(pi_1)) - arcsin(sqrt(pi_2)). Note: no factor 2 in
// front of the arcsines; the convention here keeps the plain difference, so
// values are half the textbook-doubled variant. Labels use 0.2/0.5/0.8.
inline TestResult cohens_h(const ProportionPair& pair,
                           double threshold = 0.5) {
  const double h = std::asin(std::sqrt(pair.proportion_a())) -
                   std::asin(std::sqrt(pair.proportion_b()));
  TestResult r;
  r.test_name = "cohens_h";
  r.statistic = h;
  r.effect_size = h;
  r.effect_label = effect_label_dh(h);
  r.alpha_or_threshold = threshold;
  r.decision = detail::decide_by_effect(h, threshold);
  return r;
}

// Dissimilarity index 0.5 * sum |p_i - q_i| with the < 0.03 closeness rule.
inline TestResult dissimilarity_index(const CategoricalCounts& a,
                                      const CategoricalCounts& b,
                                      double threshold = 0.03) {
  const auto u = detail::unify(a, b);
  double delta = 0.0;
  for (std::size_t i = 0; i < u.labels.size(); ++i)
    delta += std::fabs(u.p[i] - u.q[i]);
  delta *= 0.5;
  TestResult r;
  r.test_name = "dissimilarity_index";
  r.statistic = delta;
  r.effect_size = delta;
  r.alpha_or_threshold = threshold;
  r.decision = detail::decide_by_effect(delta, threshold);
  return r;
}

// Hellinger distance sqrt(1 - B) where B is the Bhattacharyya coefficient.
// A label missing on one side contributes nothing to B (the proportions are
// multiplied), so one-sided novel labels are invisible to H.
inline double hellinger(const CategoricalCounts& a,
                        const CategoricalCounts& b) {
  const auto u = detail::unify(a, b);
  double bc = 0.0;
  for (std::size_t i = 0; i < u.labels.size(); ++i)
    bc += std::sqrt(u.p[i] * u.q[i]);
  return std::sqrt(std::max(0.0, 1.0 - bc));
}

// KL divergence over the common support (indices where both are non-zero),
// in the given log base. Disjoint supports leave nothing to sum over:
// nullopt. Non-negativity is only guaranteed when p's support is contained
// in q's.
inline std::optional<double> kl_divergence(const std::vector<double>& p,
                                           const std::vector<double>& q,
                                           double base = 2.718281828459045) {
  if (p.size() != q.size())
    throw std::invalid_argument("kl_divergence: size mismatch");
  if (!(base > 1.0)) throw std::invalid_argument("kl_divergence: base <= 1");
  double sum = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] > 0.0) {
      sum += p[i] * std::log(p[i] / q[i]);
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return sum / std::log(base);
}

struct JsDistanceResult {
  double distance = 0.0;
  std::string most_divergent_label;
};

// Jensen-Shannon distance: sqrt of the JS divergence against the pointwise
// mean, bounded by 1 in base 2. Also reports the label contributing most to
// the divergence.
inline JsDistanceResult js_distance(const CategoricalCounts& a,
                                    const CategoricalCounts& b,
                                    double base = 2.0) {
  if (!(base > 1.0)) throw std::invalid_argument("js_distance: base <= 1");
  const auto u = detail::unify(a, b);
  const double log_base = std::log(base);
  double divergence = 0.0;
  double best_term = -1.0;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < u.labels.size(); ++i) {
    const double m = 0.5 * (u.p[i] + u.q[i]);
    double term = 0.0;
    if (u.p[i] > 0.0) term += u.p[i] * std::log(u.p[i] / m);
    if (u.q[i] > 0.0) term += u.q[i] * std::log(u.q[i] / m);
    divergence += term;
    if (term > best_term) {
      best_term = term;
      best_index = i;
    }
  }
  divergence /= 2.0 * log_base;
  const double bound = std::log(2.0) / log_base;
  divergence = std::min(bound, std::max(0.0, divergence));
  JsDistanceResult r;
  r.distance = std::sqrt(divergence);
  r.most_divergent_label = u.labels[best_index];
  return r;
}

// Difference-in-proportions test: 2x2 chi-square with Yates' continuity
// correction, clamped to 0 when the correction exceeds the raw difference.
// A degenerate margin (all successes or all failures pooled) leaves the
// statistic undefined.
inline TestResult yates_diff_proportions(const ProportionPair& pair,
                                         double alpha = 0.05) {
  const double n11 = static_cast<double>(pair.successes_a);
  const double n12 = static_cast<double>(pair.trials_a - pair.successes_a);
  const double n21 = static_cast<double>(pair.successes_b);
  const double n22 = static_cast<double>(pair.trials_b - pair.successes_b);
  const double n = n11 + n12 + n21 + n22;
  const double row1 = n11 + n12;
  const double row2 = n21 + n22;
  const double col1 = n11 + n21;
  const double col2 = n12 + n22;
  TestResult r;
  r.test_name = "yates_diff_proportions";
  r.alpha_or_threshold = alpha;
  if (row1 == 0.0 || row2 == 0.0 || col1 == 0.0 || col2 == 0.0) {
    r.decision = Decision::not_applicable;
    return r;
  }
  const double corrected = std::max(0.0, std::fabs(n11 * n22 - n12 * n21) - 0.5 * n);
  const double stat = n * corrected * corrected / (row1 * row2 * col1 * col2);
  r.statistic = stat;
  r.p_value = PValue{chi_square_sf(1.0, stat), PValueSource::analytic, {}};
  r.decision = detail::decide_by_p(r.p_value->value, alpha);
  return r;
}

}  // namespace mlqc
