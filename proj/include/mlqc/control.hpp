#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlqc/rng.hpp"
#include "mlqc/sample.hpp"
#include "mlqc/special.hpp"

namespace mlqc {

enum class IntervalMethod { trimmed, bootstrap, clt };

inline const char* to_string(IntervalMethod m) {
  switch (m) {
    case IntervalMethod::trimmed: return "trimmed";
    case IntervalMethod::bootstrap: return "bootstrap";
    case IntervalMethod::clt: return "clt";
  }
  return "?";
}

struct ControlInterval {
  double lower = 0.0;
  double upper = 0.0;
  double confidence = 0.0;
  IntervalMethod method = IntervalMethod::trimmed;
  std::size_t replicate_count = 0;

  bool contains(double x) const { return lower <= x && x <= upper; }
  double width() const { return upper - lower; }
  bool overlaps(const ControlInterval& other) const {
    return lower <= other.upper && other.lower <= upper;
  }
};

// Named aggregate mapping a Sample to one real. "proportion" is the mean of
// a 0/1 sample; anything else goes through custom().
struct StatisticSpec {
  std::string name;
  std::function<double(const Sample&)> aggregate;

  static StatisticSpec mean() {
    return {"mean", [](const Sample& s) { return s.mean(); }};
  }
  static StatisticSpec proportion() {
    return {"proportion", [](const Sample& s) { return s.mean(); }};
  }
  static StatisticSpec custom(std::string name,
                              std::function<double(const Sample&)> fn) {
    return {std::move(name), std::move(fn)};
  }
};

namespace detail {
// floor(trim * k) with a nudge against 0.3 * 10 = 2.999... style artifacts.
inline std::size_t trim_cut(double trim, std::size_t k) {
  return static_cast<std::size_t>(
      std::floor(trim * static_cast<double>(k) + 1e-9));
}
}  // namespace detail

// Drop floor(trim*k) scores on each side of the sorted list; the interval is
// [rank floor(trim*k)+1, rank k-floor(trim*k)] (1-based order statistics),
// so both endpoints are members of the score list.
inline ControlInterval trimmed_interval(const Sample& scores, double trim) {
  if (!(trim > 0.0 && trim < 0.5))
    throw std::invalid_argument("trimmed_interval: trim outside (0, 0.5)");
  const std::size_t k = scores.size();
  const std::size_t cut = detail::trim_cut(trim, k);
  if (cut < 1)
    throw std::invalid_argument(
        "trimmed_interval: too few scores to trim at this level");
  std::vector<double> sorted = scores.values();
  std::sort(sorted.begin(), sorted.end());
  ControlInterval ci;
  ci.lower = sorted[cut];              // rank cut+1
  ci.upper = sorted[k - cut - 1];      // rank k-cut
  ci.confidence = 1.0 - 2.0 * trim;
  ci.method = IntervalMethod::trimmed;
  ci.replicate_count = k;
  return ci;
}

inline const std::vector<double>& source_items(const Sample& s) {
  return s.values();
}
inline const std::vector<LabeledSample::Item>& source_items(
    const LabeledSample& s) {
  return s.items();
}

// Statistic values over k bootstrap resamples of the source. Replicate i
// draws from its own stream derived from (seed, i), so a parallel schedule
// would produce the same list.
template <typename Source, typename Stat>
std::vector<double> bootstrap_replicates(const Source& source, Stat&& stat,
                                         std::size_t k, std::uint64_t seed) {
  if (k < 100)
    throw std::invalid_argument("bootstrap: needs at least 100 replicates");
  std::vector<double> values;
  values.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Rng rng = Rng::derived(seed, i);
    values.push_back(stat(Source(
        resample_with_replacement(source_items(source), source.size(), rng))));
  }
  return values;
}

template <typename Source, typename Stat>
ControlInterval bootstrap_interval(const Source& source, Stat&& stat,
                                   std::size_t replicates, double trim,
                                   std::uint64_t seed) {
  const std::vector<double> reps = bootstrap_replicates(
      source, std::forward<Stat>(stat), replicates, seed);
  ControlInterval ci = trimmed_interval(Sample(reps), trim);
  ci.method = IntervalMethod::bootstrap;
  ci.replicate_count = replicates;
  return ci;
}

inline ControlInterval bootstrap_interval(const Sample& source,
                                          const StatisticSpec& stat,
                                          std::size_t replicates, double trim,
                                          std::uint64_t seed) {
  return bootstrap_interval(
      source, [&](const Sample& s) { return stat.aggregate(s); }, replicates,
      trim, seed);
}

// Bootstrap interval for the accuracy of a labeled sample.
inline ControlInterval bootstrap_accuracy_interval(const LabeledSample& source,
                                                   std::size_t replicates,
                                                   double trim,
                                                   std::uint64_t seed) {
  return bootstrap_interval(
      source, [](const LabeledSample& s) { return sample_accuracy(s); },
      replicates, trim, seed);
}

// Normal-theory interval mean +/- z * s / sqrt(n), s with divisor n-1.
// The n >= 30 rule of thumb is the caller's responsibility; n >= 2 is the
// hard floor for s to exist.
inline ControlInterval clt_interval(const Sample& sample, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("clt_interval: confidence outside (0,1)");
  if (sample.size() < 2)
    throw std::invalid_argument("clt_interval: needs n >= 2");
  const double m = sample.mean();
  const double s = sample.stddev();
  const double z = normal_quantile(0.5 + 0.5 * confidence);
  const double half = z * s / std::sqrt(static_cast<double>(sample.size()));
  ControlInterval ci;
  ci.lower = m - half;
  ci.upper = m + half;
  ci.confidence = confidence;
  ci.method = IntervalMethod::clt;
  ci.replicate_count = sample.size();
  return ci;
}

struct ModelComparison {
  ControlInterval interval_a;
  ControlInterval interval_b;
  bool distinguishable = false;  // true iff the intervals are disjoint
};

// Bootstrap both score lists and compare the intervals. Disjoint intervals
// mean one model is distinguishably better at this confidence.
inline ModelComparison compare_models(const Sample& scores_a,
                                      const Sample& scores_b,
                                      const StatisticSpec& stat,
                                      std::size_t replicates, double trim,
                                      std::uint64_t seed) {
  ModelComparison cmp;
  cmp.interval_a = bootstrap_interval(scores_a, stat, replicates, trim,
                                      Rng::derived(seed, 0).next_u64());
  cmp.interval_b = bootstrap_interval(scores_b, stat, replicates, trim,
                                      Rng::derived(seed, 1).next_u64());
  cmp.distinguishable = !cmp.interval_a.overlaps(cmp.interval_b);
  return cmp;
}

}  // namespace mlqc
