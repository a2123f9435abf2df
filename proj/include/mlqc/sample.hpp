#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlqc/rng.hpp"

namespace mlqc {

// Ordered collection of finite real observations. NaN/infinity are rejected
// at construction; every downstream formula assumes finite values.
class Sample {
 public:
  explicit Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("Sample: empty");
    for (double v : values_) {
      if (!std::isfinite(v))
        throw std::invalid_argument("Sample: non-finite value");
    }
  }

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

  // Sample standard deviation with divisor n-1.
  double stddev() const {
    if (values_.size() < 2)
      throw std::invalid_argument("Sample: stddev needs n >= 2");
    const double m = mean();
    double s = 0.0;
    for (double v : values_) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(values_.size() - 1));
  }

  double variance() const {
    const double s = stddev();
    return s * s;
  }

 private:
  std::vector<double> values_;
};

// (prediction, label) pairs over an arbitrary finite label alphabet.
class LabeledSample {
 public:
  using Item = std::pair<std::string, std::string>;

  explicit LabeledSample(std::vector<Item> items) : items_(std::move(items)) {
    if (items_.empty()) throw std::invalid_argument("LabeledSample: empty");
  }

  const std::vector<Item>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

 private:
  std::vector<Item> items_;
};

// Right-continuous step function F_e(x) = (# values <= x) / n.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(const Sample& sample) : sorted_(sample.values()) {
    std::sort(sorted_.begin(), sorted_.end());
  }

  double operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) /
           static_cast<double>(sorted_.size());
  }

  // Quantile as the ceil(q*n)-th order statistic (1-based); q = 0 maps to
  // the minimum. The small nudge keeps ranks stable when q*n lands on an
  // integer that binary floating point renders slightly high.
  double quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0))
      throw std::invalid_argument("quantile: q outside [0,1]");
    const double n = static_cast<double>(sorted_.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    if (rank < 1) rank = 1;
    if (rank > sorted_.size()) rank = sorted_.size();
    return sorted_[rank - 1];
  }

  const std::vector<double>& sorted_values() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

inline EmpiricalCdf ecdf_build(const Sample& sample) {
  return EmpiricalCdf(sample);
}

// Fraction of items whose prediction equals the label.
inline double sample_accuracy(const LabeledSample& s) {
  std::size_t correct = 0;
  for (const auto& [pred, label] : s.items())
    if (pred == label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(s.size());
}

// Per-label mistake fraction among items carrying that true label. Only
// labels that actually occur get an entry; asking for an absent label is the
// caller's lookup failure, never a silent 0.
inline std::map<std::string, double> conditional_error_rates(
    const LabeledSample& s) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
  for (const auto& [pred, label] : s.items()) {
    auto& [count, mistakes] = tally[label];
    ++count;
    if (pred != label) ++mistakes;
  }
  std::map<std::string, double> rates;
  for (const auto& [label, cm] : tally)
    rates[label] =
        static_cast<double>(cm.second) / static_cast<double>(cm.first);
  return rates;
}

// i.i.d. uniform draws over the source, with replacement.
template <typename T>
std::vector<T> resample_with_replacement(const std::vector<T>& source,
                                         std::size_t m, Rng& rng) {
  if (source.empty())
    throw std::invalid_argument("resample: empty source");
  if (m == 0) throw std::invalid_argument("resample: m must be >= 1");
  std::vector<T> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    out.push_back(source[rng.below(source.size())]);
  return out;
}

template <typename T>
std::vector<T> resample_with_replacement(const std::vector<T>& source,
                                         std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  return resample_with_replacement(source, m, rng);
}

inline Sample resample_with_replacement(const Sample& source, std::size_t m,
                                        std::uint64_t seed) {
  return Sample(resample_with_replacement(source.values(), m, seed));
}

inline LabeledSample resample_with_replacement(const LabeledSample& source,
                                               std::size_t m,
                                               std::uint64_t seed) {
  return LabeledSample(resample_with_replacement(source.items(), m, seed));
}

// Each draw picks a group uniformly, then an element uniformly within it.
// Groups are visited in key order, so output is deterministic given the seed.
template <typename T>
std::vector<std::pair<std::string, T>> balanced_resample(
    const std::map<std::string, std::vector<T>>& groups, std::size_t m,
    std::uint64_t seed) {
  if (groups.empty())
    throw std::invalid_argument("balanced_resample: no groups");
  if (m == 0) throw std::invalid_argument("balanced_resample: m must be >= 1");
  std::vector<const std::pair<const std::string, std::vector<T>>*> index;
  index.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.second.empty())
      throw std::invalid_argument("balanced_resample: empty group '" +
                                  g.first + "'");
    index.push_back(&g);
  }
  Rng rng(seed);
  std::vector<std::pair<std::string, T>> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto* group = index[rng.below(index.size())];
    out.emplace_back(group->first,
                     group->second[rng.below(group->second.size())]);
  }
  return out;
}

}  // namespace mlqc
