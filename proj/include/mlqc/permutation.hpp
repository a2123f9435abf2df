#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlqc/result.hpp"
#include "mlqc/rng.hpp"

namespace mlqc {

// Permutation engine serving as the universal oracle for analytic p-values.
// The statistic is any two-sample aggregate; signed statistics must be folded
// (absolute value) by the caller for a two-sided comparison. The +1/(m+1)
// estimator counts the observed labeling as one permutation, so the returned
// p is never zero.
template <typename Stat>
PValue permutation_pvalue(const std::vector<double>& a,
                          const std::vector<double>& b, Stat&& statistic,
                          std::size_t permutations, std::uint64_t seed) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("permutation_pvalue: empty sample");
  if (permutations < 199)
    throw std::invalid_argument(
        "permutation_pvalue: needs at least 199 permutations");
  const double observed = statistic(a, b);
  std::vector<double> pooled;
  pooled.reserve(a.size() + b.size());
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());

  std::size_t at_least_as_extreme = 0;
  std::vector<double> work;
  std::vector<double> pa(a.size());
  std::vector<double> pb(b.size());
  for (std::size_t i = 0; i < permutations; ++i) {
    // Fresh copy per permutation: iteration i depends only on (seed, i), so
    // a parallel split of the loop would count the same permutations.
    work = pooled;
    Rng rng = Rng::derived(seed, i);
    rng.shuffle(work);
    pa.assign(work.begin(), work.begin() + a.size());
    pb.assign(work.begin() + a.size(), work.end());
    if (statistic(pa, pb) >= observed - 1e-12) ++at_least_as_extreme;
  }
  PValue p;
  p.value = static_cast<double>(1 + at_least_as_extreme) /
            static_cast<double>(permutations + 1);
  p.source = PValueSource::permutation;
  p.permutation_count = permutations;
  return p;
}

}  // namespace mlqc
