#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mlqc {

enum class PValueSource { analytic, permutation };

struct PValue {
  double value = 1.0;
  PValueSource source = PValueSource::analytic;
  std::optional<std::size_t> permutation_count;
};

enum class Decision { drift, no_drift, not_applicable };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::drift: return "drift";
    case Decision::no_drift: return "no-drift";
    case Decision::not_applicable: return "not-applicable";
  }
  return "?";
}

enum class EffectLabel { very_small, small, medium, large, very_large, huge_ };

inline const char* to_string(EffectLabel l) {
  switch (l) {
    case EffectLabel::very_small: return "very small";
    case EffectLabel::small: return "small";
    case EffectLabel::medium: return "medium";
    case EffectLabel::large: return "large";
    case EffectLabel::very_large: return "very large";
    case EffectLabel::huge_: return "huge";
  }
  return "?";
}

// Cohen's thresholds for d and h: 0.2 / 0.5 / 0.8. A boundary value takes
// the larger label; magnitudes below 0.2 are "very small".
inline EffectLabel effect_label_dh(double magnitude) {
  const double m = std::fabs(magnitude);
  if (m >= 0.8) return EffectLabel::large;
  if (m >= 0.5) return EffectLabel::medium;
  if (m >= 0.2) return EffectLabel::small;
  return EffectLabel::very_small;
}

// Cohen's thresholds for w: 0.01 / 0.2 / 0.5 / 0.8 / 1.2 / 2.0 for
// very small, small, medium, large, very large, huge.
inline EffectLabel effect_label_w(double magnitude) {
  const double m = std::fabs(magnitude);
  if (m >= 2.0) return EffectLabel::huge_;
  if (m >= 1.2) return EffectLabel::very_large;
  if (m >= 0.8) return EffectLabel::large;
  if (m >= 0.5) return EffectLabel::medium;
  if (m >= 0.2) return EffectLabel::small;
  return EffectLabel::very_small;
}

// Universal output record of every drift test. The decision comes either
// from p-value vs alpha or from |effect size| vs a threshold, never both;
// alpha_or_threshold records whichever cut was applied.
struct TestResult {
  std::string test_name;
  double statistic = 0.0;
  std::optional<PValue> p_value;
  std::optional<double> effect_size;
  std::optional<EffectLabel> effect_label;
  Decision decision = Decision::not_applicable;
  double alpha_or_threshold = 0.0;
};

namespace detail {
inline Decision decide_by_p(double p, double alpha) {
  return p < alpha ? Decision::drift : Decision::no_drift;
}
inline Decision decide_by_effect(double effect, double threshold) {
  return std::fabs(effect) >= threshold ? Decision::drift : Decision::no_drift;
}
}  // namespace detail

}  // namespace mlqc
