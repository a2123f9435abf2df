#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Production-line control limits, elimination-policy economics with budget
// optimization, and decision-theoretic action selection.

namespace mlqc {

// Smallest k such that P(T >= k) <= alpha for T ~ Binomial(n, p). Seeing k
// or more defects in a batch of n then flags the line as out of control.
// Terms are computed in log space, so large n stays exact and fast.
inline std::size_t find_control_k(std::size_t n, double p, double alpha) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("find_control_k: p outside [0,1]");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("find_control_k: alpha outside (0,1]");
  if (n == 0) throw std::invalid_argument("find_control_k: n must be >= 1");
  if (alpha >= 1.0) return 0;  // tail at k=0 is exactly 1
  if (p == 0.0) return 1;      // tail at k=1 is 0
  if (p == 1.0) return n + 1;  // only the all-defects tail is empty

  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
  auto log_pmf = [&](std::size_t t) {
    const double td = static_cast<double>(t);
    const double nd = static_cast<double>(n);
    return log_n_fact - std::lgamma(td + 1.0) - std::lgamma(nd - td + 1.0) +
           td * log_p + (nd - td) * log_q;
  };
  // tail(k) = sum_{t >= k} pmf(t); walk k upward, peeling pmf(k-1) off.
  double tail = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (tail <= alpha) return k;
    tail -= std::exp(log_pmf(k));
  }
  return n + 1;
}

struct PolicyComponent {
  std::string name;
  double arrival_prob = 0.0;           // q_i, share of decisions
  double conditional_accuracy = 0.0;   // P(correct | component)
  std::optional<double> accuracy_se;   // standard error of that estimate
};

// Routing decisions split across components; a fraction p_i of component i's
// decisions goes to a perfect human reviewer at unit cost.
struct EliminationPolicy {
  std::vector<PolicyComponent> components;
  std::vector<double> review_probs;  // p_i, aligned with components
  double unit_review_cost = 1.0;
  double volume = 1.0;  // decisions per period

  EliminationPolicy(std::vector<PolicyComponent> comps,
                    std::vector<double> probs, double unit_cost, double n)
      : components(std::move(comps)),
        review_probs(std::move(probs)),
        unit_review_cost(unit_cost),
        volume(n) {
    if (components.empty())
      throw std::invalid_argument("EliminationPolicy: no components");
    if (review_probs.size() != components.size())
      throw std::invalid_argument("EliminationPolicy: p_i size mismatch");
    double total_q = 0.0;
    for (const auto& c : components) {
      if (!(c.arrival_prob >= 0.0 && c.arrival_prob <= 1.0) ||
          !(c.conditional_accuracy >= 0.0 && c.conditional_accuracy <= 1.0))
        throw std::invalid_argument(
            "EliminationPolicy: probabilities outside [0,1]");
      total_q += c.arrival_prob;
    }
    if (std::fabs(total_q - 1.0) > 1e-9)
      throw std::invalid_argument(
          "EliminationPolicy: arrival probabilities must sum to 1");
    for (double p : review_probs)
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("EliminationPolicy: p_i outside [0,1]");
  }
};

// Expected accuracy sum_i q_i (p_i + (1 - p_i) P(correct|c_i)): reviewed
// decisions are always right, the rest keep the component accuracy.
inline double expected_accuracy(const EliminationPolicy& policy) {
  double acc = 0.0;
  for (std::size_t i = 0; i < policy.components.size(); ++i) {
    const auto& c = policy.components[i];
    const double p = policy.review_probs[i];
    acc += c.arrival_prob * (p + (1.0 - p) * c.conditional_accuracy);
  }
  return acc;
}

// Expected review spend per period: volume * unit_cost * sum_i q_i p_i.
inline double expected_cost(const EliminationPolicy& policy) {
  double review_share = 0.0;
  for (std::size_t i = 0; i < policy.components.size(); ++i)
    review_share += policy.components[i].arrival_prob * policy.review_probs[i];
  return policy.volume * policy.unit_review_cost * review_share;
}

struct OptimizedPolicy {
  EliminationPolicy policy;
  double accuracy = 0.0;
  double cost = 0.0;
  double leftover_budget = 0.0;  // nonzero only when everything is reviewed
};

// Maximize expected accuracy under a budget cap on expected cost. Accuracy
// is affine in each p_i with slope q_i (1 - P_i) while cost slope is
// proportional to q_i, so gain per cost unit is (1 - P_i): raising p_i to 1
// in ascending order of conditional accuracy, with one final fractional
// component, solves this fractional-knapsack exactly.
inline OptimizedPolicy optimize_budget(std::vector<PolicyComponent> components,
                                       double budget, double volume,
                                       double unit_cost) {
  if (budget < 0.0)
    throw std::invalid_argument("optimize_budget: negative budget");
  if (!(volume > 0.0) || !(unit_cost > 0.0))
    throw std::invalid_argument("optimize_budget: volume and cost must be > 0");
  std::vector<std::size_t> order(components.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return components[a].conditional_accuracy <
                            components[b].conditional_accuracy;
                   });
  std::vector<double> review(components.size(), 0.0);
  double remaining = budget;
  for (std::size_t idx : order) {
    const double q = components[idx].arrival_prob;
    if (q == 0.0) continue;
    const double full_cost = volume * unit_cost * q;
    if (full_cost <= remaining) {
      review[idx] = 1.0;
      remaining -= full_cost;
    } else {
      review[idx] = remaining / full_cost;
      remaining = 0.0;
      break;
    }
  }
  OptimizedPolicy result{
      EliminationPolicy(std::move(components), std::move(review), unit_cost,
                        volume),
      0.0, 0.0, remaining};
  result.accuracy = expected_accuracy(result.policy);
  result.cost = expected_cost(result.policy);
  return result;
}

// Delta-method standard error of the policy accuracy, assuming independent
// component accuracy estimates: sqrt(sum (q_i (1-p_i))^2 SE_i^2). A fully
// reviewed component drops out regardless of its SE.
inline double policy_std_error(const EliminationPolicy& policy) {
  double variance = 0.0;
  for (std::size_t i = 0; i < policy.components.size(); ++i) {
    const auto& c = policy.components[i];
    if (!c.accuracy_se)
      throw std::invalid_argument("policy_std_error: component '" + c.name +
                                  "' has no accuracy standard error");
    const double w = c.arrival_prob * (1.0 - policy.review_probs[i]);
    variance += w * w * (*c.accuracy_se) * (*c.accuracy_se);
  }
  return std::sqrt(variance);
}

// ---------------------------------------------------------------------------
// Decision theory

struct LossMatrix {
  std::vector<std::string> actions;
  std::vector<std::string> states;
  std::vector<std::vector<double>> losses;  // [action][state]
  std::optional<std::vector<double>> state_distribution;

  LossMatrix(std::vector<std::string> acts, std::vector<std::string> sts,
             std::vector<std::vector<double>> l,
             std::optional<std::vector<double>> dist = std::nullopt)
      : actions(std::move(acts)),
        states(std::move(sts)),
        losses(std::move(l)),
        state_distribution(std::move(dist)) {
    if (actions.empty() || states.empty())
      throw std::invalid_argument("LossMatrix: empty actions or states");
    if (losses.size() != actions.size())
      throw std::invalid_argument("LossMatrix: loss rows != actions");
    for (const auto& row : losses)
      if (row.size() != states.size())
        throw std::invalid_argument("LossMatrix: loss row size != states");
    if (state_distribution) {
      if (state_distribution->size() != states.size())
        throw std::invalid_argument("LossMatrix: distribution size mismatch");
      double total = 0.0;
      for (double w : *state_distribution) {
        if (w < 0.0)
          throw std::invalid_argument("LossMatrix: negative state weight");
        total += w;
      }
      if (std::fabs(total - 1.0) > 1e-9)
        throw std::invalid_argument("LossMatrix: distribution must sum to 1");
    }
  }
};

struct MinmaxResult {
  std::size_t action_index = 0;
  std::vector<double> worst_losses;  // max over states, per action
};

// argmin over actions of the worst-case (max over states) loss.
// Ties go to the first action in declaration order.
inline MinmaxResult minmax_action(const LossMatrix& loss) {
  MinmaxResult result;
  result.worst_losses.reserve(loss.actions.size());
  for (const auto& row : loss.losses)
    result.worst_losses.push_back(*std::max_element(row.begin(), row.end()));
  result.action_index = static_cast<std::size_t>(
      std::min_element(result.worst_losses.begin(), result.worst_losses.end()) -
      result.worst_losses.begin());
  return result;
}

struct BayesResult {
  std::size_t action_index = 0;
  std::vector<double> expected_losses;
  bool tie = false;  // another action attains exactly the same expected loss
};

// argmin of expected loss under the state distribution. Exact ties are
// reported; the first-declared minimizer is chosen.
inline BayesResult bayes_action(const LossMatrix& loss) {
  if (!loss.state_distribution)
    throw std::invalid_argument("bayes_action: no state distribution");
  BayesResult result;
  const auto& dist = *loss.state_distribution;
  for (const auto& row : loss.losses) {
    double e = 0.0;
    for (std::size_t s = 0; s < dist.size(); ++s) e += dist[s] * row[s];
    result.expected_losses.push_back(e);
  }
  result.action_index = static_cast<std::size_t>(
      std::min_element(result.expected_losses.begin(),
                       result.expected_losses.end()) -
      result.expected_losses.begin());
  const double best = result.expected_losses[result.action_index];
  std::size_t minimizers = 0;
  for (double e : result.expected_losses)
    if (e == best) ++minimizers;
  result.tie = minimizers > 1;
  return result;
}

}  // namespace mlqc
