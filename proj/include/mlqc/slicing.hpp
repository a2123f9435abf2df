#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlqc/categorical.hpp"
#include "mlqc/dataset.hpp"
#include "mlqc/result.hpp"
#include "mlqc/sample.hpp"

// Slice rules, error-slice mining, slice-proportion drift with Holm FWER
// control, density-slice typing, and polynomial-relation drift.

namespace mlqc {

// One per-feature condition: a closed numeric interval or a categorical
// value set.
struct SlicePredicate {
  enum class Kind { interval, value_set };

  std::string feature;
  Kind kind = Kind::interval;
  double min = 0.0;
  double max = 0.0;
  std::set<std::string> values;

  static SlicePredicate interval(std::string feature, double min, double max) {
    if (!(min <= max))
      throw std::invalid_argument("SlicePredicate: min > max");
    SlicePredicate p;
    p.feature = std::move(feature);
    p.kind = Kind::interval;
    p.min = min;
    p.max = max;
    return p;
  }

  static SlicePredicate value_set(std::string feature,
                                  std::set<std::string> values) {
    if (values.empty())
      throw std::invalid_argument("SlicePredicate: empty value set");
    SlicePredicate p;
    p.feature = std::move(feature);
    p.kind = Kind::value_set;
    p.values = std::move(values);
    return p;
  }
};

// Conjunction of per-feature predicates; at most one predicate per feature.
// An empty predicate list matches every row.
class Slice {
 public:
  Slice() = default;

  explicit Slice(std::vector<SlicePredicate> predicates)
      : predicates_(std::move(predicates)) {
    for (std::size_t i = 0; i < predicates_.size(); ++i)
      for (std::size_t j = i + 1; j < predicates_.size(); ++j)
        if (predicates_[i].feature == predicates_[j].feature)
          throw std::invalid_argument("Slice: duplicate predicate on '" +
                                      predicates_[i].feature + "'");
  }

  const std::vector<SlicePredicate>& predicates() const { return predicates_; }

  // Canonical text form, used for deterministic ordering and reports.
  std::string describe() const {
    if (predicates_.empty()) return "(all)";
    std::string out;
    for (const auto& p : predicates_) {
      if (!out.empty()) out += " & ";
      if (p.kind == SlicePredicate::Kind::interval) {
        out += p.feature + " in [" + std::to_string(p.min) + ", " +
               std::to_string(p.max) + "]";
      } else {
        out += p.feature + " in {";
        bool first = true;
        for (const auto& v : p.values) {
          if (!first) out += ", ";
          out += v;
          first = false;
        }
        out += "}";
      }
    }
    return out;
  }

 private:
  std::vector<SlicePredicate> predicates_;
};

// Membership check; interval endpoints are inclusive. Every feature the
// slice mentions must exist in the dataset with a matching kind.
inline bool slice_membership(const Slice& slice, const Dataset& data,
                             std::size_t row) {
  if (row >= data.rows())
    throw std::out_of_range("slice_membership: row out of range");
  for (const auto& p : slice.predicates()) {
    const auto& col = data.column(p.feature);
    if (p.kind == SlicePredicate::Kind::interval) {
      if (col.kind != ColumnKind::numeric)
        throw DataError(DataErrorCode::type_conflict,
                        "interval predicate on categorical column '" +
                            p.feature + "'");
      const double v = col.numeric[row];
      if (v < p.min || v > p.max) return false;
    } else {
      if (col.kind != ColumnKind::categorical)
        throw DataError(DataErrorCode::type_conflict,
                        "set predicate on numeric column '" + p.feature + "'");
      if (p.values.find(col.text[row]) == p.values.end()) return false;
    }
  }
  return true;
}

struct SliceStats {
  std::size_t support = 0;
  double fractional_support = 0.0;
  std::optional<double> error_rate;  // absent when support is 0 or no column
};

namespace detail {
// Correctness columns carry 1 for a correct prediction, 0 for a mistake.
inline bool is_mistake(double correctness_cell) {
  if (correctness_cell == 0.0) return true;
  if (correctness_cell == 1.0) return false;
  throw DataError(DataErrorCode::type_conflict,
                  "correctness column must contain only 0 or 1");
}
}  // namespace detail

inline SliceStats slice_stats(const Slice& slice, const Dataset& data,
                              const std::optional<std::string>&
                                  correctness_column = std::nullopt) {
  const std::vector<double>* correct = nullptr;
  if (correctness_column) correct = &data.numeric_column(*correctness_column);
  SliceStats stats;
  std::size_t mistakes = 0;
  for (std::size_t row = 0; row < data.rows(); ++row) {
    if (!slice_membership(slice, data, row)) continue;
    ++stats.support;
    if (correct && detail::is_mistake((*correct)[row])) ++mistakes;
  }
  stats.fractional_support =
      static_cast<double>(stats.support) / static_cast<double>(data.rows());
  if (correct && stats.support > 0)
    stats.error_rate =
        static_cast<double>(mistakes) / static_cast<double>(stats.support);
  return stats;
}

struct MinedSlice {
  Slice slice;
  SliceStats stats;
};

namespace detail {

inline std::vector<SlicePredicate> candidate_predicates(const Dataset& data,
                                                        const std::string&
                                                            skip_column) {
  std::vector<SlicePredicate> candidates;
  for (const auto& col : data.columns()) {
    if (col.name == skip_column) continue;
    if (col.kind == ColumnKind::categorical) {
      std::set<std::string> seen(col.text.begin(), col.text.end());
      for (const auto& v : seen)
        candidates.push_back(SlicePredicate::value_set(col.name, {v}));
    } else {
      // Quartile boundaries give scale-free interval candidates.
      EmpiricalCdf cdf = ecdf_build(Sample(col.numeric));
      std::vector<double> bounds;
      for (double q : {0.0, 0.25, 0.5, 0.75, 1.0})
        bounds.push_back(cdf.quantile(q));
      bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
      for (std::size_t i = 0; i < bounds.size(); ++i)
        for (std::size_t j = i + 1; j < bounds.size(); ++j)
          candidates.push_back(
              SlicePredicate::interval(col.name, bounds[i], bounds[j]));
    }
  }
  return candidates;
}

}  // namespace detail

// Bounded exhaustive search for slices whose error rate exceeds
// lift * overall error rate at sufficient support. Candidates are single
// categorical values and quartile-boundary intervals, conjoined up to
// max_predicates (1 or 2). Results ordered by error rate, then support,
// then canonical description.
inline std::vector<MinedSlice> mine_error_slices(
    const Dataset& data, const std::string& correctness_column,
    int max_predicates, double min_fractional_support, double lift) {
  if (max_predicates != 1 && max_predicates != 2)
    throw std::invalid_argument("mine_error_slices: max_predicates in {1,2}");
  if (!(min_fractional_support >= 0.0 && min_fractional_support <= 1.0))
    throw std::invalid_argument("mine_error_slices: bad support threshold");
  const auto& correct = data.numeric_column(correctness_column);
  std::size_t mistakes = 0;
  for (double c : correct)
    if (detail::is_mistake(c)) ++mistakes;
  if (mistakes == 0) return {};
  const double overall_rate =
      static_cast<double>(mistakes) / static_cast<double>(data.rows());
  const double rate_floor = lift * overall_rate;

  const auto candidates = detail::candidate_predicates(data, correctness_column);
  std::vector<MinedSlice> found;
  auto consider = [&](Slice slice) {
    const SliceStats stats = slice_stats(slice, data, correctness_column);
    if (stats.fractional_support + 1e-12 < min_fractional_support) return;
    if (!stats.error_rate) return;
    if (*stats.error_rate + 1e-12 < rate_floor) return;
    found.push_back({std::move(slice), stats});
  };

  for (const auto& p : candidates) consider(Slice({p}));
  if (max_predicates == 2) {
    for (std::size_t i = 0; i < candidates.size(); ++i)
      for (std::size_t j = i + 1; j < candidates.size(); ++j) {
        if (candidates[i].feature == candidates[j].feature) continue;
        consider(Slice({candidates[i], candidates[j]}));
      }
  }

  std::sort(found.begin(), found.end(),
            [](const MinedSlice& a, const MinedSlice& b) {
              const double ea = a.stats.error_rate.value_or(0.0);
              const double eb = b.stats.error_rate.value_or(0.0);
              if (ea != eb) return ea > eb;
              if (a.stats.support != b.stats.support)
                return a.stats.support > b.stats.support;
              return a.slice.describe() < b.slice.describe();
            });
  return found;
}

// Holm's step-down adjustment. Sorted ascending, the i-th smallest p becomes
// max over j <= i of min(1, (K-j+1) * p_(j)), mapped back to input order.
// The family p-value is the smallest adjusted value.
struct HolmResult {
  std::vector<double> adjusted;
  double family_p = 1.0;
};

inline HolmResult holm_adjust(const std::vector<double>& pvalues) {
  if (pvalues.empty())
    throw std::invalid_argument("holm_adjust: no p-values");
  for (double p : pvalues)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("holm_adjust: p outside [0,1]");
  const std::size_t k = pvalues.size();
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pvalues[a] < pvalues[b];
  });
  HolmResult result;
  result.adjusted.assign(k, 0.0);
  double running_max = 0.0;
  for (std::size_t rank = 0; rank < k; ++rank) {
    const double scaled =
        std::min(1.0, static_cast<double>(k - rank) * pvalues[order[rank]]);
    running_max = std::max(running_max, scaled);
    result.adjusted[order[rank]] = running_max;
  }
  result.family_p =
      *std::min_element(result.adjusted.begin(), result.adjusted.end());
  return result;
}

struct SliceDriftResult {
  std::vector<TestResult> per_slice;    // Yates test per slice
  std::vector<double> adjusted_pvalues;
  double family_p = 1.0;
  Decision decision = Decision::no_drift;
  double alpha = 0.05;
};

// Compare each slice's fractional support on the reference and current
// datasets with the Yates difference-in-proportions test, then fold the K
// p-values into one family decision via Holm. A slice whose 2x2 table is
// degenerate on both datasets carries no evidence and enters the family
// with p = 1.
inline SliceDriftResult slice_drift_test(const std::vector<Slice>& slices,
                                         const Dataset& reference,
                                         const Dataset& current,
                                         double alpha = 0.05) {
  if (slices.empty())
    throw std::invalid_argument("slice_drift_test: no slices");
  SliceDriftResult result;
  result.alpha = alpha;
  std::vector<double> raw;
  raw.reserve(slices.size());
  for (const auto& slice : slices) {
    const SliceStats ref_stats = slice_stats(slice, reference);
    const SliceStats cur_stats = slice_stats(slice, current);
    TestResult t = yates_diff_proportions(
        ProportionPair(ref_stats.support, reference.rows(), cur_stats.support,
                       current.rows()),
        alpha);
    raw.push_back(t.p_value ? t.p_value->value : 1.0);
    result.per_slice.push_back(std::move(t));
  }
  const HolmResult holm = holm_adjust(raw);
  result.adjusted_pvalues = holm.adjusted;
  result.family_p = holm.family_p;
  result.decision =
      result.family_p < alpha ? Decision::drift : Decision::no_drift;
  return result;
}

// ---------------------------------------------------------------------------
// Density-based slice typing

enum class DensityType { a, b, c, d };

inline const char* to_string(DensityType t) {
  switch (t) {
    case DensityType::a: return "A";
    case DensityType::b: return "B";
    case DensityType::c: return "C";
    case DensityType::d: return "D";
  }
  return "?";
}

struct DensitySlice {
  Slice slice;
  DensityType type = DensityType::a;  // A/B/C only in a slice set
};

// Partition of the reference feature space into not-very-sparse (A), very
// sparse (B), and empty (C) slices. The partition itself is an input; only
// typing and drift on a given partition happen here.
struct DensitySliceSet {
  std::vector<DensitySlice> slices;
  double sparsity_threshold = 0.0;
};

// Classify each current row by its containing slice's type, or D when some
// sliced feature's value falls outside every range the reference slices
// cover. Rows matching no slice while inside all covered ranges mean the
// input was not a partition.
inline CategoricalCounts density_slice_map(const DensitySliceSet& set,
                                           const Dataset& current) {
  if (set.slices.empty())
    throw std::invalid_argument("density_slice_map: empty slice set");
  for (const auto& ds : set.slices)
    if (ds.type == DensityType::d)
      throw std::invalid_argument("density_slice_map: slice typed D");

  // Per-feature coverage across all slices: global [min,max] for numeric
  // features, value union for categorical ones.
  std::map<std::string, std::pair<double, double>> numeric_range;
  std::map<std::string, std::set<std::string>> value_union;
  for (const auto& ds : set.slices) {
    for (const auto& p : ds.slice.predicates()) {
      if (p.kind == SlicePredicate::Kind::interval) {
        auto it = numeric_range.find(p.feature);
        if (it == numeric_range.end()) {
          numeric_range.emplace(p.feature, std::make_pair(p.min, p.max));
        } else {
          it->second.first = std::min(it->second.first, p.min);
          it->second.second = std::max(it->second.second, p.max);
        }
      } else {
        value_union[p.feature].insert(p.values.begin(), p.values.end());
      }
    }
  }

  std::uint64_t counts[4] = {0, 0, 0, 0};
  for (std::size_t row = 0; row < current.rows(); ++row) {
    bool outside = false;
    for (const auto& [feature, range] : numeric_range) {
      const double v = current.numeric_column(feature)[row];
      if (v < range.first || v > range.second) {
        outside = true;
        break;
      }
    }
    if (!outside) {
      for (const auto& [feature, values] : value_union) {
        const auto& v = current.text_column(feature)[row];
        if (values.find(v) == values.end()) {
          outside = true;
          break;
        }
      }
    }
    if (outside) {
      ++counts[3];
      continue;
    }
    bool placed = false;
    for (const auto& ds : set.slices) {
      if (slice_membership(ds.slice, current, row)) {
        ++counts[static_cast<int>(ds.type)];
        placed = true;
        break;
      }
    }
    if (!placed)
      throw DataError(DataErrorCode::bad_format,
                      "density slice set is not a partition: row " +
                          std::to_string(row) + " matches no slice");
  }
  return CategoricalCounts({"A", "B", "C", "D"},
                           {counts[0], counts[1], counts[2], counts[3]});
}

// ---------------------------------------------------------------------------
// Polynomial relations

// One product term of at most two features with total degree <= 2:
// x_first, or x_first * x_second (squares use first == second).
struct RelationTerm {
  std::string first;
  std::string second;  // empty for a degree-1 term

  std::string describe() const {
    if (second.empty()) return first;
    if (first == second) return first + "^2";
    return first + "*" + second;
  }
};

inline std::vector<RelationTerm> default_relation_terms(
    const std::string& u, const std::string& v) {
  return {{u, ""}, {v, ""}, {u, v}, {u, u}, {v, v}};
}

// Frozen least-squares polynomial: target ~ intercept + sum coef_i * term_i,
// with the coefficient of determination on the data it was fit on.
struct PolyRelation {
  std::string target;
  std::vector<RelationTerm> terms;
  std::vector<double> coefficients;
  double intercept = 0.0;
  double r_squared = 0.0;

  double predict(const Dataset& data, std::size_t row) const {
    double y = intercept;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      double x = data.numeric_column(terms[t].first)[row];
      if (!terms[t].second.empty())
        x *= data.numeric_column(terms[t].second)[row];
      y += coefficients[t] * x;
    }
    return y;
  }
};

namespace detail {

// Gaussian elimination with partial pivoting on the normal equations,
// accumulated in long double. Throws on (near-)singular systems.
inline std::vector<double> solve_normal_equations(
    const std::vector<std::vector<double>>& design,
    const std::vector<double>& target) {
  const std::size_t n = design.size();
  const std::size_t p = design.front().size();
  std::vector<std::vector<long double>> a(p,
                                          std::vector<long double>(p + 1, 0.0L));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      long double s = 0.0L;
      for (std::size_t r = 0; r < n; ++r)
        s += static_cast<long double>(design[r][i]) * design[r][j];
      a[i][j] = s;
      a[j][i] = s;
    }
    long double s = 0.0L;
    for (std::size_t r = 0; r < n; ++r)
      s += static_cast<long double>(design[r][i]) * target[r];
    a[i][p] = s;
  }
  long double scale = 0.0L;
  for (std::size_t i = 0; i < p; ++i) scale = std::max(scale, std::fabs(a[i][i]));
  if (scale == 0.0L) scale = 1.0L;
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-12L * scale)
      throw std::domain_error("fit_relation: rank-deficient design matrix");
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      const long double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= p; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<double> x(p);
  for (std::size_t i = 0; i < p; ++i)
    x[i] = static_cast<double>(a[i][p] / a[i][i]);
  return x;
}

inline std::vector<std::vector<double>> build_design(
    const Dataset& data, const std::vector<RelationTerm>& terms) {
  std::vector<std::vector<double>> design(
      data.rows(), std::vector<double>(terms.size() + 1, 1.0));
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& first = data.numeric_column(terms[t].first);
    const std::vector<double>* second =
        terms[t].second.empty() ? nullptr
                                : &data.numeric_column(terms[t].second);
    for (std::size_t r = 0; r < data.rows(); ++r)
      design[r][t + 1] = second ? first[r] * (*second)[r] : first[r];
  }
  return design;
}

}  // namespace detail

// Least-squares fit of the target on the given terms (plus intercept).
// Requires at least two more rows than coefficients and a full-rank design.
inline PolyRelation fit_relation(const Dataset& data, const std::string& target,
                                 const std::vector<RelationTerm>& terms) {
  if (terms.empty())
    throw std::invalid_argument("fit_relation: needs at least one term");
  for (const auto& t : terms) {
    if (t.first.empty())
      throw std::invalid_argument("fit_relation: empty term");
    if (t.first == target || t.second == target)
      throw std::invalid_argument("fit_relation: target used as regressor");
  }
  const auto& y = data.numeric_column(target);
  const std::size_t coefficient_count = terms.size() + 1;
  if (data.rows() < coefficient_count + 2)
    throw std::invalid_argument("fit_relation: needs rows >= coefficients + 2");

  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= static_cast<double>(y.size());
  double ss_tot = 0.0;
  for (double v : y) ss_tot += (v - mean_y) * (v - mean_y);
  if (ss_tot == 0.0)
    throw std::domain_error("fit_relation: zero target variance");

  const auto design = detail::build_design(data, terms);
  const auto beta = detail::solve_normal_equations(design, y);

  PolyRelation rel;
  rel.target = target;
  rel.terms = terms;
  rel.intercept = beta[0];
  rel.coefficients.assign(beta.begin() + 1, beta.end());

  double ss_res = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    double fitted = beta[0];
    for (std::size_t t = 1; t < beta.size(); ++t) fitted += beta[t] * design[r][t];
    const double e = y[r] - fitted;
    ss_res += e * e;
  }
  rel.r_squared = 1.0 - ss_res / ss_tot;
  return rel;
}

struct RelationDrift {
  double r_squared_reference = 0.0;
  double r_squared_current = 0.0;   // out-of-sample; may be negative
  double degradation = 0.0;
  Decision decision = Decision::no_drift;
  double threshold = 0.2;
};

// Evaluate the frozen polynomial on another dataset and score the R^2 drop.
inline RelationDrift relation_drift_score(const PolyRelation& relation,
                                          const Dataset& current,
                                          double threshold = 0.2) {
  const auto& y = current.numeric_column(relation.target);
  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= static_cast<double>(y.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t r = 0; r < current.rows(); ++r) {
    ss_tot += (y[r] - mean_y) * (y[r] - mean_y);
    const double e = y[r] - relation.predict(current, r);
    ss_res += e * e;
  }
  if (ss_tot == 0.0)
    throw std::domain_error("relation_drift_score: zero target variance");
  RelationDrift drift;
  drift.r_squared_reference = relation.r_squared;
  drift.r_squared_current = 1.0 - ss_res / ss_tot;
  drift.degradation = drift.r_squared_reference - drift.r_squared_current;
  drift.threshold = threshold;
  drift.decision = drift.degradation > threshold ? Decision::drift
                                                 : Decision::no_drift;
  return drift;
}

}  // namespace mlqc
