#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hypersign/error.hpp"
#include "hypersign/graph.hpp"
#include "hypersign/manifold.hpp"

namespace hypersign {

// Likelihood that the (i,j) link is positive: the closer, the friendlier.
inline double score(const EmbeddingStore& store, std::uint32_t i, std::uint32_t j) {
  return -poincare_distance(store.row(i), store.row(j));
}

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct F1Result {
  double macro_f1 = 0;
  double micro_f1 = 0;  // class-frequency-weighted mean of per-class F1
  ConfusionCounts confusion;
};

namespace detail {

inline double f1_from(std::size_t tp, std::size_t fp, std::size_t fn) {
  double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  return precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

struct F1Pair {
  double f1_pos, f1_neg, macro, micro;
};

inline F1Pair f1_pair(const ConfusionCounts& c) {
  F1Pair r{};
  r.f1_pos = f1_from(c.tp, c.fp, c.fn);
  r.f1_neg = f1_from(c.tn, c.fn, c.fp);  // negative links as the positive class
  r.macro = 0.5 * (r.f1_pos + r.f1_neg);
  std::size_t pos_total = c.tp + c.fn, neg_total = c.tn + c.fp;
  std::size_t m = pos_total + neg_total;
  r.micro = m ? (static_cast<double>(pos_total) * r.f1_pos +
                 static_cast<double>(neg_total) * r.f1_neg) / static_cast<double>(m)
              : 0.0;
  return r;
}

}  // namespace detail

inline F1Result f1_scores(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw Error("predicted and truth sequences differ in length");
  if (predicted.empty()) throw Error("f1_scores needs at least one sample");
  ConfusionCounts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (truth[i] > 0)
      (predicted[i] > 0 ? c.tp : c.fn)++;
    else
      (predicted[i] > 0 ? c.fp : c.tn)++;
  }
  auto pair = detail::f1_pair(c);
  return {pair.macro, pair.micro, c};
}

// Sign decision: score >= threshold predicts +1 (ties go to the majority
// class), below predicts -1.
inline std::vector<int> classify(const EmbeddingStore& store,
                                 std::span<const EdgeRecord> edges, double threshold) {
  std::vector<int> out;
  out.reserve(edges.size());
  for (const EdgeRecord& e : edges)
    out.push_back(score(store, e.src, e.dst) >= threshold ? 1 : -1);
  return out;
}

enum class ThresholdMetric { MacroF1, MicroF1 };

inline ThresholdMetric threshold_metric_from_string(const std::string& s) {
  if (s == "macro") return ThresholdMetric::MacroF1;
  if (s == "micro") return ThresholdMetric::MicroF1;
  throw Error("unknown threshold metric: '" + s + "'");
}

// Grid search over all decision boundaries the validation scores admit:
// midpoints of consecutive distinct scores plus all-positive/all-negative
// sentinels. Ties prefer the smallest threshold.
inline double fit_threshold(const EmbeddingStore& store,
                            std::span<const EdgeRecord> validation,
                            ThresholdMetric metric = ThresholdMetric::MacroF1) {
  if (validation.empty()) throw Error("validation set is empty");
  std::size_t pos_total = 0, neg_total = 0;
  std::vector<std::pair<double, int>> scored;  // (score, sign)
  scored.reserve(validation.size());
  for (const EdgeRecord& e : validation) {
    scored.emplace_back(score(store, e.src, e.dst), e.sign);
    (e.sign > 0 ? pos_total : neg_total)++;
  }
  if (pos_total == 0 || neg_total == 0)
    throw Error("validation set needs at least one edge of each sign");

  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  bool all_equal = scored.front().first == scored.back().first;
  if (all_equal)
    return std::nextafter(scored.front().first, -std::numeric_limits<double>::infinity());

  auto objective = [&](const ConfusionCounts& c) {
    auto p = detail::f1_pair(c);
    return metric == ThresholdMetric::MacroF1 ? p.macro : p.micro;
  };

  // Sweep candidates from high to low; at each step the score group above
  // the candidate flips to predicted-positive. >= keeps the smallest
  // maximizing threshold.
  ConfusionCounts c{0, 0, neg_total, pos_total};  // all predicted negative
  double best_threshold = std::numeric_limits<double>::max();
  double best_value = objective(c);

  std::size_t i = 0;
  while (i < scored.size()) {
    double s = scored[i].first;
    while (i < scored.size() && scored[i].first == s) {
      if (scored[i].second > 0) {
        ++c.tp;
        --c.fn;
      } else {
        ++c.fp;
        --c.tn;
      }
      ++i;
    }
    double candidate;
    if (i < scored.size()) {
      candidate = 0.5 * (s + scored[i].first);
      // Adjacent doubles can round the midpoint onto the lower score; the
      // decision rule needs lower < candidate <= s.
      if (candidate <= scored[i].first) candidate = s;
    } else {
      candidate = -std::numeric_limits<double>::max();
    }
    double value = objective(c);
    if (value >= best_value) {
      best_value = value;
      best_threshold = candidate;
    }
  }
  return best_threshold;
}

// Probability that a positive link outscores a negative one, ties at 1/2.
// Computed by sorting; matches the all-pairs double loop exactly.
inline double auc_score(std::span<const double> positive_scores,
                        std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty())
    throw Error("AUC needs scores from both classes");
  std::vector<double> neg(negative_scores.begin(), negative_scores.end());
  std::sort(neg.begin(), neg.end());
  double numer = 0;
  for (double s : positive_scores) {
    auto lo = std::lower_bound(neg.begin(), neg.end(), s);
    auto hi = std::upper_bound(lo, neg.end(), s);
    auto below = static_cast<double>(lo - neg.begin());
    auto ties = static_cast<double>(hi - lo);
    numer += below + 0.5 * ties;
  }
  return numer / (static_cast<double>(positive_scores.size()) *
                  static_cast<double>(neg.size()));
}

enum class EdgeOperator { Hadamard, L1, L2, Concat, Average };

inline const char* to_string(EdgeOperator op) {
  switch (op) {
    case EdgeOperator::Hadamard: return "hadamard";
    case EdgeOperator::L1: return "l1";
    case EdgeOperator::L2: return "l2";
    case EdgeOperator::Concat: return "concat";
    case EdgeOperator::Average: return "average";
  }
  return "?";
}

inline EdgeOperator edge_operator_from_string(const std::string& s) {
  if (s == "hadamard") return EdgeOperator::Hadamard;
  if (s == "l1") return EdgeOperator::L1;
  if (s == "l2") return EdgeOperator::L2;
  if (s == "concat") return EdgeOperator::Concat;
  if (s == "average") return EdgeOperator::Average;
  throw Error("unknown edge operator: '" + s + "'");
}

// Maps two node vectors to one edge vector, for external classifiers.
inline std::vector<double> edge_features(const EmbeddingStore& store, EdgeOperator op,
                                         std::uint32_t i, std::uint32_t j) {
  auto u = store.row(i);
  auto v = store.row(j);
  const std::size_t k = store.dim();
  std::vector<double> f;
  switch (op) {
    case EdgeOperator::Hadamard:
      f.resize(k);
      for (std::size_t c = 0; c < k; ++c) f[c] = u[c] * v[c];
      break;
    case EdgeOperator::L1:
      f.resize(k);
      for (std::size_t c = 0; c < k; ++c) f[c] = std::abs(u[c] - v[c]);
      break;
    case EdgeOperator::L2:
      f.resize(k);
      for (std::size_t c = 0; c < k; ++c) f[c] = (u[c] - v[c]) * (u[c] - v[c]);
      break;
    case EdgeOperator::Concat:
      f.reserve(2 * k);
      f.insert(f.end(), u.begin(), u.end());
      f.insert(f.end(), v.begin(), v.end());
      break;
    case EdgeOperator::Average:
      f.resize(k);
      for (std::size_t c = 0; c < k; ++c) f[c] = 0.5 * (u[c] + v[c]);
      break;
  }
  return f;
}

struct EvalReport {
  double macro_f1 = 0;
  double micro_f1 = 0;
  double auc = 0;
  double threshold = 0;
  ConfusionCounts confusion;
};

// Classify + F1 + AUC over one edge set. Reconstruction is the same call
// with the full edge set as `test`.
inline EvalReport evaluate(const EmbeddingStore& store,
                           std::span<const EdgeRecord> test, double threshold) {
  if (test.empty()) throw Error("test set is empty");
  std::vector<int> predicted = classify(store, test, threshold);
  std::vector<int> truth;
  truth.reserve(test.size());
  std::vector<double> pos_scores, neg_scores;
  for (const EdgeRecord& e : test) {
    truth.push_back(e.sign);
    double s = score(store, e.src, e.dst);
    (e.sign > 0 ? pos_scores : neg_scores).push_back(s);
  }
  F1Result f1 = f1_scores(predicted, truth);
  EvalReport report;
  report.macro_f1 = f1.macro_f1;
  report.micro_f1 = f1.micro_f1;
  report.auc = auc_score(pos_scores, neg_scores);
  report.threshold = threshold;
  report.confusion = f1.confusion;
  return report;
}

}  // namespace hypersign
