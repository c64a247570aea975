#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "hypersign/error.hpp"
#include "hypersign/graph.hpp"
#include "hypersign/rng.hpp"

namespace hypersign {

// (anchor, friend, enemy) training unit.
struct Triple {
  std::uint32_t anchor = 0;
  std::uint32_t positive = 0;
  std::uint32_t negative = 0;

  friend bool operator==(const Triple& a, const Triple& b) {
    return a.anchor == b.anchor && a.positive == b.positive && a.negative == b.negative;
  }
};

enum class AugmentStrategy { RandomSampling, VirtualNode, BalanceInference };

inline const char* to_string(AugmentStrategy s) {
  switch (s) {
    case AugmentStrategy::RandomSampling: return "random";
    case AugmentStrategy::VirtualNode: return "virtual";
    case AugmentStrategy::BalanceInference: return "balance";
  }
  return "?";
}

inline AugmentStrategy augment_strategy_from_string(const std::string& s) {
  if (s == "random") return AugmentStrategy::RandomSampling;
  if (s == "virtual") return AugmentStrategy::VirtualNode;
  if (s == "balance") return AugmentStrategy::BalanceInference;
  throw Error("unknown augmentation strategy: '" + s + "'");
}

// Per-node cap on two-hop inferred neighbors per sign.
inline constexpr std::size_t kBalanceInferenceCap = 5;

// Extended adjacency: the real per-sign neighbor lists plus the inferred
// entries a strategy adds so that every node (where possible) has at least
// one neighbor of each polarity. Real entries always come first in each
// list and are never overwritten.
class AugmentedGraph {
 public:
  static AugmentedGraph build(const SignedGraph& g, AugmentStrategy strategy,
                              std::uint64_t seed);

  std::size_t real_node_count() const { return real_nodes_; }
  // Embedding rows to allocate: real nodes plus any virtual nodes.
  std::size_t total_rows() const { return total_rows_; }
  bool has_virtual_nodes() const { return total_rows_ > real_nodes_; }
  std::uint32_t virtual_positive() const { return static_cast<std::uint32_t>(real_nodes_); }
  std::uint32_t virtual_negative() const { return static_cast<std::uint32_t>(real_nodes_ + 1); }

  AugmentStrategy strategy() const { return strategy_; }

  const std::vector<std::uint32_t>& extended_positive(std::uint32_t v) const {
    return ext_pos_[v];
  }
  const std::vector<std::uint32_t>& extended_negative(std::uint32_t v) const {
    return ext_neg_[v];
  }
  std::size_t real_positive_count(std::uint32_t v) const { return real_pos_len_[v]; }
  std::size_t real_negative_count(std::uint32_t v) const { return real_neg_len_[v]; }

  // Sign of (u,v) in the extended adjacency as seen from u's lists.
  int extended_sign(std::uint32_t u, std::uint32_t v) const {
    const auto& p = ext_pos_[u];
    if (std::find(p.begin(), p.end(), v) != p.end()) return 1;
    const auto& n = ext_neg_[u];
    if (std::find(n.begin(), n.end(), v) != n.end()) return -1;
    return 0;
  }

  const std::vector<std::uint32_t>& eligible_anchors() const { return eligible_; }
  std::size_t inferred_edge_count() const { return inferred_; }
  // Nodes still lacking a polarity after augmentation; skipped as anchors.
  std::size_t ineligible_node_count() const { return real_nodes_ - eligible_.size(); }

 private:
  std::size_t real_nodes_ = 0;
  std::size_t total_rows_ = 0;
  AugmentStrategy strategy_ = AugmentStrategy::RandomSampling;
  std::vector<std::vector<std::uint32_t>> ext_pos_, ext_neg_;
  std::vector<std::size_t> real_pos_len_, real_neg_len_;
  std::vector<std::uint32_t> eligible_;
  std::size_t inferred_ = 0;
};

namespace detail {

// Seeded-uniform node that is neither `v` nor adjacent to it nor already
// inferred for it. Returns false when no candidate exists.
inline bool draw_non_adjacent(const SignedGraph& g, std::uint32_t v,
                              const std::vector<std::uint32_t>& taken_pos,
                              const std::vector<std::uint32_t>& taken_neg,
                              RandomEngine& rng, std::uint32_t& out) {
  auto blocked = [&](std::uint32_t c) {
    if (c == v || g.sign_of(v, c) != 0) return true;
    if (std::find(taken_pos.begin(), taken_pos.end(), c) != taken_pos.end()) return true;
    return std::find(taken_neg.begin(), taken_neg.end(), c) != taken_neg.end();
  };
  const std::size_t n = g.node_count();
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto c = static_cast<std::uint32_t>(rng.index(n));
    if (!blocked(c)) {
      out = c;
      return true;
    }
  }
  // Dense node: enumerate the complement deterministically and pick from it.
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t c = 0; c < n; ++c)
    if (!blocked(c)) candidates.push_back(c);
  if (candidates.empty()) return false;
  out = candidates[rng.index(candidates.size())];
  return true;
}

}  // namespace detail

inline AugmentedGraph AugmentedGraph::build(const SignedGraph& g,
                                            AugmentStrategy strategy,
                                            std::uint64_t seed) {
  if (g.node_count() < 2) throw Error("augmentation needs at least 2 nodes");

  AugmentedGraph aug;
  const std::size_t n = g.node_count();
  aug.real_nodes_ = n;
  aug.strategy_ = strategy;
  aug.total_rows_ = strategy == AugmentStrategy::VirtualNode ? n + 2 : n;
  aug.ext_pos_.resize(n);
  aug.ext_neg_.resize(n);
  aug.real_pos_len_.resize(n);
  aug.real_neg_len_.resize(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    aug.ext_pos_[v] = g.neighbors(v, +1);
    aug.ext_neg_[v] = g.neighbors(v, -1);
    aug.real_pos_len_[v] = aug.ext_pos_[v].size();
    aug.real_neg_len_[v] = aug.ext_neg_[v].size();
  }

  RandomEngine rng(derive_seed(seed, RngStream::augment));

  auto infer_random = [&](std::uint32_t v, bool positive) {
    std::uint32_t pick;
    if (detail::draw_non_adjacent(g, v, aug.ext_pos_[v], aug.ext_neg_[v], rng, pick)) {
      (positive ? aug.ext_pos_ : aug.ext_neg_)[v].push_back(pick);
      ++aug.inferred_;
    }
  };

  // Two-hop balance walk: the sign of an unknown pair (v,j) reachable via
  // midpoint m is sign(v,m) * sign(m,j). Fills only the missing polarity.
  auto infer_balance = [&](std::uint32_t v, bool positive) {
    const int wanted = positive ? 1 : -1;
    auto& target = (positive ? aug.ext_pos_ : aug.ext_neg_)[v];
    std::size_t added = 0;
    auto consider = [&](std::uint32_t j, int product) {
      if (added >= kBalanceInferenceCap || product != wanted) return;
      if (j == v || g.sign_of(v, j) != 0) return;
      if (aug.extended_sign(v, j) != 0) return;
      target.push_back(j);
      ++added;
      ++aug.inferred_;
    };
    for (int s1 : {1, -1}) {
      for (std::uint32_t m : g.neighbors(v, s1)) {
        for (int s2 : {1, -1}) {
          for (std::uint32_t j : g.neighbors(m, s2)) consider(j, s1 * s2);
          if (added >= kBalanceInferenceCap) return added > 0;
        }
      }
    }
    return added > 0;
  };

  for (std::uint32_t v = 0; v < n; ++v) {
    bool lacks_pos = aug.real_pos_len_[v] == 0;
    bool lacks_neg = aug.real_neg_len_[v] == 0;
    if (!lacks_pos && !lacks_neg) continue;
    switch (strategy) {
      case AugmentStrategy::RandomSampling:
        if (lacks_pos) infer_random(v, true);
        if (lacks_neg) infer_random(v, false);
        break;
      case AugmentStrategy::VirtualNode:
        if (lacks_pos) {
          aug.ext_pos_[v].push_back(aug.virtual_positive());
          ++aug.inferred_;
        }
        if (lacks_neg) {
          aug.ext_neg_[v].push_back(aug.virtual_negative());
          ++aug.inferred_;
        }
        break;
      case AugmentStrategy::BalanceInference:
        if (lacks_pos && !infer_balance(v, true)) infer_random(v, true);
        if (lacks_neg && !infer_balance(v, false)) infer_random(v, false);
        break;
    }
  }

  for (std::uint32_t v = 0; v < n; ++v)
    if (!aug.ext_pos_[v].empty() && !aug.ext_neg_[v].empty()) aug.eligible_.push_back(v);
  if (aug.eligible_.empty())
    throw Error("no node has both a positive and a negative extended neighbor");
  return aug;
}

inline AugmentedGraph build_extended(const SignedGraph& g, AugmentStrategy strategy,
                                     std::uint64_t seed) {
  return AugmentedGraph::build(g, strategy, seed);
}

// One triple: anchor uniform over eligible anchors, then one uniform pick
// from each of its extended lists. Triples are mutually independent.
inline Triple sample_triple(const AugmentedGraph& aug, RandomEngine& rng) {
  const auto& anchors = aug.eligible_anchors();
  std::uint32_t i = anchors[rng.index(anchors.size())];
  const auto& pos = aug.extended_positive(i);
  const auto& neg = aug.extended_negative(i);
  return {i, pos[rng.index(pos.size())], neg[rng.index(neg.size())]};
}

inline std::vector<Triple> sample_batch(const AugmentedGraph& aug,
                                        std::size_t batch_size, RandomEngine& rng) {
  if (batch_size == 0) throw Error("batch size must be >= 1");
  std::vector<Triple> batch;
  batch.reserve(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) batch.push_back(sample_triple(aug, rng));
  return batch;
}

// Deterministic per (seed, epoch) sequence of batches; the final batch is
// short when batch_size does not divide triples_per_epoch.
class EpochStream {
 public:
  EpochStream(const AugmentedGraph& aug, std::size_t triples_per_epoch,
              std::size_t batch_size, std::uint64_t seed, std::size_t epoch)
      : aug_(&aug),
        remaining_(triples_per_epoch),
        batch_size_(batch_size),
        rng_(derive_seed(seed, RngStream::sample, epoch)) {
    if (batch_size == 0) throw Error("batch size must be >= 1");
    if (triples_per_epoch < batch_size)
      throw Error("triples per epoch must be >= batch size");
  }

  bool next(std::vector<Triple>& out) {
    if (remaining_ == 0) return false;
    std::size_t take = std::min(remaining_, batch_size_);
    out.clear();
    out.reserve(take);
    for (std::size_t b = 0; b < take; ++b) out.push_back(sample_triple(*aug_, rng_));
    remaining_ -= take;
    return true;
  }

 private:
  const AugmentedGraph* aug_;
  std::size_t remaining_;
  std::size_t batch_size_;
  RandomEngine rng_;
};

}  // namespace hypersign
