#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypersign/error.hpp"
#include "hypersign/rng.hpp"

namespace hypersign {

struct EdgeRecord {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  int sign = 0;  // +1 or -1

  friend bool operator==(const EdgeRecord& a, const EdgeRecord& b) {
    return a.src == b.src && a.dst == b.dst && a.sign == b.sign;
  }
};

// How to resolve an (i,j)/(j,i) pair that carries both signs.
enum class ConflictPolicy { NegativeWins, Drop, FirstWins };

inline const char* to_string(ConflictPolicy p) {
  switch (p) {
    case ConflictPolicy::NegativeWins: return "negative-wins";
    case ConflictPolicy::Drop: return "drop";
    case ConflictPolicy::FirstWins: return "first-wins";
  }
  return "?";
}

inline ConflictPolicy conflict_policy_from_string(const std::string& s) {
  if (s == "negative-wins") return ConflictPolicy::NegativeWins;
  if (s == "drop") return ConflictPolicy::Drop;
  if (s == "first-wins") return ConflictPolicy::FirstWins;
  throw Error("unknown conflict policy: '" + s + "'");
}

// Raw parse result: directed records exactly as they appeared in the file,
// minus self-loops. Indices are dense, assigned by first appearance.
struct EdgeList {
  std::vector<EdgeRecord> edges;
  std::vector<std::string> labels;  // index -> original label
  std::size_t self_loops_dropped = 0;
};

namespace detail {

inline int parse_sign_token(const std::string& tok) {
  if (tok == "1" || tok == "+1" || tok == "+") return 1;
  if (tok == "-1" || tok == "-") return -1;
  throw Error("sign token '" + tok + "' is not one of 1, -1, +, -");
}

inline std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace detail

// Parses `src dst sign` lines. '#' starts a comment, blank lines are
// skipped, fields split on any run of spaces/tabs; extra fields ignored.
inline EdgeList load_edge_list(std::istream& in) {
  EdgeList out;
  std::unordered_map<std::string, std::uint32_t> index_of;
  std::string line;
  std::size_t line_no = 0;

  auto intern = [&](const std::string& label) -> std::uint32_t {
    auto it = index_of.find(label);
    if (it != index_of.end()) return it->second;
    auto id = static_cast<std::uint32_t>(out.labels.size());
    index_of.emplace(label, id);
    out.labels.push_back(label);
    return id;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string::size_type hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);

    std::istringstream fields(line);
    std::string src_tok, dst_tok, sign_tok;
    if (!(fields >> src_tok)) continue;  // blank or comment-only
    if (!(fields >> dst_tok >> sign_tok)) {
      throw Error("line " + std::to_string(line_no) +
                  ": expected 'src dst sign', got '" + line + "'");
    }
    int sign;
    try {
      sign = detail::parse_sign_token(sign_tok);
    } catch (const Error& e) {
      throw Error("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (src_tok == dst_tok) {
      ++out.self_loops_dropped;
      continue;
    }
    out.edges.push_back({intern(src_tok), intern(dst_tok), sign});
  }
  if (out.edges.empty()) throw Error("edge list is empty");
  return out;
}

struct DegreeHistograms {
  std::map<std::size_t, std::size_t> positive;  // degree -> node count
  std::map<std::size_t, std::size_t> negative;
};

// Immutable undirected signed graph with per-sign sorted adjacency.
// Construction always goes through symmetrize(), so the edge set is
// canonical: src < dst, no duplicates, every endpoint < node_count.
class SignedGraph {
 public:
  std::size_t node_count() const { return pos_adj_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<EdgeRecord>& edges() const { return edges_; }
  const std::vector<std::string>& labels() const { return labels_; }

  const std::string& label(std::uint32_t v) const {
    check_node(v);
    return labels_[v];
  }

  const std::vector<std::uint32_t>& neighbors(std::uint32_t v, int sign) const {
    check_node(v);
    return sign > 0 ? pos_adj_[v] : neg_adj_[v];
  }

  // +1 / -1 / 0 (no edge)
  int sign_of(std::uint32_t a, std::uint32_t b) const {
    check_node(a);
    check_node(b);
    if (std::binary_search(pos_adj_[a].begin(), pos_adj_[a].end(), b)) return 1;
    if (std::binary_search(neg_adj_[a].begin(), neg_adj_[a].end(), b)) return -1;
    return 0;
  }

  std::size_t positive_edge_count() const { return pos_edges_; }
  std::size_t negative_edge_count() const { return neg_edges_; }
  std::size_t conflicts_resolved() const { return conflicts_; }
  std::size_t duplicates_collapsed() const { return duplicates_; }

  DegreeHistograms degree_stats() const {
    DegreeHistograms h;
    for (std::size_t v = 0; v < node_count(); ++v) {
      ++h.positive[pos_adj_[v].size()];
      ++h.negative[neg_adj_[v].size()];
    }
    return h;
  }

  friend SignedGraph symmetrize(std::size_t node_count,
                                const std::vector<EdgeRecord>& raw,
                                ConflictPolicy policy,
                                std::vector<std::string> labels);

 private:
  void check_node(std::uint32_t v) const {
    if (v >= node_count())
      throw Error("node index " + std::to_string(v) + " out of range (N=" +
                  std::to_string(node_count()) + ")");
  }

  std::vector<EdgeRecord> edges_;
  std::vector<std::vector<std::uint32_t>> pos_adj_;
  std::vector<std::vector<std::uint32_t>> neg_adj_;
  std::vector<std::string> labels_;
  std::size_t pos_edges_ = 0;
  std::size_t neg_edges_ = 0;
  std::size_t conflicts_ = 0;
  std::size_t duplicates_ = 0;
};

// Collapses directed/duplicate records into one undirected edge per pair.
// Conflicting signs are resolved per policy and counted. Self-loops are
// dropped and counted as duplicates of nothing (callers normally filter
// them at parse time).
inline SignedGraph symmetrize(std::size_t node_count,
                              const std::vector<EdgeRecord>& raw,
                              ConflictPolicy policy,
                              std::vector<std::string> labels = {}) {
  SignedGraph g;
  if (!labels.empty() && labels.size() != node_count)
    throw Error("label count does not match node count");

  struct PairState {
    int sign;
    bool dropped;
  };
  std::unordered_map<std::uint64_t, PairState> seen;
  seen.reserve(raw.size());

  std::size_t conflicts = 0, duplicates = 0;
  for (const EdgeRecord& e : raw) {
    if (e.src == e.dst) continue;
    if (e.src >= node_count || e.dst >= node_count)
      throw Error("edge endpoint exceeds node count");
    if (e.sign != 1 && e.sign != -1) throw Error("edge sign must be +1 or -1");
    std::uint32_t a = std::min(e.src, e.dst), b = std::max(e.src, e.dst);
    auto key = detail::pair_key(a, b);
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, PairState{e.sign, false});
      continue;
    }
    if (it->second.dropped) continue;
    if (it->second.sign == e.sign) {
      ++duplicates;
      continue;
    }
    ++conflicts;
    switch (policy) {
      case ConflictPolicy::NegativeWins: it->second.sign = -1; break;
      case ConflictPolicy::Drop: it->second.dropped = true; break;
      case ConflictPolicy::FirstWins: break;
    }
  }

  g.pos_adj_.assign(node_count, {});
  g.neg_adj_.assign(node_count, {});
  g.edges_.reserve(seen.size());
  for (const auto& [key, state] : seen) {
    if (state.dropped) continue;
    auto a = static_cast<std::uint32_t>(key >> 32);
    auto b = static_cast<std::uint32_t>(key & 0xffffffffu);
    g.edges_.push_back({a, b, state.sign});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const EdgeRecord& x, const EdgeRecord& y) {
    return x.src != y.src ? x.src < y.src : x.dst < y.dst;
  });
  for (const EdgeRecord& e : g.edges_) {
    auto& pa = e.sign > 0 ? g.pos_adj_ : g.neg_adj_;
    pa[e.src].push_back(e.dst);
    pa[e.dst].push_back(e.src);
    (e.sign > 0 ? g.pos_edges_ : g.neg_edges_)++;
  }
  for (auto& l : g.pos_adj_) std::sort(l.begin(), l.end());
  for (auto& l : g.neg_adj_) std::sort(l.begin(), l.end());

  if (labels.empty()) {
    g.labels_.reserve(node_count);
    for (std::size_t v = 0; v < node_count; ++v) g.labels_.push_back(std::to_string(v));
  } else {
    g.labels_ = std::move(labels);
  }
  g.conflicts_ = conflicts;
  g.duplicates_ = duplicates;
  return g;
}

inline SignedGraph symmetrize(const EdgeList& parsed, ConflictPolicy policy) {
  return symmetrize(parsed.labels.size(), parsed.edges, policy, parsed.labels);
}

inline SignedGraph load_graph(std::istream& in,
                              ConflictPolicy policy = ConflictPolicy::NegativeWins) {
  return symmetrize(load_edge_list(in), policy);
}

inline void save_edge_list(const SignedGraph& g, std::ostream& out) {
  for (const EdgeRecord& e : g.edges()) {
    out << g.label(e.src) << ' ' << g.label(e.dst) << ' ' << e.sign << '\n';
  }
}

struct SplitBundle {
  SignedGraph train;
  std::vector<EdgeRecord> validation;
  std::vector<EdgeRecord> test;
};

namespace detail {

// Largest-remainder apportionment of `total` into parts ~ ratios.
inline std::vector<std::size_t> apportion(std::size_t total,
                                          const std::vector<double>& ratios) {
  std::vector<std::size_t> counts(ratios.size());
  std::vector<std::pair<double, std::size_t>> rema;  // (-frac, idx) for stable sort
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    double exact = ratios[i] * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    rema.emplace_back(-(exact - std::floor(exact)), i);
  }
  std::stable_sort(rema.begin(), rema.end());
  for (std::size_t r = 0; assigned < total; ++r, ++assigned)
    ++counts[rema[r % rema.size()].second];
  return counts;
}

}  // namespace detail

// Uniform seeded partition of the edge set into train/validation/test.
// Reconstruction runs use ratios (1,0,0) and evaluate on the full set.
inline SplitBundle split_edges(const SignedGraph& g,
                               double train_ratio, double val_ratio, double test_ratio,
                               std::uint64_t seed) {
  if (train_ratio <= 0 || val_ratio < 0 || test_ratio < 0)
    throw Error("split ratios must be non-negative with train > 0");
  if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
    throw Error("split ratios must sum to 1");

  std::vector<std::size_t> order(g.edge_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  RandomEngine rng(derive_seed(seed, RngStream::split));
  rng.shuffle(order);

  auto counts = detail::apportion(g.edge_count(), {train_ratio, val_ratio, test_ratio});

  std::vector<EdgeRecord> train_edges, val_edges, test_edges;
  train_edges.reserve(counts[0]);
  val_edges.reserve(counts[1]);
  test_edges.reserve(counts[2]);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const EdgeRecord& e = g.edges()[order[i]];
    if (i < counts[0]) train_edges.push_back(e);
    else if (i < counts[0] + counts[1]) val_edges.push_back(e);
    else test_edges.push_back(e);
  }

  SplitBundle bundle{
      symmetrize(g.node_count(), train_edges, ConflictPolicy::FirstWins, g.labels()),
      std::move(val_edges), std::move(test_edges)};
  if (bundle.train.positive_edge_count() == 0 || bundle.train.negative_edge_count() == 0)
    throw Error("split leaves the training set without edges of both signs");
  return bundle;
}

}  // namespace hypersign
