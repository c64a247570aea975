#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <thread>
#include <vector>

#include "hypersign/error.hpp"
#include "hypersign/graph.hpp"
#include "hypersign/manifold.hpp"
#include "hypersign/rng.hpp"
#include "hypersign/sampler.hpp"

namespace hypersign {

enum class Retraction { Simple, Exponential };

inline const char* to_string(Retraction r) {
  return r == Retraction::Simple ? "simple" : "exp";
}

inline Retraction retraction_from_string(const std::string& s) {
  if (s == "simple") return Retraction::Simple;
  if (s == "exp") return Retraction::Exponential;
  throw Error("unknown retraction mode: '" + s + "'");
}

enum class LrDecay { Constant, LinearToZero };

inline const char* to_string(LrDecay d) {
  return d == LrDecay::Constant ? "constant" : "linear";
}

inline LrDecay lr_decay_from_string(const std::string& s) {
  if (s == "constant") return LrDecay::Constant;
  if (s == "linear") return LrDecay::LinearToZero;
  throw Error("unknown lr decay mode: '" + s + "'");
}

struct TrainConfig {
  std::size_t dim = 20;
  double margin = 1.0;
  double learning_rate = 0.05;
  std::size_t epochs = 100;
  std::size_t batch_size = 512;
  std::size_t triples_per_epoch = 0;  // 0: use the training edge count
  AugmentStrategy strategy = AugmentStrategy::VirtualNode;
  Retraction retraction = Retraction::Simple;
  LrDecay lr_decay = LrDecay::LinearToZero;
  double eps = kDefaultBallEps;
  double init_radius = kDefaultInitRadius;
  std::uint64_t seed = 42;
  bool freeze_anchor = false;  // update only the friend/enemy points
  std::size_t threads = 1;    // >1 is non-deterministic across thread counts

  void validate() const {
    if (dim == 0) throw Error("dim must be >= 1");
    if (margin <= 0) throw Error("margin must be > 0");
    if (learning_rate <= 0) throw Error("learning rate must be > 0");
    if (batch_size == 0) throw Error("batch size must be >= 1");
    if (eps <= 0 || eps >= 0.1) throw Error("eps must lie in (0, 0.1)");
    if (init_radius <= 0 || init_radius >= 1) throw Error("init radius must lie in (0, 1)");
    if (threads == 0) throw Error("threads must be >= 1");
  }
};

struct EpochStats {
  double mean_loss = 0;
  double zero_loss_fraction = 0;  // triples whose margin was already satisfied
  double max_norm = 0;
  double seconds = 0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::size_t degenerate_triples = 0;  // coincident points, skipped
  std::size_t inferred_edges = 0;
  std::size_t ineligible_nodes = 0;
};

// max(0, d(u_i,u_j) - d(u_i,u_k) + margin)
inline double triple_loss(const EmbeddingStore& store, const Triple& t, double margin) {
  double dij = poincare_distance(store.row(t.anchor), store.row(t.positive));
  double dik = poincare_distance(store.row(t.anchor), store.row(t.negative));
  return std::max(0.0, dij - dik + margin);
}

namespace detail {

// Sparse per-row gradient accumulator over a fixed-size buffer.
class GradAccumulator {
 public:
  void reset(std::size_t rows, std::size_t dim) {
    dim_ = dim;
    buffer_.assign(rows * dim, 0.0);
    touched_flag_.assign(rows, 0);
    touched_.clear();
  }

  std::span<double> touch(std::uint32_t row) {
    if (!touched_flag_[row]) {
      touched_flag_[row] = 1;
      touched_.push_back(row);
    }
    return {buffer_.data() + static_cast<std::size_t>(row) * dim_, dim_};
  }

  std::span<const double> at(std::uint32_t row) const {
    return {buffer_.data() + static_cast<std::size_t>(row) * dim_, dim_};
  }

  std::vector<std::uint32_t>& touched() { return touched_; }

  void clear_touched() {
    for (std::uint32_t r : touched_) {
      double* p = buffer_.data() + static_cast<std::size_t>(r) * dim_;
      std::fill(p, p + dim_, 0.0);
      touched_flag_[r] = 0;
    }
    touched_.clear();
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> buffer_;
  std::vector<std::uint8_t> touched_flag_;
  std::vector<std::uint32_t> touched_;
};

struct TripleGradStats {
  double loss_sum = 0;
  std::size_t zero_loss = 0;
  std::size_t degenerate = 0;
};

// Accumulates the Riemannian gradient of one triple's hinge into `acc`,
// evaluated against the pre-batch snapshot in `store`. Returns the hinge
// loss. Coincident anchor pairs are counted and skipped.
inline double accumulate_triple(const EmbeddingStore& store, const Triple& t,
                                double margin, bool freeze_anchor,
                                GradAccumulator& acc, TripleGradStats& stats,
                                std::vector<double>& scratch) {
  auto ui = store.row(t.anchor);
  auto uj = store.row(t.positive);
  auto uk = store.row(t.negative);
  double dij = poincare_distance(ui, uj);
  double dik = poincare_distance(ui, uk);
  double loss = dij - dik + margin;
  if (loss <= 0) {
    ++stats.zero_loss;
    return 0.0;
  }
  stats.loss_sum += loss;

  const std::size_t k = store.dim();
  scratch.resize(4 * k);
  std::span<double> gi_j(scratch.data(), k);        // d dij / d ui
  std::span<double> gj(scratch.data() + k, k);      // d dij / d uj
  std::span<double> gi_k(scratch.data() + 2 * k, k);  // d dik / d ui
  std::span<double> gk(scratch.data() + 3 * k, k);  // d dik / d uk

  bool coincident_ij = std::equal(ui.begin(), ui.end(), uj.begin());
  bool coincident_ik = std::equal(ui.begin(), ui.end(), uk.begin());
  if (coincident_ij || coincident_ik) {
    ++stats.degenerate;
    return loss;
  }

  poincare_distance_grad(ui, uj, gi_j, gj);
  poincare_distance_grad(ui, uk, gi_k, gk);

  // L = dij - dik + margin (active): dL/duj = gj, dL/duk = -gk,
  // dL/dui = gi_j - gi_k. Convert at each point and accumulate.
  to_riemannian_in_place(uj, gj);
  auto aj = acc.touch(t.positive);
  for (std::size_t c = 0; c < k; ++c) aj[c] += gj[c];

  to_riemannian_in_place(uk, gk);
  auto ak = acc.touch(t.negative);
  for (std::size_t c = 0; c < k; ++c) ak[c] -= gk[c];

  if (!freeze_anchor) {
    for (std::size_t c = 0; c < k; ++c) gi_j[c] -= gi_k[c];
    to_riemannian_in_place(ui, gi_j);
    auto ai = acc.touch(t.anchor);
    for (std::size_t c = 0; c < k; ++c) ai[c] += gi_j[c];
  }
  return loss;
}

inline void apply_accumulated(EmbeddingStore& store, GradAccumulator& acc,
                              double lr, Retraction mode) {
  auto& rows = acc.touched();
  std::sort(rows.begin(), rows.end());
  std::vector<double> step(store.dim());
  for (std::uint32_t r : rows) {
    auto g = acc.at(r);
    for (std::size_t c = 0; c < step.size(); ++c) step[c] = -lr * g[c];
    auto theta = store.row(r);
    if (mode == Retraction::Simple)
      retract_simple(theta, step, store.eps());
    else
      retract_exp(theta, step, store.eps());
  }
  acc.clear_touched();
}

}  // namespace detail

// One immediate RSGD update from a single triple. Returns true when any
// row changed (hinge active and non-degenerate).
inline bool triple_step(EmbeddingStore& store, const Triple& t, double margin,
                        double lr, Retraction mode = Retraction::Simple,
                        bool freeze_anchor = false) {
  detail::GradAccumulator acc;
  acc.reset(store.rows(), store.dim());
  detail::TripleGradStats stats;
  std::vector<double> scratch;
  detail::accumulate_triple(store, t, margin, freeze_anchor, acc, stats, scratch);
  if (stats.zero_loss > 0 || stats.degenerate > 0) return false;
  detail::apply_accumulated(store, acc, lr, mode);
  return true;
}

// Runs the RSGD loop over `store`, which must already hold
// aug.total_rows() rows. Batches stream deterministically from
// (config.seed, epoch); within a batch every gradient is evaluated against
// the same snapshot, summed per row and applied once, rows ascending.
using EpochCallback = std::function<void(std::size_t epoch, const EmbeddingStore&)>;

inline TrainReport train_in_place(EmbeddingStore& store, const AugmentedGraph& aug,
                                  TrainConfig config, std::ostream* log = nullptr,
                                  const EpochCallback& on_epoch = {}) {
  config.validate();
  if (store.rows() != aug.total_rows())
    throw Error("store row count does not match augmented graph");
  if (config.triples_per_epoch == 0)
    throw Error("triples per epoch must be resolved before training");
  config.batch_size = std::min(config.batch_size, config.triples_per_epoch);

  TrainReport report;
  report.inferred_edges = aug.inferred_edge_count();
  report.ineligible_nodes = aug.ineligible_node_count();

  const std::size_t triples_per_epoch = config.triples_per_epoch;
  const std::size_t batches_per_epoch =
      (triples_per_epoch + config.batch_size - 1) / config.batch_size;
  const std::size_t total_batches = config.epochs * batches_per_epoch;

  detail::GradAccumulator acc;
  acc.reset(store.rows(), store.dim());
  std::vector<detail::GradAccumulator> worker_acc;
  if (config.threads > 1) {
    worker_acc.resize(config.threads);
    for (auto& w : worker_acc) w.reset(store.rows(), store.dim());
  }

  if (log)
    *log << "# epoch\tmean_loss\tzero_loss_frac\tmax_norm\tseconds\n";

  std::vector<Triple> batch;
  std::vector<double> scratch;
  std::size_t batch_index = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    detail::TripleGradStats epoch_stats;
    std::size_t epoch_triples = 0;

    EpochStream stream(aug, triples_per_epoch, config.batch_size, config.seed, epoch);
    while (stream.next(batch)) {
      double lr = config.learning_rate;
      if (config.lr_decay == LrDecay::LinearToZero)
        lr *= 1.0 - static_cast<double>(batch_index) / static_cast<double>(total_batches);

      if (config.threads <= 1) {
        for (const Triple& t : batch)
          detail::accumulate_triple(store, t, config.margin, config.freeze_anchor,
                                    acc, epoch_stats, scratch);
      } else {
        const std::size_t nw = std::min(config.threads, batch.size());
        std::vector<detail::TripleGradStats> worker_stats(nw);
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < nw; ++w) {
          workers.emplace_back([&, w] {
            std::vector<double> local_scratch;
            for (std::size_t b = w; b < batch.size(); b += nw)
              detail::accumulate_triple(store, batch[b], config.margin,
                                        config.freeze_anchor, worker_acc[w],
                                        worker_stats[w], local_scratch);
          });
        }
        for (auto& th : workers) th.join();
        for (std::size_t w = 0; w < nw; ++w) {
          for (std::uint32_t r : worker_acc[w].touched()) {
            auto src = worker_acc[w].at(r);
            auto dst = acc.touch(r);
            for (std::size_t c = 0; c < store.dim(); ++c) dst[c] += src[c];
          }
          worker_acc[w].clear_touched();
          epoch_stats.loss_sum += worker_stats[w].loss_sum;
          epoch_stats.zero_loss += worker_stats[w].zero_loss;
          epoch_stats.degenerate += worker_stats[w].degenerate;
        }
      }

      if (!std::isfinite(epoch_stats.loss_sum))
        throw Error("non-finite loss in epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(batch_index) +
                    "; numerical guards failed");
      detail::apply_accumulated(store, acc, lr, config.retraction);
      epoch_triples += batch.size();
      ++batch_index;
    }

    auto t1 = std::chrono::steady_clock::now();
    EpochStats es;
    es.mean_loss = epoch_triples ? epoch_stats.loss_sum / static_cast<double>(epoch_triples) : 0.0;
    es.zero_loss_fraction =
        epoch_triples ? static_cast<double>(epoch_stats.zero_loss) / static_cast<double>(epoch_triples) : 0.0;
    es.max_norm = store.max_row_norm();
    es.seconds = std::chrono::duration<double>(t1 - t0).count();
    report.epochs.push_back(es);
    report.degenerate_triples += epoch_stats.degenerate;

    if (log) {
      *log << epoch << '\t' << es.mean_loss << '\t' << es.zero_loss_fraction << '\t'
           << es.max_norm << '\t' << es.seconds << '\n';
    }
    if (on_epoch) on_epoch(epoch, store);
  }
  return report;
}

struct TrainResult {
  EmbeddingStore store;
  AugmentedGraph augmented;
  TrainReport report;
};

// Full pipeline: augment, initialize near the origin, run RSGD.
inline TrainResult train(const SignedGraph& graph, TrainConfig config,
                         std::ostream* log = nullptr,
                         const EpochCallback& on_epoch = {}) {
  config.validate();
  if (graph.edge_count() == 0) throw Error("training graph has no edges");
  if (config.triples_per_epoch == 0) config.triples_per_epoch = graph.edge_count();
  if (config.triples_per_epoch < config.batch_size)
    config.batch_size = config.triples_per_epoch;

  AugmentedGraph aug = build_extended(graph, config.strategy, config.seed);
  EmbeddingStore store =
      init_embeddings(aug.total_rows(), config.dim, config.init_radius,
                      derive_seed(config.seed, RngStream::init), config.eps);
  TrainReport report = train_in_place(store, aug, config, log, on_epoch);
  return {std::move(store), std::move(aug), std::move(report)};
}

}  // namespace hypersign
