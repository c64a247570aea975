// hypersign: embed signed networks into the Poincare ball and evaluate
// link-sign prediction, reconstruction and hierarchy diagnostics.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypersign/analysis.hpp"
#include "hypersign/embedding_io.hpp"
#include "hypersign/evaluator.hpp"
#include "hypersign/graph.hpp"
#include "hypersign/manifest.hpp"
#include "hypersign/trainer.hpp"
#include "hypersign/version.hpp"

namespace hs = hypersign;
using nlohmann::json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

hs::SignedGraph load_graph_file(const std::string& path, const std::string& policy) {
  std::ifstream in(path);
  if (!in) throw hs::Error("cannot open graph file '" + path + "'");
  return hs::load_graph(in, hs::conflict_policy_from_string(policy));
}

hs::EdgeList load_edge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hs::Error("cannot open edge file '" + path + "'");
  return hs::load_edge_list(in);
}

hs::LoadedEmbeddings load_embedding_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hs::Error("cannot open embedding file '" + path + "'");
  auto loaded = hs::load_embeddings(in);
  hs::drop_virtual_rows(loaded);
  return loaded;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw hs::Error("cannot write '" + path + "'");
  return out;
}

std::unordered_map<std::string, std::uint32_t> row_index(
    const std::vector<std::string>& labels) {
  std::unordered_map<std::string, std::uint32_t> map;
  map.reserve(labels.size());
  for (std::uint32_t i = 0; i < labels.size(); ++i) map.emplace(labels[i], i);
  return map;
}

// Maps a parsed edge list onto embedding rows; fails loudly with the list
// of labels that have no embedding row.
std::vector<hs::EdgeRecord> edges_on_rows(
    const hs::EdgeList& parsed,
    const std::unordered_map<std::string, std::uint32_t>& rows) {
  std::vector<std::string> missing;
  for (const auto& label : parsed.labels)
    if (!rows.count(label)) missing.push_back(label);
  if (!missing.empty()) {
    std::string msg = "no embedding row for node(s):";
    std::size_t shown = 0;
    for (const auto& l : missing) {
      msg += " " + l;
      if (++shown == 10) {
        msg += " ... (" + std::to_string(missing.size()) + " total)";
        break;
      }
    }
    throw hs::Error(msg);
  }
  std::vector<hs::EdgeRecord> out;
  out.reserve(parsed.edges.size());
  for (const auto& e : parsed.edges)
    out.push_back({rows.at(parsed.labels[e.src]), rows.at(parsed.labels[e.dst]), e.sign});
  return out;
}

// Reorders embedding rows to match graph node indices.
hs::EmbeddingStore store_for_graph(const hs::LoadedEmbeddings& emb,
                                   const hs::SignedGraph& graph) {
  auto rows = row_index(emb.labels);
  hs::EmbeddingStore out(graph.node_count(), emb.store.dim(), emb.store.eps());
  std::vector<std::string> missing;
  for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
    auto it = rows.find(graph.label(v));
    if (it == rows.end()) {
      missing.push_back(graph.label(v));
      continue;
    }
    auto src = emb.store.row(it->second);
    auto dst = out.row(v);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = src[c];
  }
  if (!missing.empty())
    throw hs::Error("no embedding row for node(s): " + missing.front() +
                    (missing.size() > 1
                         ? " and " + std::to_string(missing.size() - 1) + " more"
                         : ""));
  return out;
}

std::string format_ratio(double r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", r);
  return buf;
}

void print_powerlaw(std::ostream& out, const char* tag,
                    const std::map<std::size_t, std::size_t>& hist,
                    std::size_t degree_min) {
  out << "# " << tag << " degree histogram (degree\tcount)\n";
  for (const auto& [degree, count] : hist) out << degree << '\t' << count << '\n';
  try {
    auto fit = hs::powerlaw_summary(hist, degree_min);
    out << "# " << tag << " power-law fit: exponent=" << fit.exponent
        << " r2=" << fit.r_squared << " range=[" << fit.degree_min << ","
        << fit.degree_max << "] points=" << fit.support_points << '\n';
  } catch (const hs::Error& e) {
    out << "# " << tag << " power-law fit: unavailable (" << e.what() << ")\n";
  }
}

json confusion_json(const hs::ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

json report_json(const hs::EvalReport& r) {
  return {{"macro_f1", r.macro_f1},
          {"micro_f1", r.micro_f1},
          {"auc", r.auc},
          {"threshold", r.threshold},
          {"confusion", confusion_json(r.confusion)}};
}

void add_train_flags(CLI::App* cmd, hs::TrainConfig& cfg, std::string& augment,
                     std::string& retraction, std::string& decay) {
  cmd->add_option("--dim", cfg.dim, "Embedding dimension")->capture_default_str();
  cmd->add_option("--margin", cfg.margin, "Hinge margin between friend and enemy distances")
      ->capture_default_str();
  cmd->add_option("--lr", cfg.learning_rate, "Initial learning rate")->capture_default_str();
  cmd->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--batch-size", cfg.batch_size, "Triples per batch")->capture_default_str();
  cmd->add_option("--triples-per-epoch", cfg.triples_per_epoch,
                  "Triples sampled per epoch (0: edge count)")
      ->capture_default_str();
  cmd->add_option("--augment", augment,
                  "Extended-adjacency strategy: random|virtual|balance")
      ->capture_default_str();
  cmd->add_option("--retraction", retraction, "Retraction: simple|exp")->capture_default_str();
  cmd->add_option("--lr-decay", decay, "Learning-rate schedule: constant|linear")
      ->capture_default_str();
  cmd->add_option("--eps", cfg.eps, "Ball guard: rows stay at norm <= 1-eps")
      ->capture_default_str();
  cmd->add_option("--init-radius", cfg.init_radius, "Max norm of the random initialization")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Master seed for all random sub-streams")
      ->capture_default_str();
  cmd->add_flag("--freeze-anchor", cfg.freeze_anchor,
                "Update only the friend/enemy rows of each triple");
  cmd->add_option("--threads", cfg.threads,
                  "Worker threads (>1 is non-deterministic across thread counts)")
      ->capture_default_str();
}

json train_config_json(const hs::TrainConfig& cfg) {
  return {{"dim", cfg.dim},
          {"margin", cfg.margin},
          {"lr", cfg.learning_rate},
          {"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"triples_per_epoch", cfg.triples_per_epoch},
          {"augment", hs::to_string(cfg.strategy)},
          {"retraction", hs::to_string(cfg.retraction)},
          {"lr_decay", hs::to_string(cfg.lr_decay)},
          {"eps", cfg.eps},
          {"init_radius", cfg.init_radius},
          {"seed", cfg.seed},
          {"freeze_anchor", cfg.freeze_anchor},
          {"threads", cfg.threads}};
}

int run(int argc, char** argv) {
  CLI::App app{"Signed-network embedding in the Poincare ball"};
  app.set_version_flag("--version", std::string(hs::kVersion));
  app.require_subcommand(1);

  // ---- stats ----------------------------------------------------------
  auto* stats = app.add_subcommand("stats", "Per-sign degree histograms and power-law fits");
  std::string stats_graph, stats_policy = "negative-wins";
  std::size_t stats_degree_min = 1;
  stats->add_option("graph", stats_graph, "Edge-list file")->required();
  stats->add_option("--policy", stats_policy,
                    "Conflicting-sign policy: negative-wins|drop|first-wins")
      ->capture_default_str();
  stats->add_option("--degree-min", stats_degree_min, "Smallest degree used in the fit")
      ->capture_default_str();
  stats->callback([&] {
    auto g = load_graph_file(stats_graph, stats_policy);
    std::cout << "# nodes=" << g.node_count() << " edges=" << g.edge_count()
              << " positive=" << g.positive_edge_count()
              << " negative=" << g.negative_edge_count() << '\n';
    auto h = g.degree_stats();
    print_powerlaw(std::cout, "positive", h.positive, stats_degree_min);
    print_powerlaw(std::cout, "negative", h.negative, stats_degree_min);
  });

  // ---- split ----------------------------------------------------------
  auto* split = app.add_subcommand("split", "Partition edges into train/validation/test files");
  std::string split_graph, split_prefix, split_policy = "negative-wins";
  double r_train = 0.8, r_val = 0.1, r_test = 0.1;
  std::uint64_t split_seed = 42;
  split->add_option("graph", split_graph, "Edge-list file")->required();
  split->add_option("--out", split_prefix, "Output prefix")->required();
  split->add_option("--train", r_train, "Training fraction")->capture_default_str();
  split->add_option("--val", r_val, "Validation fraction")->capture_default_str();
  split->add_option("--test", r_test, "Test fraction")->capture_default_str();
  split->add_option("--seed", split_seed, "Partition seed")->capture_default_str();
  split->add_option("--policy", split_policy, "Conflicting-sign policy")->capture_default_str();
  split->callback([&] {
    Timer timer;
    auto g = load_graph_file(split_graph, split_policy);
    auto bundle = hs::split_edges(g, r_train, r_val, r_test, split_seed);

    auto write_edges = [&](const std::string& path, const std::vector<hs::EdgeRecord>& edges) {
      auto out = open_output(path);
      for (const auto& e : edges)
        out << g.label(e.src) << ' ' << g.label(e.dst) << ' ' << e.sign << '\n';
    };
    std::string train_path = split_prefix + ".train.edges";
    std::string val_path = split_prefix + ".val.edges";
    std::string test_path = split_prefix + ".test.edges";
    write_edges(train_path, bundle.train.edges());
    write_edges(val_path, bundle.validation);
    write_edges(test_path, bundle.test);

    hs::RunManifest m;
    m.subcommand = "split";
    m.seed = split_seed;
    m.config = {{"train", format_ratio(r_train)},
                {"val", format_ratio(r_val)},
                {"test", format_ratio(r_test)},
                {"policy", split_policy},
                {"counts",
                 {{"train", bundle.train.edge_count()},
                  {"val", bundle.validation.size()},
                  {"test", bundle.test.size()}}}};
    m.inputs = {split_graph};
    m.outputs = {train_path, val_path, test_path};
    m.wall_clock_seconds = timer.seconds();
    hs::write_manifest(split_prefix + ".manifest.json", m);
    std::cout << "train=" << bundle.train.edge_count() << " val=" << bundle.validation.size()
              << " test=" << bundle.test.size() << '\n';
  });

  // ---- train ----------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Learn Poincare-ball embeddings with RSGD");
  std::string train_graph, train_out, train_policy = "negative-wins";
  std::string train_log_path, augment = "virtual", retraction = "simple", decay = "linear";
  std::size_t ckpt_every = 0;
  bool include_virtual = false;
  hs::TrainConfig cfg;
  train_cmd->add_option("graph", train_graph, "Training edge-list file")->required();
  train_cmd->add_option("--out", train_out, "Embedding TSV output")->required();
  train_cmd->add_option("--policy", train_policy, "Conflicting-sign policy")
      ->capture_default_str();
  add_train_flags(train_cmd, cfg, augment, retraction, decay);
  train_cmd->add_option("--log", train_log_path,
                        "Write the per-epoch TSV log here instead of stdout");
  train_cmd->add_option("--ckpt-every", ckpt_every,
                        "Checkpoint embeddings every N epochs (0: off)")
      ->capture_default_str();
  train_cmd->add_flag("--include-virtual", include_virtual,
                      "Also persist virtual-node rows");
  train_cmd->callback([&] {
    Timer timer;
    cfg.strategy = hs::augment_strategy_from_string(augment);
    cfg.retraction = hs::retraction_from_string(retraction);
    cfg.lr_decay = hs::lr_decay_from_string(decay);

    auto g = load_graph_file(train_graph, train_policy);

    std::ofstream log_file;
    std::ostream* log = &std::cout;
    if (!train_log_path.empty()) {
      log_file = open_output(train_log_path);
      log = &log_file;
    }

    auto save_to = [&](const std::string& path, const hs::EmbeddingStore& store) {
      auto out = open_output(path);
      std::size_t virtual_rows = store.rows() - g.node_count();
      if (include_virtual) {
        hs::save_embeddings(out, store, g.labels(), virtual_rows);
      } else {
        hs::save_embeddings(out, hs::head_rows(store, g.node_count()), g.labels(), 0);
      }
    };

    hs::EpochCallback on_epoch;
    if (ckpt_every > 0) {
      on_epoch = [&](std::size_t epoch, const hs::EmbeddingStore& store) {
        if ((epoch + 1) % ckpt_every == 0)
          save_to(train_out + ".epoch" + std::to_string(epoch) + ".tsv", store);
      };
    }

    auto result = hs::train(g, cfg, log, on_epoch);
    save_to(train_out, result.store);

    *log << "# inferred_edges=" << result.report.inferred_edges
         << " ineligible_nodes=" << result.report.ineligible_nodes
         << " degenerate_triples=" << result.report.degenerate_triples << '\n';

    hs::RunManifest m;
    m.subcommand = "train";
    m.seed = cfg.seed;
    m.config = train_config_json(cfg);
    m.config["policy"] = train_policy;
    m.config["include_virtual"] = include_virtual;
    m.inputs = {train_graph};
    m.outputs = {train_out};
    m.wall_clock_seconds = timer.seconds();
    hs::write_manifest(train_out + ".manifest.json", m);
  });

  // ---- eval -----------------------------------------------------------
  auto* eval_cmd =
      app.add_subcommand("eval", "Fit a sign threshold on validation edges and score test edges");
  std::string eval_emb, eval_val, eval_test, eval_out, eval_pred, eval_metric = "macro";
  double fixed_threshold = 0;
  bool has_fixed_threshold = false;
  eval_cmd->add_option("--embeddings", eval_emb, "Embedding TSV")->required();
  eval_cmd->add_option("--val", eval_val, "Validation edge-list (threshold fitting)")
      ->required();
  eval_cmd->add_option("--test", eval_test, "Test edge-list (for reconstruction, pass the full "
                                            "edge set as both --val and --test)")
      ->required();
  eval_cmd->add_option("--threshold-metric", eval_metric, "Grid-search objective: macro|micro")
      ->capture_default_str();
  eval_cmd
      ->add_option("--threshold", fixed_threshold,
                   "Skip fitting and use this score threshold")
      ->each([&](const std::string&) { has_fixed_threshold = true; });
  eval_cmd->add_option("--out", eval_out, "Also write the report JSON here");
  eval_cmd->add_option("--predictions", eval_pred,
                       "Dump per-edge TSV: src dst sign score predicted");
  eval_cmd->callback([&] {
    Timer timer;
    auto emb = load_embedding_file(eval_emb);
    auto rows = row_index(emb.labels);
    auto val_parsed = load_edge_file(eval_val);
    auto test_parsed = load_edge_file(eval_test);
    auto val_edges = edges_on_rows(val_parsed, rows);
    auto test_edges = edges_on_rows(test_parsed, rows);

    double threshold = has_fixed_threshold
                           ? fixed_threshold
                           : hs::fit_threshold(emb.store, val_edges,
                                               hs::threshold_metric_from_string(eval_metric));
    auto report = hs::evaluate(emb.store, test_edges, threshold);

    json j = report_json(report);
    j["val_edges"] = val_edges.size();
    j["test_edges"] = test_edges.size();
    std::cout << j.dump(2) << '\n';

    if (!eval_pred.empty()) {
      auto out = open_output(eval_pred);
      out << "# src\tdst\tsign\tscore\tpredicted\n";
      for (const auto& e : test_edges) {
        double s = hs::score(emb.store, e.src, e.dst);
        out << emb.labels[e.src] << '\t' << emb.labels[e.dst] << '\t' << e.sign << '\t'
            << s << '\t' << (s >= threshold ? 1 : -1) << '\n';
      }
    }
    if (!eval_out.empty()) {
      auto out = open_output(eval_out);
      out << j.dump(2) << '\n';
      hs::RunManifest m;
      m.subcommand = "eval";
      m.config = {{"threshold_metric", eval_metric},
                  {"fixed_threshold", has_fixed_threshold}};
      m.inputs = {eval_emb, eval_val, eval_test};
      m.outputs = {eval_out};
      if (!eval_pred.empty()) m.outputs.push_back(eval_pred);
      m.wall_clock_seconds = timer.seconds();
      hs::write_manifest(eval_out + ".manifest.json", m);
    }
  });

  // ---- bands ----------------------------------------------------------
  auto* bands_cmd = app.add_subcommand("bands", "Radius-band hierarchy summary");
  std::string bands_emb, bands_graph, bands_out, bands_policy = "negative-wins";
  std::size_t band_count = 5;
  bands_cmd->add_option("--embeddings", bands_emb, "Embedding TSV")->required();
  bands_cmd->add_option("--graph", bands_graph, "Edge-list file")->required();
  bands_cmd->add_option("--bands", band_count, "Number of quantile bands")
      ->capture_default_str();
  bands_cmd->add_option("--policy", bands_policy, "Conflicting-sign policy")
      ->capture_default_str();
  bands_cmd->add_option("--out", bands_out, "Write the TSV here instead of stdout");
  bands_cmd->callback([&] {
    Timer timer;
    auto emb = load_embedding_file(bands_emb);
    auto g = load_graph_file(bands_graph, bands_policy);
    auto store = store_for_graph(emb, g);
    auto bands = hs::radius_bands(store, g, band_count);

    auto emit = [&](std::ostream& out) {
      out << "# band\tsize\td_pos\td_neg\tratio\tmean_norm\n";
      for (const auto& b : bands)
        out << b.band << '\t' << b.nodes.size() << '\t' << b.mean_pos_degree << '\t'
            << b.mean_neg_degree << '\t' << b.degree_ratio << '\t' << b.mean_norm << '\n';
    };
    if (bands_out.empty()) {
      emit(std::cout);
    } else {
      auto out = open_output(bands_out);
      emit(out);
      hs::RunManifest m;
      m.subcommand = "bands";
      m.config = {{"bands", band_count}, {"policy", bands_policy}};
      m.inputs = {bands_emb, bands_graph};
      m.outputs = {bands_out};
      m.wall_clock_seconds = timer.seconds();
      hs::write_manifest(bands_out + ".manifest.json", m);
    }
  });

  // ---- profile --------------------------------------------------------
  auto* profile_cmd =
      app.add_subcommand("profile", "Per-node norm and mean distance to the rest");
  std::string profile_emb, profile_out;
  std::size_t exact_cutoff = 2000, sample_size = 512;
  std::uint64_t profile_seed = 0;
  profile_cmd->add_option("--embeddings", profile_emb, "Embedding TSV")->required();
  profile_cmd->add_option("--exact-cutoff", exact_cutoff,
                          "Use exact all-pairs distances up to this many nodes")
      ->capture_default_str();
  profile_cmd->add_option("--sample-size", sample_size,
                          "Sampled pairs per node above the cutoff")
      ->capture_default_str();
  profile_cmd->add_option("--seed", profile_seed, "Sampling seed")->capture_default_str();
  profile_cmd->add_option("--out", profile_out, "Write the TSV here instead of stdout");
  profile_cmd->callback([&] {
    Timer timer;
    auto emb = load_embedding_file(profile_emb);
    auto rows = hs::centrality_profile(emb.store, exact_cutoff, sample_size, profile_seed);
    auto emit = [&](std::ostream& out) {
      out << "# label\tnorm\tmean_distance\n";
      for (const auto& r : rows)
        out << emb.labels[r.node] << '\t' << r.norm << '\t' << r.mean_distance << '\n';
    };
    if (profile_out.empty()) {
      emit(std::cout);
    } else {
      auto out = open_output(profile_out);
      emit(out);
      hs::RunManifest m;
      m.subcommand = "profile";
      m.seed = profile_seed;
      m.config = {{"exact_cutoff", exact_cutoff}, {"sample_size", sample_size}};
      m.inputs = {profile_emb};
      m.outputs = {profile_out};
      m.wall_clock_seconds = timer.seconds();
      hs::write_manifest(profile_out + ".manifest.json", m);
    }
  });

  // ---- features -------------------------------------------------------
  auto* feat_cmd = app.add_subcommand(
      "features", "Per-edge feature vectors for external classifier pipelines");
  std::string feat_emb, feat_graph, feat_out, feat_policy = "negative-wins";
  std::string feat_op = "hadamard";
  feat_cmd->add_option("--embeddings", feat_emb, "Embedding TSV")->required();
  feat_cmd->add_option("--graph", feat_graph, "Edge-list file")->required();
  feat_cmd->add_option("--operator", feat_op,
                       "hadamard|l1|l2|concat|average")
      ->capture_default_str();
  feat_cmd->add_option("--policy", feat_policy, "Conflicting-sign policy")
      ->capture_default_str();
  feat_cmd->add_option("--out", feat_out, "Write the TSV here instead of stdout");
  feat_cmd->callback([&] {
    Timer timer;
    auto op = hs::edge_operator_from_string(feat_op);
    auto emb = load_embedding_file(feat_emb);
    auto g = load_graph_file(feat_graph, feat_policy);
    auto store = store_for_graph(emb, g);

    auto emit = [&](std::ostream& out) {
      out << "# operator=" << hs::to_string(op) << "\tsrc\tdst\tsign\tfeatures...\n";
      for (const auto& e : g.edges()) {
        auto f = hs::edge_features(store, op, e.src, e.dst);
        out << g.label(e.src) << '\t' << g.label(e.dst) << '\t' << e.sign;
        for (double x : f) out << '\t' << x;
        out << '\n';
      }
    };
    if (feat_out.empty()) {
      emit(std::cout);
    } else {
      auto out = open_output(feat_out);
      emit(out);
      hs::RunManifest m;
      m.subcommand = "features";
      m.config = {{"operator", feat_op}, {"policy", feat_policy}};
      m.inputs = {feat_emb, feat_graph};
      m.outputs = {feat_out};
      m.wall_clock_seconds = timer.seconds();
      hs::write_manifest(feat_out + ".manifest.json", m);
    }
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const hs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
