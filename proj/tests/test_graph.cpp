#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "hypersign/graph.hpp"
#include "support/synthetic.hpp"

using namespace hypersign;
using Catch::Approx;

namespace {

SignedGraph graph_from(const std::string& text,
                       ConflictPolicy policy = ConflictPolicy::NegativeWins) {
  std::istringstream in(text);
  return load_graph(in, policy);
}

using LabeledEdge = std::tuple<std::string, std::string, int>;

std::set<LabeledEdge> labeled_edges(const SignedGraph& g) {
  std::set<LabeledEdge> out;
  for (const EdgeRecord& e : g.edges()) {
    std::string a = g.label(e.src), b = g.label(e.dst);
    if (b < a) std::swap(a, b);
    out.insert({a, b, e.sign});
  }
  return out;
}

}  // namespace

TEST_CASE("load_edge_list basics") {
  std::istringstream in("0 1 1\n1 2 -1\n");
  EdgeList parsed = load_edge_list(in);
  CHECK(parsed.labels.size() == 3);
  CHECK(parsed.edges.size() == 2);
  auto g = symmetrize(parsed, ConflictPolicy::NegativeWins);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.sign_of(0, 1) == 1);
  CHECK(g.sign_of(1, 2) == -1);
  CHECK(g.sign_of(0, 2) == 0);
}

TEST_CASE("load_edge_list comments, sign tokens, label interning") {
  std::istringstream in("# comment\na b +\n");
  EdgeList parsed = load_edge_list(in);
  CHECK(parsed.labels == std::vector<std::string>{"a", "b"});
  REQUIRE(parsed.edges.size() == 1);
  CHECK(parsed.edges[0] == EdgeRecord{0, 1, 1});

  std::istringstream minus("x y -\nx z -1\nx w +1\n");
  EdgeList p2 = load_edge_list(minus);
  CHECK(p2.edges[0].sign == -1);
  CHECK(p2.edges[1].sign == -1);
  CHECK(p2.edges[2].sign == 1);
}

TEST_CASE("load_edge_list drops self-loops with a count") {
  std::istringstream in("0 0 1\n0 1 1\n");
  EdgeList parsed = load_edge_list(in);
  CHECK(parsed.self_loops_dropped == 1);
  CHECK(parsed.edges.size() == 1);
}

TEST_CASE("load_edge_list error paths") {
  std::istringstream short_line("0 1\n");
  CHECK_THROWS_WITH(load_edge_list(short_line), Catch::Matchers::ContainsSubstring("line 1"));

  std::istringstream bad_sign("0 1 2\n");
  CHECK_THROWS_WITH(load_edge_list(bad_sign), Catch::Matchers::ContainsSubstring("sign"));

  std::istringstream empty("# nothing\n\n");
  CHECK_THROWS_AS(load_edge_list(empty), Error);
}

TEST_CASE("symmetrize collapses mirrored duplicates") {
  auto g = graph_from("0 1 1\n1 0 1\n");
  CHECK(g.edge_count() == 1);
  CHECK(g.sign_of(0, 1) == 1);
  CHECK(g.sign_of(1, 0) == 1);
  CHECK(g.duplicates_collapsed() == 1);
}

TEST_CASE("symmetrize conflict policies") {
  auto neg = graph_from("0 1 1\n1 0 -1\n", ConflictPolicy::NegativeWins);
  CHECK(neg.edge_count() == 1);
  CHECK(neg.sign_of(0, 1) == -1);
  CHECK(neg.conflicts_resolved() == 1);

  std::istringstream in("0 1 1\n1 0 -1\n");
  EdgeList parsed = load_edge_list(in);
  auto dropped = symmetrize(parsed, ConflictPolicy::Drop);
  CHECK(dropped.edge_count() == 0);

  auto first = symmetrize(parsed, ConflictPolicy::FirstWins);
  CHECK(first.edge_count() == 1);
  CHECK(first.sign_of(0, 1) == 1);
}

TEST_CASE("symmetrize is idempotent for every policy") {
  std::istringstream in(
      "a b 1\nb a -1\nc d -1\nd c -1\na c 1\nb d -1\nd b 1\na d 1\n");
  EdgeList parsed = load_edge_list(in);
  for (auto policy : {ConflictPolicy::NegativeWins, ConflictPolicy::Drop,
                      ConflictPolicy::FirstWins}) {
    auto once = symmetrize(parsed, policy);
    auto twice = symmetrize(once.node_count(), once.edges(), policy, once.labels());
    CHECK(once.edges() == twice.edges());
    CHECK(once.labels() == twice.labels());
  }
}

TEST_CASE("edge-list round trip preserves labeled edges") {
  std::istringstream in("n5 n1 1\nn2 n5 -1\nn9 n2 +\nn1 n2 -\n");
  auto g = load_graph(in);
  std::ostringstream out;
  save_edge_list(g, out);
  auto reloaded = graph_from(out.str());
  CHECK(labeled_edges(g) == labeled_edges(reloaded));
  std::set<std::string> l1(g.labels().begin(), g.labels().end());
  std::set<std::string> l2(reloaded.labels().begin(), reloaded.labels().end());
  CHECK(l1 == l2);
}

TEST_CASE("round trip on seeded random graphs") {
  RandomEngine rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<EdgeRecord> edges;
    std::size_t n = 2 + rng.index(30);
    std::size_t m = 1 + rng.index(80);
    for (std::size_t e = 0; e < m; ++e) {
      auto a = static_cast<std::uint32_t>(rng.index(n));
      auto b = static_cast<std::uint32_t>(rng.index(n));
      if (a == b) continue;
      edges.push_back({a, b, rng.real01() < 0.7 ? 1 : -1});
    }
    if (edges.empty()) continue;
    auto g = symmetrize(n, edges, ConflictPolicy::NegativeWins);
    if (g.edge_count() == 0) continue;
    std::ostringstream out;
    save_edge_list(g, out);
    auto r = graph_from(out.str());
    CHECK(labeled_edges(g) == labeled_edges(r));
  }
}

TEST_CASE("neighbors are sorted and per-sign") {
  auto g = graph_from("0 1 1\n0 2 -1\n");
  CHECK(g.neighbors(0, +1) == std::vector<std::uint32_t>{1});
  CHECK(g.neighbors(0, -1) == std::vector<std::uint32_t>{2});
  CHECK(g.neighbors(1, -1).empty());
  CHECK_THROWS_AS(g.neighbors(3, +1), Error);
}

TEST_CASE("degree_stats on a star") {
  auto g = testsupport::star(9, +1);
  auto h = g.degree_stats();
  CHECK(h.positive == std::map<std::size_t, std::size_t>{{9, 1}, {1, 9}});
  CHECK(h.negative == std::map<std::size_t, std::size_t>{{0, 10}});
}

TEST_CASE("degree_stats on an edge-free graph") {
  auto g = symmetrize(5, {}, ConflictPolicy::FirstWins);
  auto h = g.degree_stats();
  CHECK(h.positive == std::map<std::size_t, std::size_t>{{0, 5}});
  CHECK(h.negative == std::map<std::size_t, std::size_t>{{0, 5}});
}

TEST_CASE("degree_stats zero cases") {
  // N=5 with one far edge keeps three isolated nodes
  std::vector<EdgeRecord> edges{{3, 4, 1}};
  auto g = symmetrize(5, edges, ConflictPolicy::FirstWins);
  auto h = g.degree_stats();
  CHECK(h.positive == std::map<std::size_t, std::size_t>{{0, 3}, {1, 2}});
  CHECK(h.negative == std::map<std::size_t, std::size_t>{{0, 5}});

  auto ng = graph_from("0 1 -1\n");
  auto nh = ng.degree_stats();
  CHECK(nh.negative == std::map<std::size_t, std::size_t>{{1, 2}});
}

TEST_CASE("degree histogram mass equals twice the edge count per sign") {
  auto g = testsupport::bridged_cliques(6, 2);
  auto h = g.degree_stats();
  std::size_t pos_mass = 0, neg_mass = 0, pos_nodes = 0, neg_nodes = 0;
  for (auto [d, c] : h.positive) {
    pos_mass += d * c;
    pos_nodes += c;
  }
  for (auto [d, c] : h.negative) {
    neg_mass += d * c;
    neg_nodes += c;
  }
  CHECK(pos_mass == 2 * g.positive_edge_count());
  CHECK(neg_mass == 2 * g.negative_edge_count());
  CHECK(pos_nodes == g.node_count());
  CHECK(neg_nodes == g.node_count());
}

TEST_CASE("split_edges ratio arithmetic and determinism") {
  auto g = testsupport::hostile_cliques(2, 10);  // 90+10... exact: 2*45+100 = 190
  REQUIRE(g.edge_count() == 190);

  auto b = split_edges(g, 0.8, 0.1, 0.1, 1234);
  CHECK(b.train.edge_count() == 152);
  CHECK(b.validation.size() == 19);
  CHECK(b.test.size() == 19);

  auto b2 = split_edges(g, 0.8, 0.1, 0.1, 1234);
  CHECK(b.train.edges() == b2.train.edges());
  CHECK(b.validation == b2.validation);
  CHECK(b.test == b2.test);

  auto b3 = split_edges(g, 0.8, 0.1, 0.1, 99);
  CHECK(b.train.edges() != b3.train.edges());
}

TEST_CASE("split partition is disjoint and complete") {
  auto g = testsupport::bridged_cliques(8, 3);
  auto b = split_edges(g, 0.6, 0.2, 0.2, 5);
  auto key = [](const EdgeRecord& e) {
    return (static_cast<std::uint64_t>(e.src) << 32) | e.dst;
  };
  std::set<std::uint64_t> seen;
  std::size_t total = 0;
  auto absorb = [&](const std::vector<EdgeRecord>& edges) {
    for (const EdgeRecord& e : edges) {
      CHECK(seen.insert(key(e)).second);  // disjoint
      ++total;
    }
  };
  absorb(b.train.edges());
  absorb(b.validation);
  absorb(b.test);
  CHECK(total == g.edge_count());
}

TEST_CASE("split with ratios (1,0,0) reproduces the graph") {
  auto g = testsupport::two_cliques(5);
  auto b = split_edges(g, 1.0, 0.0, 0.0, 7);
  CHECK(b.train.edges() == g.edges());
  CHECK(b.validation.empty());
  CHECK(b.test.empty());
}

TEST_CASE("split errors") {
  auto g = testsupport::two_cliques(5);
  CHECK_THROWS_AS(split_edges(g, 0.5, 0.2, 0.2, 1), Error);  // sums to 0.9
  CHECK_THROWS_AS(split_edges(g, 0.0, 0.5, 0.5, 1), Error);

  // all-positive graph: every split leaves train without negatives
  auto pos = testsupport::star(4, +1);
  CHECK_THROWS_AS(split_edges(pos, 1.0, 0.0, 0.0, 1), Error);
}

TEST_CASE("symmetrize rejects invalid records") {
  std::vector<EdgeRecord> bad_endpoint{{0, 7, 1}};
  CHECK_THROWS_AS(symmetrize(3, bad_endpoint, ConflictPolicy::Drop), Error);
  std::vector<EdgeRecord> bad_sign{{0, 1, 3}};
  CHECK_THROWS_AS(symmetrize(3, bad_sign, ConflictPolicy::Drop), Error);
}
