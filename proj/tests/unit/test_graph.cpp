#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "kgprobe/error.hpp"
#include "kgprobe/kg/components.hpp"
#include "kgprobe/kg/structure.hpp"
#include "support/graphs.hpp"

using namespace kgprobe;
using namespace kgprobe::kg;
using kgprobe::support::tri;

namespace {

std::vector<std::string> names(const KnowledgeGraph& g) { return {g.entities().begin(), g.entities().end()}; }

std::set<std::string> name_set(const KnowledgeGraph& g) { return {g.entities().begin(), g.entities().end()}; }

}  // namespace

TEST(BuildGraph, Empty) {
  auto g = build_graph({});
  EXPECT_EQ(g.num_entities(), 0u);
  EXPECT_EQ(g.num_triplets(), 0u);
}

TEST(BuildGraph, PathOfThree) {
  auto g = build_graph({tri("A", "r", "B"), tri("B", "r", "C")});
  EXPECT_EQ(g.num_entities(), 3u);
  EXPECT_EQ(g.num_triplets(), 2u);
  auto b = g.require_entity("B");
  std::vector<std::string> nb;
  for (auto u : g.neighbors(b)) nb.push_back(g.entity_name(u));
  EXPECT_EQ(nb, (std::vector<std::string>{"A", "C"}));
}

TEST(BuildGraph, ParallelEdges) {
  auto g = build_graph({tri("A", "r", "B"), tri("A", "s", "B")});
  auto a = g.require_entity("A");
  EXPECT_EQ(g.neighbors(a).size(), 1u);
  EXPECT_EQ(g.incident(a).size(), 2u);
  EXPECT_EQ(degree(g, "A", DegreeKind::triplet), 2u);
  EXPECT_EQ(degree(g, "A", DegreeKind::neighbor), 1u);
  EXPECT_EQ(g.num_relations(), 2u);
}

TEST(BuildGraph, FirstAppearanceOrder) {
  auto g = build_graph({tri("C", "r", "A"), tri("B", "r", "C"), tri("D", "r", "B")});
  EXPECT_EQ(names(g), (std::vector<std::string>{"C", "A", "B", "D"}));
}

TEST(BuildGraph, SelfLoop) {
  auto g = build_graph({tri("A", "r", "A"), tri("A", "r", "B")});
  auto a = g.require_entity("A");
  EXPECT_EQ(g.incident(a).size(), 2u);
  EXPECT_EQ(g.neighbors(a).size(), 1u);
}

TEST(BuildGraph, UnknownEntity) {
  auto g = build_graph({tri("A", "r", "B")});
  EXPECT_THROW(g.require_entity("Z"), InputError);
  EXPECT_THROW(degree(g, "Z", DegreeKind::triplet), InputError);
  EXPECT_THROW(clustering_coefficient(g, "Z"), InputError);
}

// |N(v)| <= |T(v)| and both agree with a recount from the raw list.
TEST(BuildGraph, AdjacencyMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto g = support::random_graph(seed, 3 + seed % 20, seed * 2);
    for (EntityId v = 0; v < g.num_entities(); ++v) {
      const auto& name = g.entity_name(v);
      std::size_t t_count = 0;
      std::set<std::string> nbrs;
      for (const auto& t : g.triplets()) {
        if (t.head == name || t.tail == name) ++t_count;
        if (t.head == name && t.tail != name) nbrs.insert(t.tail);
        if (t.tail == name && t.head != name) nbrs.insert(t.head);
      }
      EXPECT_EQ(g.incident(v).size(), t_count);
      EXPECT_EQ(g.neighbors(v).size(), nbrs.size());
      EXPECT_LE(g.neighbors(v).size(), g.incident(v).size());
      for (auto id : g.incident(v)) {
        const auto& t = g.triplet(id);
        EXPECT_TRUE(t.head == name || t.tail == name);
      }
    }
  }
}

TEST(WithEntities, Validation) {
  EXPECT_THROW(KnowledgeGraph::with_entities({"A", "A"}, {}), InputError);
  EXPECT_THROW(KnowledgeGraph::with_entities({"A"}, {tri("A", "r", "B")}), InputError);
  auto g = KnowledgeGraph::with_entities({"X", "A", "B"}, {tri("A", "r", "B")});
  EXPECT_EQ(g.num_entities(), 3u);
  EXPECT_TRUE(g.neighbors(0).empty());
}

TEST(Components, StrongPicksTwoCycle) {
  auto g = build_graph({tri("A", "r", "B"), tri("C", "r", "D"), tri("D", "r", "C")});
  auto lcc = largest_connected_component(g, Connectivity::strong);
  EXPECT_EQ(name_set(lcc), (std::set<std::string>{"C", "D"}));
  EXPECT_EQ(lcc.num_triplets(), 2u);
}

TEST(Components, WeakTriangleIsIdentity) {
  auto g = build_graph({tri("A", "r", "B"), tri("B", "r", "C"), tri("C", "r", "A")});
  auto lcc = largest_connected_component(g, Connectivity::weak);
  EXPECT_EQ(names(lcc), names(g));
  EXPECT_EQ(lcc.triplets(), g.triplets());
}

TEST(Components, StarTieBreakReturnsFirstEntity) {
  auto g = build_graph({tri("A", "r", "B"), tri("A", "r", "C")});
  EXPECT_EQ(connected_components(g, Connectivity::strong).size(), 3u);
  auto lcc = largest_connected_component(g, Connectivity::strong);
  EXPECT_EQ(names(lcc), (std::vector<std::string>{"A"}));
  EXPECT_EQ(lcc.num_triplets(), 0u);
}

TEST(Components, EmptyGraphIsError) {
  EXPECT_THROW(largest_connected_component(build_graph({}), Connectivity::weak), InputError);
}

TEST(Components, KeepsParallelAndSelfLoopTriplets) {
  auto g = build_graph({tri("A", "r", "B"), tri("B", "r", "A"), tri("A", "s", "B"), tri("A", "r", "A"),
                        tri("B", "r", "C")});
  auto lcc = largest_connected_component(g, Connectivity::strong);
  EXPECT_EQ(name_set(lcc), (std::set<std::string>{"A", "B"}));
  EXPECT_EQ(lcc.num_triplets(), 4u);
}

// SCCs from the transitive closure (Floyd-Warshall reachability).
TEST(Components, StrongMatchesReachabilityOracle) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 2 + seed % 49;
    auto g = support::random_graph(1000 + seed, n, seed % 3 == 0 ? n / 2 : n);
    const auto N = g.num_entities();
    std::vector<std::vector<char>> reach(N, std::vector<char>(N, 0));
    for (std::size_t i = 0; i < N; ++i) reach[i][i] = 1;
    for (const auto& e : g.edges()) reach[e.head][e.tail] = 1;
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t i = 0; i < N; ++i)
        if (reach[i][k])
          for (std::size_t j = 0; j < N; ++j)
            if (reach[k][j]) reach[i][j] = 1;
    std::vector<std::vector<EntityId>> oracle;
    std::vector<char> done(N, 0);
    for (EntityId i = 0; i < N; ++i) {
      if (done[i]) continue;
      std::vector<EntityId> comp;
      for (EntityId j = 0; j < N; ++j)
        if (reach[i][j] && reach[j][i]) comp.push_back(j), done[j] = 1;
      oracle.push_back(comp);
    }
    auto comps = connected_components(g, Connectivity::strong);
    for (auto& c : comps) std::sort(c.begin(), c.end());
    EXPECT_EQ(comps, oracle) << "seed " << seed;

    std::size_t best = 0;
    for (std::size_t c = 1; c < oracle.size(); ++c)
      if (oracle[c].size() > oracle[best].size()) best = c;
    auto lcc = largest_connected_component(g, Connectivity::strong);
    std::set<std::string> expect;
    for (auto v : oracle[best]) expect.insert(g.entity_name(v));
    EXPECT_EQ(name_set(lcc), expect);
    std::size_t inside = 0;
    for (const auto& t : g.triplets()) inside += expect.count(t.head) && expect.count(t.tail);
    EXPECT_EQ(lcc.num_triplets(), inside);
  }
}

TEST(Components, WeakMatchesUnionOfUndirectedReachability) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto g = support::random_graph(500 + seed, 30, 5);
    auto a = support::adjacency(g);
    const auto N = g.num_entities();
    std::vector<int> label(N, -1);
    int next = 0;
    for (std::size_t s = 0; s < N; ++s) {
      if (label[s] >= 0) continue;
      std::vector<std::size_t> stack{s};
      label[s] = next;
      while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        for (std::size_t w = 0; w < N; ++w)
          if (a[u][w] && label[w] < 0) label[w] = next, stack.push_back(w);
      }
      ++next;
    }
    EXPECT_EQ(connected_components(g, Connectivity::weak).size(), static_cast<std::size_t>(next));
  }
}

TEST(Structure, TriangleAndPath) {
  auto tri_g = build_graph({tri("A", "r", "B"), tri("B", "r", "C"), tri("C", "r", "A")});
  for (EntityId v = 0; v < 3; ++v) {
    EXPECT_EQ(degree(tri_g, v, DegreeKind::neighbor), 2u);
    EXPECT_DOUBLE_EQ(clustering_coefficient(tri_g, v), 1.0);
  }
  auto path = build_graph({tri("A", "r", "B"), tri("B", "r", "C")});
  EXPECT_DOUBLE_EQ(clustering_coefficient(path, "B"), 0.0);
  EXPECT_DOUBLE_EQ(clustering_coefficient(path, "A"), 0.0);
}

TEST(Structure, ClusteringIgnoresMultiEdgesAndLoops) {
  auto g = build_graph({tri("A", "r", "B"), tri("A", "s", "B"), tri("B", "r", "C"), tri("C", "r", "A"),
                        tri("A", "r", "A"), tri("A", "r", "D")});
  // A: neighbours {B, C, D}, one closed pair (B, C) of three.
  EXPECT_DOUBLE_EQ(clustering_coefficient(g, "A"), 1.0 / 3.0);
}

TEST(Structure, ClusteringMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto g = support::random_graph(77 + seed, 4 + seed % 15, 3 * (seed % 10));
    auto a = support::adjacency(g);
    for (EntityId v = 0; v < g.num_entities(); ++v) {
      std::vector<std::size_t> nb;
      for (std::size_t u = 0; u < a.size(); ++u)
        if (a[v][u]) nb.push_back(u);
      double expect = 0.0;
      if (nb.size() >= 2) {
        std::size_t links = 0;
        for (std::size_t i = 0; i < nb.size(); ++i)
          for (std::size_t j = i + 1; j < nb.size(); ++j) links += a[nb[i]][nb[j]];
        expect = 2.0 * static_cast<double>(links) / static_cast<double>(nb.size() * (nb.size() - 1));
      }
      const double c = clustering_coefficient(g, v);
      EXPECT_NEAR(c, expect, 1e-15);
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
      EXPECT_EQ(c == 1.0, nb.size() >= 2 && expect == 1.0);
    }
  }
}

TEST(Structure, SummaryAveragesAreHandCounts) {
  // Two triangles sharing C, plus a pendant E-F edge duplicated.
  auto g = build_graph({tri("A", "r", "B"), tri("B", "r", "C"), tri("C", "r", "A"), tri("C", "r", "D"),
                        tri("D", "r", "E"), tri("E", "r", "C"), tri("E", "r", "F"), tri("E", "s", "F")});
  auto s = summarize(g);
  EXPECT_EQ(s.nodes, 6u);
  EXPECT_EQ(s.triplets, 8u);
  EXPECT_EQ(s.relations, 2u);
  EXPECT_DOUBLE_EQ(s.avg_degree_triplet, 16.0 / 6.0);
  EXPECT_DOUBLE_EQ(s.avg_degree_neighbor, 14.0 / 6.0);
  // CC: A 1, B 1, C 2/6, D 1, E 1/3, F 0.
  EXPECT_NEAR(s.avg_clustering, (1 + 1 + 1.0 / 3 + 1 + 1.0 / 3 + 0) / 6.0, 1e-15);
}

// The published component statistics report Avg. Deg as 2|F|/|V|, truncated
// to two decimals; e.g. 6877 nodes and 98537 triplets give 28.65, and 5140
// nodes with 34208 triplets give 13.31.
TEST(Structure, AverageTripletDegreeMatchesPublishedTableArithmetic) {
  struct Row {
    std::size_t nodes, triplets;
    double published;
  };
  for (const Row row : {Row{6877, 98537, 28.65}, Row{5140, 34208, 13.31}}) {
    std::mt19937_64 rng(row.nodes);
    auto ts = support::random_triplets(rng, row.nodes, row.triplets - row.nodes, 5, false);
    auto s = summarize(build_graph(std::move(ts)));
    ASSERT_EQ(s.nodes, row.nodes);
    ASSERT_EQ(s.triplets, row.triplets);
    EXPECT_DOUBLE_EQ(std::floor(s.avg_degree_triplet * 100.0) / 100.0, row.published);
  }
}
